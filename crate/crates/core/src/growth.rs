//! Growth analytics for coefficient tables: q-Gevrey order fits, minimal
//! geometric constants, the slice disciplines of the existence theorems,
//! space membership, the sets `U_{q,delta}`, and the `q -> 1` study.
//!
//! All magnitudes are handled as natural logarithms so that tables with
//! entries like `[60]!_2` stay in range; `-inf` marks a zero.

use core::f64::consts::PI;
use core::ops::RangeInclusive;

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qcalc::{bracket, ln_classical_factorial};
use crate::registry::{self, ExampleId};
use crate::ring::Ring;
use crate::scaled::{horner, Scaled};
use crate::series::Series2;
use crate::solver::{solve_classical_limit, solve_e_major, solve_x_major, EquationSpec, SolvePath, SolveResult};

pub const DEFAULT_SAMPLES: usize = 64;

/// Largest relative change of `A` between nested windows still counted as stable.
pub const DRIFT_LIMIT: f64 = 0.05;

fn unit_roots(k: usize) -> impl Iterator<Item = Complex64> {
    (0..k).map(move |i| {
        let th = 2.0 * PI * i as f64 / k as f64;
        Complex64::new(libm::cos(th), libm::sin(th))
    })
}

/// Max of `|f|` over `k` equally spaced points of the circle of the given radius.
pub fn sup_on_disk(f: &[Complex64], radius: f64, k: usize) -> f64 {
    unit_roots(k)
        .map(|w| {
            let x = w * radius;
            f.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c).norm()
        })
        .fold(0.0, f64::max)
}

/// `ln` of [`sup_on_disk`] for coefficients in extended range.
pub fn ln_sup_on_disk(f: &[Scaled], radius: f64, k: usize) -> f64 {
    unit_roots(k)
        .map(|w| horner(f, Scaled::from_complex(w).scale_f64(radius)).ln_abs())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `ln |a_n| = log_c + n log_a + s (n^2/2) ln|q|`, fitted by least squares.
#[derive(Clone, Debug, PartialEq)]
pub struct GevreyFit {
    pub s: f64,
    pub log_a: f64,
    pub log_c: f64,
    /// Root mean square of the residuals.
    pub residual: f64,
    pub used: usize,
    /// Indices in the window skipped because the coefficient vanishes.
    pub masked: Vec<usize>,
}

/// Fits log-moduli (`-inf` for zeros) over `window`.
pub fn fit_gevrey_ln(ln_moduli: &[f64], q_modulus: f64, window: RangeInclusive<usize>) -> Result<GevreyFit> {
    let lq = libm::log(q_modulus);
    if !(lq > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("|q| must exceed 1, got {q_modulus}")));
    }
    let mut rows = Vec::new();
    let mut masked = Vec::new();
    for n in window {
        match ln_moduli.get(n) {
            Some(v) if v.is_finite() => rows.push((n as f64, *v)),
            Some(_) => masked.push(n),
            None => break,
        }
    }
    if rows.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, have: rows.len() });
    }
    // Columns are scaled to unit size so the QR stays well conditioned.
    let top = rows.last().map(|r| r.0).unwrap_or(1.0).max(1.0);
    let a = DMatrix::from_fn(rows.len(), 3, |i, j| {
        let t = rows[i].0 / top;
        match j {
            0 => 1.0,
            1 => t,
            _ => t * t,
        }
    });
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let qr = a.clone().qr();
    let rhs = qr.q().transpose() * &b;
    let x = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::InvalidArgument(alloc::string::String::from("degenerate fit window")))?;
    let resid = &a * &x - &b;
    let residual = libm::sqrt(resid.norm_squared() / rows.len() as f64);
    Ok(GevreyFit {
        s: 2.0 * x[2] / (top * top * lq),
        log_a: x[1] / top,
        log_c: x[0],
        residual,
        used: rows.len(),
        masked,
    })
}

/// [`fit_gevrey_ln`] on plain moduli.
pub fn fit_gevrey(moduli: &[f64], q_modulus: f64, window: RangeInclusive<usize>) -> Result<GevreyFit> {
    let lns: Vec<f64> = moduli.iter().map(|m| if *m > 0.0 { libm::log(*m) } else { f64::NEG_INFINITY }).collect();
    fit_gevrey_ln(&lns, q_modulus, window)
}

/// `ln C` and `ln A` of a bound `C A^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub ln_c: f64,
    pub ln_a: f64,
}

impl Constants {
    pub fn c(&self) -> f64 {
        libm::exp(self.ln_c)
    }

    pub fn a(&self) -> f64 {
        libm::exp(self.ln_a)
    }
}

/// Collapses `(d, excess)` pairs to the largest finite excess per `d`.
fn envelope(points: &[(usize, f64)]) -> Vec<(f64, f64)> {
    let mut best: alloc::collections::BTreeMap<usize, f64> = alloc::collections::BTreeMap::new();
    for &(d, v) in points {
        if v.is_finite() {
            let e = best.entry(d).or_insert(f64::NEG_INFINITY);
            *e = e.max(v);
        }
    }
    best.into_iter().map(|(d, v)| (d as f64, v)).collect()
}

/// Smallest `ln C` with `excess_d <= ln C + d ln A` for the given `ln A`.
pub fn ln_c_at(points: &[(usize, f64)], ln_a: f64) -> f64 {
    points.iter().filter(|p| p.1.is_finite()).map(|&(d, v)| v - d as f64 * ln_a).fold(f64::NEG_INFINITY, f64::max)
}

/// Minimal `(C, A)`, `A >= 1`, with `excess_d <= ln C + d ln A` for every
/// point, where `excess_d = ln|a_d| - ln(template_d)`.
///
/// Among all valid pairs the one minimizing the bound at the mean support
/// index, `ln C + dbar ln A`, is returned; ties go to the smaller `A`.
pub fn minimal_constants(points: &[(usize, f64)]) -> Option<Constants> {
    let env = envelope(points);
    if env.is_empty() {
        return None;
    }
    let dbar = env.iter().map(|p| p.0).sum::<f64>() / env.len() as f64;
    let objective = |a: f64| env.iter().map(|&(d, v)| v - d * a).fold(f64::NEG_INFINITY, f64::max) + dbar * a;
    let mut candidates = alloc::vec![0.0];
    for (i, &(di, vi)) in env.iter().enumerate() {
        for &(dj, vj) in &env[i + 1..] {
            let a = (vj - vi) / (dj - di);
            if a > 0.0 {
                candidates.push(a);
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut best = (objective(0.0), 0.0);
    for &a in &candidates {
        let f = objective(a);
        if f < best.0 - 1e-12 * (1.0 + best.0.abs()) {
            best = (f, a);
        }
    }
    let ln_a = best.1;
    Some(Constants { ln_c: ln_c_at(points, ln_a), ln_a })
}

/// Minimal constants on nested windows `[start, end]` and their drift.
#[derive(Clone, Debug, PartialEq)]
pub struct Stabilization {
    pub windows: Vec<(usize, Constants)>,
    /// Largest relative change of `A` between consecutive windows.
    pub drift: f64,
    pub stable: bool,
}

/// `steps` window ends spread evenly up to `end`, the first at the midpoint of `[start, end]`.
pub fn nested_ends(start: usize, end: usize, steps: usize) -> Vec<usize> {
    if end <= start || steps <= 1 {
        return alloc::vec![end];
    }
    let first = start + (end - start) / 2;
    let mut out: Vec<usize> = (0..steps).map(|i| first + (end - first) * i / (steps - 1)).collect();
    out.dedup();
    out
}

pub fn stabilization(points: &[(usize, f64)], start: usize, ends: &[usize]) -> Stabilization {
    let windows: Vec<(usize, Constants)> = ends
        .iter()
        .filter_map(|&e| {
            let sub: Vec<(usize, f64)> = points.iter().copied().filter(|p| p.0 >= start && p.0 <= e).collect();
            minimal_constants(&sub).map(|c| (e, c))
        })
        .collect();
    let drift = windows
        .windows(2)
        .map(|w| (w[1].1.a() - w[0].1.a()).abs() / w[0].1.a())
        .fold(0.0, f64::max);
    Stabilization { stable: !windows.is_empty() && drift < DRIFT_LIMIT, windows, drift }
}

/// `ln |a_{n,m}|` for one component of a table, with `q` substituted numerically.
#[derive(Clone, Debug, PartialEq)]
pub struct LnTable {
    nx: usize,
    ne: usize,
    data: Vec<f64>,
}

impl LnTable {
    pub fn from_fn(nx: usize, ne: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity((nx + 1) * (ne + 1));
        for n in 0..=nx {
            for m in 0..=ne {
                data.push(f(n, m));
            }
        }
        LnTable { nx, ne, data }
    }

    pub fn from_series<R: Ring>(t: &Series2<R>, component: usize, q: Complex64) -> Self {
        Self::from_fn(t.nx(), t.ne(), |n, m| t.at(n, m, component).scaled_at(q).ln_abs())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ne(&self) -> usize {
        self.ne
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.data[n * (self.ne + 1) + m]
    }

    /// `(n + m, ln|a_{n,m}| - template(n, m))` over the window `n <= wx, m <= we`.
    pub fn excess(&self, wx: usize, we: usize, template: impl Fn(usize, usize) -> f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for n in 0..=wx.min(self.nx) {
            for m in 0..=we.min(self.ne) {
                let v = self.get(n, m);
                if v.is_finite() {
                    out.push((n + m, v - template(n, m)));
                }
            }
        }
        out
    }
}

/// Which slices a discipline bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// `y_n(eps)`, sup taken in `eps`.
    X,
    /// `u_m(x)`, sup taken in `x`.
    E,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceSup {
    pub index: usize,
    pub radius: f64,
    pub ln_sup: f64,
}

/// One slice discipline: sups on shrinking disks against `C A^k template_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisciplineCheck {
    pub axis: Axis,
    pub slices: Vec<SliceSup>,
    pub ln_template: Vec<f64>,
    pub stabilization: Stabilization,
    pub fit: Option<GevreyFit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub p: i32,
    pub alpha: u32,
    pub checks: Vec<DisciplineCheck>,
    /// The table vanishes, so no constants are meaningful.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthOptions {
    pub r: f64,
    pub q_point: Complex64,
    pub samples: usize,
    /// First slice index entering the constant search.
    pub start: usize,
    /// Number of nested windows in the stabilization curve.
    pub steps: usize,
}

impl GrowthOptions {
    pub fn new(r: f64, q_point: Complex64) -> Self {
        GrowthOptions { r, q_point, samples: DEFAULT_SAMPLES, start: 1, steps: 5 }
    }
}

fn slice_sup<R: Ring>(coeffs: impl Iterator<Item = R>, q: Complex64, radius: f64, k: usize) -> f64 {
    let c: Vec<Scaled> = coeffs.map(|v| v.scaled_at(q)).collect();
    ln_sup_on_disk(&c, radius, k)
}

fn discipline<R: Ring>(
    table: &Series2<R>,
    axis: Axis,
    opts: &GrowthOptions,
    radius: impl Fn(usize) -> f64,
    ln_template: impl Fn(usize) -> f64,
) -> DisciplineCheck {
    let count = match axis {
        Axis::X => table.nx(),
        Axis::E => table.ne(),
    };
    let q_modulus = opts.q_point.norm();
    let mut slices = Vec::new();
    let mut templates = Vec::new();
    for k in 0..=count {
        let rad = radius(k);
        let ln_sup = (0..table.dim())
            .map(|c| match axis {
                Axis::X => slice_sup((0..=table.ne()).map(|m| table.at(k, m, c).clone()), opts.q_point, rad, opts.samples),
                Axis::E => slice_sup((0..=table.nx()).map(|n| table.at(n, k, c).clone()), opts.q_point, rad, opts.samples),
            })
            .fold(f64::NEG_INFINITY, f64::max);
        slices.push(SliceSup { index: k, radius: rad, ln_sup });
        templates.push(ln_template(k));
    }
    let points: Vec<(usize, f64)> =
        slices.iter().filter(|s| s.index >= opts.start).map(|s| (s.index, s.ln_sup - templates[s.index])).collect();
    let ends = nested_ends(opts.start, count, opts.steps);
    let stab = stabilization(&points, opts.start, &ends);
    let sups: Vec<f64> = slices.iter().map(|s| s.ln_sup).collect();
    let fit = fit_gevrey_ln(&sups, q_modulus, opts.start..=count).ok();
    DisciplineCheck { axis, slices, ln_template: templates, stabilization: stab, fit }
}

/// Evaluates the slice disciplines of the existence theorems on a solved table.
///
/// * `p > 0`: `sup_{|eps| <= r} |y_n| <= C A^n |q|^{n^2/2p}` and
///   `sup_{|x| <= r/|q|^{floor(m/alpha)}} |u_m| <= C A^m`.
/// * `p = 0`: `sup_{|eps| <= r/|q|^{n/alpha}} |y_n| <= C A^n` and the same `u_m` bound.
/// * `p = -1`: `sup_{|x| <= r/|q|^{floor(m/alpha)}} |u_m| <= C A^m |q|^{m^2/2alpha^2}`.
pub fn verify_theorem_bounds<R: Ring>(spec: &EquationSpec<R>, result: &SolveResult<R>, opts: &GrowthOptions) -> GrowthReport {
    let table = &result.table;
    let qm = opts.q_point.norm();
    let lq = libm::log(qm);
    let (p, alpha) = (spec.p, spec.alpha);
    let af = alpha as f64;
    let r = opts.r;
    let e_radius = |m: usize| r / libm::pow(qm, (m / alpha as usize) as f64);
    let mut checks = Vec::new();
    if p > 0 {
        let pf = p as f64;
        checks.push(discipline(table, Axis::X, opts, |_| r, |n| (n * n) as f64 / (2.0 * pf) * lq));
    } else if p == 0 {
        checks.push(discipline(table, Axis::X, opts, |n| r / libm::pow(qm, n as f64 / af), |_| 0.0));
    }
    if p >= 0 {
        checks.push(discipline(table, Axis::E, opts, e_radius, |_| 0.0));
    } else {
        checks.push(discipline(table, Axis::E, opts, e_radius, |m| (m * m) as f64 / (2.0 * af * af) * lq));
    }
    GrowthReport { p, alpha, checks, degenerate: table.is_zero() }
}

/// The spaces of q-Gevrey type a table can be tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Template `|q|^{nm}`.
    OZero,
    /// Template `min{|q|^{n^2/2p}, |q|^{nm/alpha}}`.
    Monomial { p: u32, alpha: u32 },
}

impl SpaceKind {
    pub fn ln_template(self, n: usize, m: usize, ln_q: f64) -> f64 {
        let (nf, mf) = (n as f64, m as f64);
        match self {
            SpaceKind::OZero => nf * mf * ln_q,
            SpaceKind::Monomial { p, alpha } => {
                let a = nf * nf / (2.0 * p as f64) * ln_q;
                let b = nf * mf / alpha as f64 * ln_q;
                a.min(b)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceVerdict {
    pub kind: SpaceKind,
    pub constants: Option<Constants>,
    pub stabilization: Stabilization,
    /// `(A, C(A))` on the full window for a fixed grid of `A`.
    pub curve: Vec<(f64, f64)>,
    pub consistent: bool,
}

/// The `A` values at which [`SpaceVerdict::curve`] is sampled.
pub const CURVE_GRID: [f64; 7] = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0];

/// Minimal `(C, A)` with `|a_{n,m}| <= C A^{n+m} B_{n,m}` on growing square windows.
pub fn classify_space(table: &LnTable, q_modulus: f64, kind: SpaceKind, steps: usize) -> SpaceVerdict {
    let lq = libm::log(q_modulus);
    let w = table.nx().min(table.ne());
    let template = |n: usize, m: usize| kind.ln_template(n, m, lq);
    let ends = nested_ends(0, w, steps);
    let windows: Vec<(usize, Constants)> = ends
        .iter()
        .filter_map(|&e| minimal_constants(&table.excess(e, e, template)).map(|c| (e, c)))
        .collect();
    let drift = windows.windows(2).map(|p| (p[1].1.a() - p[0].1.a()).abs() / p[0].1.a()).fold(0.0, f64::max);
    let stab = Stabilization { stable: !windows.is_empty() && drift < DRIFT_LIMIT, windows, drift };
    let full = table.excess(table.nx(), table.ne(), template);
    let curve = CURVE_GRID.iter().map(|&a| (a, libm::exp(ln_c_at(&full, libm::log(a))))).collect();
    SpaceVerdict {
        kind,
        constants: minimal_constants(&full),
        consistent: stab.stable,
        stabilization: stab,
        curve,
    }
}

/// Outcome of the finite test `|1 - q^m x| > delta^m`, `0 <= m <= M`.
#[derive(Clone, Debug, PartialEq)]
pub struct UqMembership {
    pub member: bool,
    pub first_violation: Option<u32>,
    /// From this `m` on the inequality holds for every larger `m` as well.
    pub tail_from: Option<u32>,
}

/// Finite-`M` membership in `U_{q,delta}`.
///
/// At `m = 0` the comparison is `>=`, so the boundary point `x = 0` of the
/// `m = 0` disk counts as inside, as for the limit set itself. Once
/// `|q|^m |x| - 1 > delta^m` with `delta <= |q|`, every later `m` passes, and
/// the scan stops there.
pub fn uq_delta_member(x: Complex64, q: Complex64, delta: f64, max_m: u32) -> UqMembership {
    let qm = q.norm();
    let mut qx = x;
    let mut dm = 1.0;
    for m in 0..=max_m {
        let lhs = (Complex64::new(1.0, 0.0) - qx).norm();
        let ok = if m == 0 { lhs >= dm } else { lhs > dm };
        if !ok {
            return UqMembership { member: false, first_violation: Some(m), tail_from: None };
        }
        if delta <= qm && qx.norm() - 1.0 > dm {
            return UqMembership { member: true, first_violation: None, tail_from: Some(m) };
        }
        qx *= q;
        dm *= delta;
    }
    UqMembership { member: true, first_violation: None, tail_from: None }
}

/// `1 + 2^{-k}`.
pub fn dyadic_q(k: u32) -> BigRational {
    BigRational::one() + BigRational::new(BigInt::one(), BigInt::one() << k as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfluenceRow {
    pub q: BigRational,
    /// Largest relative deviation of `a_{n,m}(q)` from the `q = 1` table.
    pub max_deviation: f64,
    /// Largest relative deviation of `[n]_q` from `n`.
    pub bracket_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfluenceReport {
    pub example: ExampleId,
    pub rows: Vec<ConfluenceRow>,
    /// Whether deviations shrink as `q -> 1`; `None` with fewer than two rows.
    pub converging: Option<bool>,
    pub limit: Series2<BigRational>,
    pub limit_discipline: Stabilization,
}

/// `ln` of the classical template: `min{n!^{1/p}, m!^{1/alpha}}` for
/// `p >= 1`, `m!^{1/alpha}` otherwise.
pub fn ln_classical_template(p: i32, alpha: u32, n: usize, m: usize) -> f64 {
    let em = ln_classical_factorial(m as u32) / alpha as f64;
    if p >= 1 {
        (ln_classical_factorial(n as u32) / p as f64).min(em)
    } else {
        em
    }
}

fn rel_dev(a: &BigRational, b: &BigRational) -> f64 {
    let z = Complex64::new(0.0, 0.0);
    let diff = (a.clone() - b).scaled_at(z);
    if diff.is_zero() {
        return 0.0;
    }
    if b.is_zero() {
        return diff.abs_f64();
    }
    libm::exp(diff.ln_abs() - b.scaled_at(z).ln_abs())
}

/// Solves a q-independent family at each `q` in `qs` and at `q = 1`, and
/// compares them.
pub fn confluence_study(
    id: ExampleId,
    qs: &[BigRational],
    nx: usize,
    ne: usize,
    bracket_max: u32,
) -> Result<ConfluenceReport> {
    if id.operator() != crate::solver::Operator::Dq {
        return Err(Error::InvalidArgument(alloc::format!("{id} is not a d_q family")));
    }
    let path = id.path();
    let solve = |spec: &EquationSpec<BigRational>| match path {
        SolvePath::XMajor => solve_x_major(spec, nx, ne),
        SolvePath::EMajor => solve_e_major(spec, nx, ne),
    };
    let limit_spec = registry::build(id, BigRational::one(), 1, nx, ne)?;
    let limit = solve_classical_limit(&limit_spec, nx, ne, path)?.table;
    let mut rows = Vec::new();
    for q in qs {
        let table = solve(&registry::build(id, q.clone(), 1, nx, ne)?)?.table;
        let mut worst = 0.0f64;
        for n in 0..=nx {
            for m in 0..=ne {
                worst = worst.max(rel_dev(table.at(n, m, 0), limit.at(n, m, 0)));
            }
        }
        let bracket_deviation = (1..=bracket_max)
            .map(|n| rel_dev(&bracket(n, q), &BigRational::from_integer(BigInt::from(n))))
            .fold(0.0, f64::max);
        rows.push(ConfluenceRow { q: q.clone(), max_deviation: worst, bracket_deviation });
    }
    rows.sort_by(|a, b| b.q.cmp(&a.q));
    let converging = if rows.len() < 2 {
        None
    } else {
        Some(rows.windows(2).all(|w| w[1].max_deviation <= w[0].max_deviation))
    };
    let ln_limit = LnTable::from_series(&limit, 0, Complex64::new(1.0, 0.0));
    let points = ln_limit.excess(nx, ne, |n, m| ln_classical_template(id.p(), 1, n, m));
    let w = nx.min(ne);
    let limit_discipline = stabilization(&points, 0, &nested_ends(w, 2 * w, 5));
    Ok(ConfluenceReport { example: id, rows, converging, limit, limit_discipline })
}
