//! q-Nagumo norms on truncated polynomial data.
//!
//! For `rho = r/|q|` the weight is `d_n(t) = r - |q|^n t` on
//! `rho/|q|^n <= t <= r/|q|^n` and `r - rho` below, and
//! `||f||_n = sup_{|x| <= r/|q|^n} |f(x)| d_n(|x|)^n`.
//! Suprema are estimated on a polar grid and are lower bounds of the true
//! values.

use core::f64::consts::{E, PI};

use alloc::vec::Vec;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

pub const DEFAULT_RADIAL: usize = 256;
pub const DEFAULT_ANGULAR: usize = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct NagumoContext {
    r: f64,
    q_modulus: f64,
    radial: usize,
    angular: usize,
    roots: Vec<Complex64>,
}

/// Precomputed evaluation of one polynomial on rings of the angular grid.
struct Evaluator<'a> {
    coeffs: &'a [Complex64],
    roots: &'a [Complex64],
    re: Vec<f64>,
    im: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(coeffs: &'a [Complex64], roots: &'a [Complex64]) -> Self {
        Evaluator { coeffs, roots, re: alloc::vec![0.0; roots.len()], im: alloc::vec![0.0; roots.len()] }
    }

    /// `max_k |f(t e^{i theta_k})|`.
    fn circle_max(&mut self, t: f64) -> f64 {
        let deg = match self.coeffs.iter().rposition(|c| c.re != 0.0 || c.im != 0.0) {
            Some(d) => d,
            None => return 0.0,
        };
        if deg == 0 || t == 0.0 {
            return self.coeffs[0].norm();
        }
        let zr: Vec<f64> = self.roots.iter().map(|w| w.re * t).collect();
        let zi: Vec<f64> = self.roots.iter().map(|w| w.im * t).collect();
        let top = self.coeffs[deg];
        self.re.iter_mut().for_each(|x| *x = top.re);
        self.im.iter_mut().for_each(|x| *x = top.im);
        for c in self.coeffs[..deg].iter().rev() {
            for k in 0..zr.len() {
                let (a, b) = (self.re[k], self.im[k]);
                self.re[k] = a * zr[k] - b * zi[k] + c.re;
                self.im[k] = a * zi[k] + b * zr[k] + c.im;
            }
        }
        let mut best = 0.0f64;
        for k in 0..zr.len() {
            best = best.max(self.re[k] * self.re[k] + self.im[k] * self.im[k]);
        }
        libm::sqrt(best)
    }
}

impl NagumoContext {
    pub fn new(r: f64, q_modulus: f64) -> Result<Self> {
        Self::with_grid(r, q_modulus, DEFAULT_RADIAL, DEFAULT_ANGULAR)
    }

    pub fn with_grid(r: f64, q_modulus: f64, radial: usize, angular: usize) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("radius must be positive, got {r}")));
        }
        if !(q_modulus > 1.0) {
            return Err(Error::InvalidArgument(alloc::format!("|q| must exceed 1, got {q_modulus}")));
        }
        if radial < 2 || angular < 1 {
            return Err(Error::InvalidArgument(alloc::string::String::from("grid needs at least 2 radii and 1 angle")));
        }
        let roots = (0..angular)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / angular as f64;
                Complex64::new(libm::cos(th), libm::sin(th))
            })
            .collect();
        Ok(NagumoContext { r, q_modulus, radial, angular, roots })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn q_modulus(&self) -> f64 {
        self.q_modulus
    }

    pub fn rho(&self) -> f64 {
        self.r / self.q_modulus
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.radial, self.angular)
    }

    fn qn(&self, n: usize) -> f64 {
        libm::pow(self.q_modulus, n as f64)
    }

    /// `d_n(t)` on `0 <= t <= r/|q|^n`.
    pub fn dn(&self, t: f64, n: usize) -> Result<f64> {
        let qn = self.qn(n);
        let outer = self.r / qn;
        if !(0.0..=outer * (1.0 + 1e-15)).contains(&t) {
            return Err(Error::InvalidArgument(alloc::format!("t = {t} outside [0, {outer}]")));
        }
        Ok(self.dn_unchecked(t, qn))
    }

    fn dn_unchecked(&self, t: f64, qn: f64) -> f64 {
        let rho = self.rho();
        if t * qn <= rho {
            self.r - rho
        } else {
            (self.r - qn * t).max(0.0)
        }
    }

    fn sweep(&self, f: &[Complex64], radii: impl Iterator<Item = (f64, f64)>) -> f64 {
        let mut ev = Evaluator::new(f, &self.roots);
        let mut best = 0.0f64;
        for (t, weight) in radii {
            if weight <= 0.0 {
                continue;
            }
            best = best.max(ev.circle_max(t) * weight);
        }
        best
    }

    fn uniform(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        let g = self.radial;
        (0..g).map(move |i| lo + (hi - lo) * i as f64 / (g - 1) as f64)
    }

    /// Grid estimate of `||f||_n`.
    ///
    /// On the plateau `t <= rho/|q|^n` the weight is constant, so by the
    /// maximum principle its inner edge is the only radius needed there;
    /// the radial grid covers the annulus out to `r/|q|^n`.
    pub fn norm(&self, f: &[Complex64], n: usize) -> f64 {
        let qn = self.qn(n);
        let (lo, hi) = (self.rho() / qn, self.r / qn);
        let radii = self.uniform(lo, hi).map(|t| (t, libm::pow(self.dn_unchecked(t, qn), n as f64)));
        self.sweep(f, radii)
    }

    /// Grid estimate of `||f||'_n = sup_{|x| <= r/q^n} |f(x)| (r - q^n |x|)^n`.
    pub fn norm_prime(&self, f: &[Complex64], n: usize) -> f64 {
        let qn = self.qn(n);
        let radii = self.uniform(0.0, self.r / qn).map(|t| (t, libm::pow((self.r - qn * t).max(0.0), n as f64)));
        self.sweep(f, radii)
    }

    /// Grid estimate of the classical Nagumo norm `sup_{|x| <= r} |f(x)| (r - |x|)^n`.
    pub fn classical_norm(&self, f: &[Complex64], n: usize) -> f64 {
        let radii = self.uniform(0.0, self.r).map(|t| (t, libm::pow((self.r - t).max(0.0), n as f64)));
        self.sweep(f, radii)
    }

    /// Max-norm over components.
    pub fn vector_norm(&self, v: &[Vec<Complex64>], n: usize) -> f64 {
        v.iter().map(|f| self.norm(f, n)).fold(0.0, f64::max)
    }

    /// Row-sum operator norm, taken pointwise before the supremum.
    pub fn matrix_norm(&self, rows: &[Vec<Vec<Complex64>>], n: usize) -> f64 {
        let qn = self.qn(n);
        let (lo, hi) = (self.rho() / qn, self.r / qn);
        let mut best = 0.0f64;
        for t in self.uniform(lo, hi) {
            let weight = libm::pow(self.dn_unchecked(t, qn), n as f64);
            for w in &self.roots {
                let x = *w * t;
                let row_max = rows
                    .iter()
                    .map(|row| row.iter().map(|f| horner(f, x).norm()).sum::<f64>())
                    .fold(0.0, f64::max);
                best = best.max(row_max * weight);
            }
        }
        best
    }
}

fn horner(f: &[Complex64], x: Complex64) -> Complex64 {
    f.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

pub fn poly_add(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let len = f.len().max(g.len());
    (0..len)
        .map(|k| f.get(k).copied().unwrap_or_default() + g.get(k).copied().unwrap_or_default())
        .collect()
}

pub fn poly_mul(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `d_q f` with coefficients `[k]_q c_k`.
pub fn poly_dq(f: &[Complex64], q: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(f.len().saturating_sub(1));
    let mut bracket = Complex64::new(0.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    for c in f.iter().skip(1) {
        bracket += qk;
        qk *= q;
        out.push(c * bracket);
    }
    if out.is_empty() {
        out.push(Complex64::new(0.0, 0.0));
    }
    out
}

pub fn poly_sigma(f: &[Complex64], q: Complex64) -> Vec<Complex64> {
    let mut qk = Complex64::new(1.0, 0.0);
    f.iter()
        .map(|c| {
            let v = c * qk;
            qk *= q;
            v
        })
        .collect()
}

/// Parameters of the randomized inequality check.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePlan {
    pub count: usize,
    pub max_degree: usize,
    pub coeff_bound: f64,
    pub seed: u64,
    pub max_index: usize,
    pub slack: f64,
    pub systems: bool,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { count: 500, max_degree: 8, coeff_bound: 1.0, seed: 0x5eed, max_index: 5, slack: 1.02, systems: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Inequality {
    Sum,
    Product,
    Dq,
    Sigma,
    ProductPrime,
    DqPrime,
    SigmaPrime,
    SystemSum,
    SystemProduct,
    SystemDq,
    SystemSigma,
}

impl Inequality {
    pub const ALL: [Inequality; 11] = [
        Inequality::Sum,
        Inequality::Product,
        Inequality::Dq,
        Inequality::Sigma,
        Inequality::ProductPrime,
        Inequality::DqPrime,
        Inequality::SigmaPrime,
        Inequality::SystemSum,
        Inequality::SystemProduct,
        Inequality::SystemDq,
        Inequality::SystemSigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::Sum => "sum",
            Inequality::Product => "product",
            Inequality::Dq => "dq",
            Inequality::Sigma => "sigma",
            Inequality::ProductPrime => "product_prime",
            Inequality::DqPrime => "dq_prime",
            Inequality::SigmaPrime => "sigma_prime",
            Inequality::SystemSum => "system_sum",
            Inequality::SystemProduct => "system_product",
            Inequality::SystemDq => "system_dq",
            Inequality::SystemSigma => "system_sigma",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub sample: usize,
    pub inequality: Inequality,
    pub n: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tally {
    pub inequality: Inequality,
    pub checked: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` seen (zero when every right side vanished).
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub samples: usize,
    pub tallies: Vec<Tally>,
    pub violations: Vec<Violation>,
}

impl NormReport {
    pub fn empty() -> Self {
        NormReport {
            samples: 0,
            tallies: Inequality::ALL
                .iter()
                .map(|&inequality| Tally { inequality, checked: 0, violations: 0, worst_ratio: 0.0 })
                .collect(),
            violations: Vec::new(),
        }
    }

    pub fn total_violations(&self) -> usize {
        self.tallies.iter().map(|t| t.violations).sum()
    }

    fn record(&mut self, sample: usize, inequality: Inequality, n: usize, m: usize, lhs: f64, rhs: f64, slack: f64) {
        let tally = self.tallies.iter_mut().find(|t| t.inequality == inequality).expect("every inequality is tallied");
        tally.checked += 1;
        if rhs > 0.0 {
            tally.worst_ratio = tally.worst_ratio.max(lhs / rhs);
        }
        if lhs > slack * rhs {
            tally.violations += 1;
            self.violations.push(Violation { sample, inequality, n, m, lhs, rhs });
        }
    }

    /// Combines reports of disjoint sample sets.
    pub fn merge(mut self, other: NormReport) -> NormReport {
        self.samples += other.samples;
        for (a, b) in self.tallies.iter_mut().zip(other.tallies) {
            a.checked += b.checked;
            a.violations += b.violations;
            a.worst_ratio = a.worst_ratio.max(b.worst_ratio);
        }
        self.violations.extend(other.violations);
        self.violations.sort_by_key(|v| (v.sample, v.inequality, v.n, v.m));
        self
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn random_poly(rng: &mut ChaCha8Rng, plan: &SamplePlan) -> Vec<Complex64> {
    let deg = (rng.next_u64() % (plan.max_degree as u64 + 1)) as usize;
    (0..=deg)
        .map(|_| {
            let re = (2.0 * uniform(rng) - 1.0) * plan.coeff_bound;
            let im = (2.0 * uniform(rng) - 1.0) * plan.coeff_bound;
            Complex64::new(re, im)
        })
        .collect()
}

/// Per-sample generator; sample `i` is reproducible on its own.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Whether the primed inequalities apply (real `q > 1`).
fn real_q(q: Complex64) -> bool {
    q.im == 0.0 && q.re > 1.0
}

/// Checks every inequality on sample `index` of the plan.
pub fn check_sample(ctx: &NagumoContext, q: Complex64, plan: &SamplePlan, index: usize) -> NormReport {
    let mut rng = sample_rng(plan.seed, index);
    let f = random_poly(&mut rng, plan);
    let g = random_poly(&mut rng, plan);
    check_pair(ctx, q, plan, index, &f, &g, &mut rng)
}

#[allow(clippy::too_many_arguments)]
fn check_pair(
    ctx: &NagumoContext,
    q: Complex64,
    plan: &SamplePlan,
    index: usize,
    f: &[Complex64],
    g: &[Complex64],
    rng: &mut ChaCha8Rng,
) -> NormReport {
    let mut rep = NormReport::empty();
    rep.samples = 1;
    let top = plan.max_index;
    let s = plan.slack;
    let qm = q.norm();
    let r = ctx.r();

    let nf: Vec<f64> = (0..=top).map(|n| ctx.norm(f, n)).collect();
    let ng: Vec<f64> = (0..=top).map(|n| ctx.norm(g, n)).collect();
    let sum = poly_add(f, g);
    for n in 0..=top {
        rep.record(index, Inequality::Sum, n, n, ctx.norm(&sum, n), nf[n] + ng[n], s);
    }
    let prod = poly_mul(f, g);
    let nprod: Vec<f64> = (0..=2 * top).map(|k| ctx.norm(&prod, k)).collect();
    for n in 0..=top {
        for m in 0..=top {
            rep.record(index, Inequality::Product, n, m, nprod[n + m], nf[n] * ng[m], s);
        }
    }
    let df = poly_dq(f, q);
    let sf = poly_sigma(f, q);
    for n in 0..=top {
        let rhs = 2.0 * libm::pow(qm, (n + 1) as f64) * nf[n];
        rep.record(index, Inequality::Dq, n, n + 1, ctx.norm(&df, n + 1), rhs, s);
        let rhs = r * (1.0 - 1.0 / qm) * nf[n];
        rep.record(index, Inequality::Sigma, n, n + 1, ctx.norm(&sf, n + 1), rhs, s);
    }

    if real_q(q) {
        let qr = q.re;
        let pf: Vec<f64> = (0..=top).map(|n| ctx.norm_prime(f, n)).collect();
        let pg: Vec<f64> = (0..=top).map(|n| ctx.norm_prime(g, n)).collect();
        let pprod: Vec<f64> = (0..=2 * top).map(|k| ctx.norm_prime(&prod, k)).collect();
        for n in 0..=top {
            for m in 0..=top {
                rep.record(index, Inequality::ProductPrime, n, m, pprod[n + m], pf[n] * pg[m], s);
            }
            let rhs = E * libm::pow(qr, n as f64) * (n + 1) as f64 * pf[n];
            rep.record(index, Inequality::DqPrime, n, n + 1, ctx.norm_prime(&df, n + 1), rhs, s);
            rep.record(index, Inequality::SigmaPrime, n, n + 1, ctx.norm_prime(&sf, n + 1), r * pf[n], s);
        }
    }

    if plan.systems {
        let small = SamplePlan { max_degree: plan.max_degree.min(4), ..plan.clone() };
        let v: Vec<Vec<Complex64>> = (0..2).map(|_| random_poly(rng, &small)).collect();
        let w: Vec<Vec<Complex64>> = (0..2).map(|_| random_poly(rng, &small)).collect();
        let a: Vec<Vec<Vec<Complex64>>> =
            (0..2).map(|_| (0..2).map(|_| random_poly(rng, &small)).collect()).collect();
        let top_s = top.min(3);
        let nv: Vec<f64> = (0..=top_s + 1).map(|n| ctx.vector_norm(&v, n)).collect();
        let nw: Vec<f64> = (0..=top_s).map(|n| ctx.vector_norm(&w, n)).collect();
        let na: Vec<f64> = (0..=top_s).map(|n| ctx.matrix_norm(&a, n)).collect();
        let vw: Vec<Vec<Complex64>> = v.iter().zip(&w).map(|(x, y)| poly_add(x, y)).collect();
        let av: Vec<Vec<Complex64>> = a
            .iter()
            .map(|row| row.iter().zip(&v).fold(Vec::new(), |acc, (aij, vj)| poly_add(&acc, &poly_mul(aij, vj))))
            .collect();
        let dv: Vec<Vec<Complex64>> = v.iter().map(|x| poly_dq(x, q)).collect();
        let sv: Vec<Vec<Complex64>> = v.iter().map(|x| poly_sigma(x, q)).collect();
        for n in 0..=top_s {
            rep.record(index, Inequality::SystemSum, n, n, ctx.vector_norm(&vw, n), nv[n] + nw[n], s);
            for m in 0..=top_s {
                rep.record(index, Inequality::SystemProduct, n, m, ctx.vector_norm(&av, n + m), na[n] * nv[m], s);
            }
            let rhs = 2.0 * libm::pow(qm, (n + 1) as f64) * nv[n];
            rep.record(index, Inequality::SystemDq, n, n + 1, ctx.vector_norm(&dv, n + 1), rhs, s);
            let rhs = r * (1.0 - 1.0 / qm) * nv[n];
            rep.record(index, Inequality::SystemSigma, n, n + 1, ctx.vector_norm(&sv, n + 1), rhs, s);
        }
    }
    rep
}

/// Sequential run over all samples of the plan.
pub fn check_norm_inequalities(ctx: &NagumoContext, q: Complex64, plan: &SamplePlan) -> NormReport {
    (0..plan.count).fold(NormReport::empty(), |acc, i| acc.merge(check_sample(ctx, q, plan, i)))
}

/// `||sigma_q 1||_{n+1} / ||1||_n`, which equals `r(1 - 1/|q|)` exactly.
pub fn sigma_tightness(ctx: &NagumoContext, n: usize) -> f64 {
    let one = [Complex64::new(1.0, 0.0)];
    ctx.norm(&one, n + 1) / ctx.norm(&one, n)
}
