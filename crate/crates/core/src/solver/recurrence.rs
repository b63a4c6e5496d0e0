use alloc::vec::Vec;

use num_complex::Complex64;

use super::newton::{e_axis, x_axis};
use super::{
    rank_reduce, recenter_e, recenter_x, x_pow_dq, x_pow_sigma, Diagnostics, EquationSpec, Operator, SolvePath,
    SolveResult,
};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::ring::Ring;
use crate::series::{MatSeries1, Series1, Series2};

/// Incremental evaluation of the nonlinear part along the major index.
///
/// All unknown slices have zero constant part in the major variable, so
/// the coefficient of index `n` of `y^I` only involves slices `< n`.
/// Powers `y_l^k` and the partial products of every monomial are kept
/// as lists of slices and extended by one convolution step per index.
struct NonlinearCache<R> {
    powers: Vec<Vec<Vec<Series1<R>>>>,
    terms: Vec<TermCache<R>>,
    zero: Series1<R>,
}

struct TermCache<R> {
    coeff: Vec<Series1<R>>,
    factors: Vec<(usize, usize)>,
    partial: Vec<Vec<Series1<R>>>,
}

fn convolve_step<R: Ring>(left: &[Series1<R>], right: &[Series1<R>], n: usize, zero: &Series1<R>) -> Series1<R> {
    let mut acc = zero.clone();
    for i in 1..n {
        let (a, b) = (&left[i], &right[n - i]);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc.add_assign(&a.mul_scalar(b));
    }
    acc
}

impl<R: Ring> NonlinearCache<R> {
    fn new(dim: usize, minor_order: usize, terms: Vec<(Vec<u32>, Vec<Series1<R>>)>) -> Self {
        let zero = Series1::zeros(1, minor_order);
        let mut max_pow = alloc::vec![1usize; dim];
        for (index, _) in &terms {
            for (l, &k) in index.iter().enumerate() {
                max_pow[l] = max_pow[l].max(k as usize);
            }
        }
        let powers = max_pow.iter().map(|&k| alloc::vec![alloc::vec![zero.clone()]; k]).collect();
        let terms = terms
            .into_iter()
            .map(|(index, coeff)| {
                let factors: Vec<(usize, usize)> =
                    index.iter().enumerate().filter(|(_, &k)| k > 0).map(|(l, &k)| (l, k as usize)).collect();
                let partial = alloc::vec![alloc::vec![zero.clone()]; factors.len().saturating_sub(1)];
                TermCache { coeff, factors, partial }
            })
            .collect();
        NonlinearCache { powers, terms, zero }
    }

    /// Coefficient `n` of `sum_I A_I y^I`, given slices `0..n`.
    fn step(&mut self, n: usize, dim: usize) -> Series1<R> {
        for list in self.powers.iter_mut() {
            for k in 1..list.len() {
                let next = convolve_step(&list[0], &list[k - 1], n, &self.zero);
                list[k].push(next);
            }
        }
        let mut out = Series1::zeros(dim, self.zero.order());
        for term in self.terms.iter_mut() {
            let (l0, k0) = term.factors[0];
            for s in 1..term.factors.len() {
                let (ls, ks) = term.factors[s];
                let prev = if s == 1 { &self.powers[l0][k0 - 1] } else { &term.partial[s - 2] };
                let next = convolve_step(prev, &self.powers[ls][ks - 1], n, &self.zero);
                term.partial[s - 1].push(next);
            }
            let product = match term.partial.last() {
                Some(list) => list,
                None => &self.powers[l0][k0 - 1],
            };
            for i in 0..n {
                let p = &product[n - i];
                if p.is_zero() {
                    continue;
                }
                out.add_assign(&p.mul_scalar(&term.coeff[i]));
            }
        }
        out
    }

    fn push(&mut self, y: &Series1<R>) {
        for (l, list) in self.powers.iter_mut().enumerate() {
            list[0].push(y.component(l));
        }
    }
}

/// Fills slices `1..=major` of the unknown from
/// `lead(n) y_n = lhs(n) - b_n - sum_{j=1}^{n-1} A_{n-j} y_j - NL_n`.
#[allow(clippy::too_many_arguments)]
fn run_recurrence<R: Ring>(
    dim: usize,
    major: usize,
    minor_order: usize,
    b: &[Series1<R>],
    a: &[MatSeries1<R>],
    terms: Vec<(Vec<u32>, Vec<Series1<R>>)>,
    lead_inv: &mut dyn FnMut(usize) -> Result<MatSeries1<R>>,
    lhs: &mut dyn FnMut(usize, &[Series1<R>]) -> Result<Option<Series1<R>>>,
) -> Result<Vec<Series1<R>>> {
    let mut cache = NonlinearCache::new(dim, minor_order, terms);
    let mut ys = alloc::vec![Series1::zeros(dim, minor_order)];
    for n in 1..=major {
        let mut rhs = lhs(n, &ys)?.unwrap_or_else(|| Series1::zeros(dim, minor_order));
        rhs.sub_assign(&b[n]);
        for j in 1..n {
            if a[n - j].is_zero() {
                continue;
            }
            rhs.sub_assign(&a[n - j].mul_vec(&ys[j]));
        }
        rhs.sub_assign(&cache.step(n, dim));
        let y = lead_inv(n)?.mul_vec(&rhs);
        cache.push(&y);
        ys.push(y);
    }
    Ok(ys)
}

fn lambda<R: Ring>(op: Operator, k: usize, q: &R) -> R {
    match op {
        Operator::Dq => crate::qcalc::bracket(k as u32, q),
        Operator::SigmaQ => q.pow(k as u32),
    }
}

/// Number of `eta = eps^alpha` orders needed to cover `eps^ne`.
fn reduced_order(ne: usize, alpha: u32) -> (usize, usize) {
    let a = alpha as usize;
    let k = ne / a;
    (k, a * (k + 1) - 1)
}

/// Builds the table slice by slice in `x`: `y_n(eps)` for `n = 1..=nx`.
pub fn solve_x_major<R: Ring>(spec: &EquationSpec<R>, nx: usize, ne: usize) -> Result<SolveResult<R>> {
    x_major(spec, nx, ne, true)
}

fn x_major<R: Ring>(spec: &EquationSpec<R>, nx: usize, ne: usize, check_q: bool) -> Result<SolveResult<R>> {
    spec.validate_with(check_q)?;
    if spec.p == -1 {
        return Err(Error::Unsupported(alloc::string::String::from(
            "p=-1 is solved along eps only: the x^0 slice is coupled to x^1",
        )));
    }
    let (k_max, ne_w) = reduced_order(ne, spec.alpha);
    let work = spec.resized(nx, ne_w);
    let (y0, iterations) = x_axis(&work).newton()?;
    let shifted = recenter_x(&work, &y0)?;
    let reduced = rank_reduce(&shifted)?;
    let rs = &reduced.spec;
    let dim = rs.dim();
    let q = rs.q.clone();
    let p = rs.p as usize;
    let op = rs.operator;

    let b: Vec<Series1<R>> = (0..=nx).map(|n| rs.f.b.slice_x(n)).collect::<Result<_>>()?;
    let a: Vec<MatSeries1<R>> = (0..=nx).map(|n| rs.f.a.slice_x(n)).collect();
    let terms = rs
        .f
        .nonlinear
        .iter()
        .map(|t| Ok((t.index.clone(), (0..=nx).map(|n| t.coeff.slice_x(n)).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<Vec<_>>>()?;

    let a0 = a[0].clone();
    let fixed_inverse = if p > 0 { Some(a0.inverse()?) } else { None };
    let mut lead_inv = |n: usize| -> Result<MatSeries1<R>> {
        match &fixed_inverse {
            Some(inv) => Ok(inv.clone()),
            None => {
                let mut m = a0.clone();
                if m.order() >= 1 {
                    let shifted = m.coeff(1).sub(&Mat::scalar(dim, lambda(op, n, &q)));
                    *m.coeff_mut(1) = shifted;
                }
                m.inverse()
            }
        }
    };
    let q_lhs = rs.q.clone();
    let mut lhs = |n: usize, ys: &[Series1<R>]| -> Result<Option<Series1<R>>> {
        if p == 0 || n <= p {
            return Ok(None);
        }
        Ok(Some(ys[n - p].shift_up(1).scale(&lambda(op, n - p, &q_lhs))))
    };
    let ys = run_recurrence(dim, nx, k_max, &b, &a, terms, &mut lead_inv, &mut lhs)?;

    let w = Series2::from_x_slices(dim, k_max, &ys);
    let mut table = reduced.fold(&w, ne);
    for m in 0..=ne {
        for c in 0..spec.dim() {
            let v = table.at(0, m, c).clone() + y0.get(m, c);
            table.set(0, m, c, v);
        }
    }
    Ok(finish(table, SolvePath::XMajor, nx, ne, nx, ne_w, dim, iterations))
}

#[allow(clippy::too_many_arguments)]
fn finish<R: Ring>(
    table: Series2<R>,
    path: SolvePath,
    nx: usize,
    ne: usize,
    working_nx: usize,
    working_ne: usize,
    reduced_dim: usize,
    newton_iterations: usize,
) -> SolveResult<R> {
    SolveResult {
        y0: table.slice_x(0).expect("x^0 slice"),
        u0: table.slice_e(0).expect("eps^0 slice"),
        table,
        diagnostics: Diagnostics { path, nx, ne, working_nx, working_ne, reduced_dim, newton_iterations },
    }
}

/// Builds the table slice by slice in `eps`: `u_m(x)` for `m = 1..=ne`.
///
/// With `p = -1` every step loses one order in `x`, so the data is
/// extended internally and the result cropped back to `nx`.
pub fn solve_e_major<R: Ring>(spec: &EquationSpec<R>, nx: usize, ne: usize) -> Result<SolveResult<R>> {
    e_major(spec, nx, ne, true)
}

/// Solves with `|q| > 1` waived, for the classical `q = 1` limit of a
/// q-independent family.
pub fn solve_classical_limit<R: Ring>(spec: &EquationSpec<R>, nx: usize, ne: usize, path: SolvePath) -> Result<SolveResult<R>> {
    match path {
        SolvePath::XMajor => x_major(spec, nx, ne, false),
        SolvePath::EMajor => e_major(spec, nx, ne, false),
    }
}

fn e_major<R: Ring>(spec: &EquationSpec<R>, nx: usize, ne: usize, check_q: bool) -> Result<SolveResult<R>> {
    spec.validate_with(check_q)?;
    let alpha = spec.alpha as usize;
    let (k_max, ne_w) = reduced_order(ne, spec.alpha);
    let w_nx = if spec.p == -1 { nx + k_max + 2 } else { nx };
    let work = spec.resized(w_nx, ne_w);

    let head = x_axis(&work.resized(w_nx, alpha - 1));
    let (y_head, head_iterations) = head.newton()?;
    let shifted = recenter_x(&work, &y_head)?;
    let reduced = rank_reduce(&shifted)?;
    let g = &reduced.spec;
    if g.f.b.get(0, 0).iter().any(|c| !c.is_negligible(1.0)) {
        return Err(Error::ImplicitStepStalled { valuation: 0 });
    }
    let (u0, iterations) = e_axis(g).newton()?;
    let g2 = recenter_e(g, &u0)?;
    let dim = g2.dim();
    let minor = g2.nx();
    let p = g2.p;
    let q = g2.q.clone();
    let op = g2.operator;

    let b: Vec<Series1<R>> = (0..=k_max).map(|m| g2.f.b.slice_e(m)).collect::<Result<_>>()?;
    let a: Vec<MatSeries1<R>> = (0..=k_max).map(|m| g2.f.a.slice_e(m)).collect();
    let terms = g2
        .f
        .nonlinear
        .iter()
        .map(|t| Ok((t.index.clone(), (0..=k_max).map(|m| t.coeff.slice_e(m)).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<Vec<_>>>()?;
    let inv = a[0].inverse()?;
    let mut lead_inv = |_: usize| Ok(inv.clone());
    let mut lhs = |n: usize, us: &[Series1<R>]| -> Result<Option<Series1<R>>> {
        let prev = &us[n - 1];
        let l = match op {
            Operator::Dq => x_pow_dq(prev, (p + 1) as usize, &q)?,
            Operator::SigmaQ => x_pow_sigma(prev, p as usize, &q),
        };
        Ok(Some(l))
    };
    let us = run_recurrence(dim, k_max, minor, &b, &a, terms, &mut lead_inv, &mut lhs)?;
    if us.iter().any(|u| u.order() < nx) {
        return Err(Error::OrderExhausted);
    }
    let mut w = Series2::from_e_slices(dim, nx, &us);
    for n in 0..=nx.min(u0.order()) {
        for c in 0..dim {
            let v = w.at(n, 0, c).clone() + u0.get(n, c);
            w.set(n, 0, c, v);
        }
    }
    let mut table = reduced.fold(&w, ne);
    for m in 0..=y_head.order().min(ne) {
        for c in 0..spec.dim() {
            let v = table.at(0, m, c).clone() + y_head.get(m, c);
            table.set(0, m, c, v);
        }
    }
    Ok(finish(table, SolvePath::EMajor, nx, ne, w_nx, ne_w, dim, head_iterations + iterations))
}

/// Outcome of solving one spec along both paths.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheck {
    pub agree: bool,
    /// Largest relative discrepancy; zero for exact rings that agree.
    pub max_discrepancy: f64,
    pub first_mismatch: Option<(usize, usize, usize)>,
}

/// Relative tolerance for float rings.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-9;

/// Runs both solution paths and compares their tables on the full window.
pub fn cross_check<R: Ring>(spec: &EquationSpec<R>, nx: usize, ne: usize) -> Result<CrossCheck> {
    let x = solve_x_major(spec, nx, ne)?.table;
    let e = solve_e_major(spec, nx, ne)?.table;
    let mut worst = 0.0f64;
    let mut first = None;
    for n in 0..=nx {
        for m in 0..=ne {
            for c in 0..spec.dim() {
                let (u, v) = (x.at(n, m, c), e.at(n, m, c));
                let bad = if R::EXACT {
                    u != v
                } else {
                    let zero = Complex64::new(0.0, 0.0);
                    let (su, sv) = (u.scaled_at(zero), v.scaled_at(zero));
                    let diff = su.sub(sv);
                    let scale = if su.cmp_abs(&sv).is_ge() { su } else { sv };
                    let rel = if diff.is_zero() { 0.0 } else { libm::exp(diff.ln_abs() - scale.ln_abs()) };
                    worst = worst.max(rel);
                    rel > CROSS_CHECK_TOLERANCE
                };
                if bad && first.is_none() {
                    first = Some((n, m, c));
                }
            }
        }
    }
    Ok(CrossCheck { agree: first.is_none(), max_discrepancy: worst, first_mismatch: first })
}
