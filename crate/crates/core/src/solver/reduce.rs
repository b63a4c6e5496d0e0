use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::EquationSpec;
use crate::error::Result;
use crate::linalg::Mat;
use crate::ring::Ring;
use crate::series::{FData, MatrixSeries2, NonlinearTerm, Series2};

/// The `alpha = 1` system for `w = (y_0, ..., y_{alpha-1})` with
/// `y = sum_j y_j(x, eps^alpha) eps^j`, in the variable `eta = eps^alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankReduced<R> {
    pub spec: EquationSpec<R>,
    pub alpha: u32,
    pub original_dim: usize,
}

impl<R: Ring> RankReduced<R> {
    /// Position of `y_{j,l}` inside `w`.
    pub fn component(&self, j: usize, l: usize) -> usize {
        j * self.original_dim + l
    }

    /// `eps^{m}` corresponds to `eps^j eta^k` with `m = alpha k + j`.
    pub fn reindex(&self, m: usize) -> (usize, usize) {
        let a = self.alpha as usize;
        (m % a, m / a)
    }

    /// Folds a table in `(x, eta)` back to `(x, eps)`, keeping `eps` up to `ne`.
    pub fn fold(&self, w: &Series2<R>, ne: usize) -> Series2<R> {
        let a = self.alpha as usize;
        let n0 = self.original_dim;
        Series2::from_fn(n0, w.nx(), ne, |n, m, l| {
            let (j, k) = (m % a, m / a);
            if k <= w.ne() {
                w.at(n, k, j * n0 + l).clone()
            } else {
                R::zero()
            }
        })
    }
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return alloc::vec![alloc::vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(parts: &[u32]) -> BigInt {
    let mut acc = BigInt::one();
    let mut seen = 0u32;
    for &k in parts {
        for i in 1..=k {
            seen += 1;
            acc = acc * BigInt::from(seen) / BigInt::from(i);
        }
    }
    acc
}

/// Rewrites the system with `alpha = 1` and dimension `N alpha`.
///
/// The input must carry `eps` data up to at least `alpha (K + 1) - 1`; the
/// reduced system is truncated at `eta^K` with `K = (ne + 1) / alpha - 1`.
pub fn rank_reduce<R: Ring>(spec: &EquationSpec<R>) -> Result<RankReduced<R>> {
    spec.validate_with(false)?;
    let a = spec.alpha as usize;
    let n0 = spec.dim();
    if a == 1 {
        return Ok(RankReduced { spec: spec.clone(), alpha: 1, original_dim: n0 });
    }
    let nx = spec.nx();
    let k_max = (spec.ne() + 1) / a - 1;
    let dim = n0 * a;
    let f = &spec.f;

    let b = Series2::from_fn(dim, nx, k_max, |n, k, c| {
        let (j, l) = (c / n0, c % n0);
        f.b.at(n, a * k + j, l).clone()
    });

    let amat = MatrixSeries2::from_fn(dim, nx, k_max, |n, t| {
        let mut m = Mat::zeros(dim);
        for j in 0..a {
            for i in 0..a {
                let Some(e) = (a * t + j).checked_sub(i) else { continue };
                let src = f.a.get(n, e);
                for r in 0..n0 {
                    for s in 0..n0 {
                        m.set(j * n0 + r, i * n0 + s, src.get(r, s).clone());
                    }
                }
            }
        }
        m
    });

    let mut merged: BTreeMap<Vec<u32>, Series2<R>> = BTreeMap::new();
    for term in &f.nonlinear {
        let per_component: Vec<Vec<Vec<u32>>> = term.index.iter().map(|&i| compositions(i, a)).collect();
        let mut choice = alloc::vec![0usize; n0];
        loop {
            let mut index = alloc::vec![0u32; dim];
            let mut weight = BigInt::one();
            let mut shift = 0usize;
            for l in 0..n0 {
                let parts = &per_component[l][choice[l]];
                weight *= multinomial(parts);
                for (j, &k) in parts.iter().enumerate() {
                    index[j * n0 + l] = k;
                    shift += j * k as usize;
                }
            }
            let w = R::from_rational(&BigRational::from_integer(weight));
            let contribution = Series2::from_fn(dim, nx, k_max, |n, t, c| {
                let (j, l) = (c / n0, c % n0);
                match (a * t + j).checked_sub(shift) {
                    Some(e) => term.coeff.at(n, e, l).clone() * &w,
                    None => R::zero(),
                }
            });
            merged
                .entry(index)
                .and_modify(|s| s.add_assign_overlap(&contribution))
                .or_insert(contribution);

            let mut l = 0;
            loop {
                if l == n0 {
                    break;
                }
                choice[l] += 1;
                if choice[l] < per_component[l].len() {
                    break;
                }
                choice[l] = 0;
                l += 1;
            }
            if l == n0 {
                break;
            }
        }
    }
    let nonlinear = merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(index, coeff)| NonlinearTerm { index, coeff })
        .collect();

    Ok(RankReduced {
        spec: EquationSpec {
            operator: spec.operator,
            p: spec.p,
            alpha: 1,
            q: spec.q.clone(),
            f: FData { b, a: amat, nonlinear },
        },
        alpha: spec.alpha,
        original_dim: n0,
    })
}
