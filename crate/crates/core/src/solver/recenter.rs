use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{lhs_operator, EquationSpec};
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::series::{monomial_power, FData, NonlinearTerm, Series1, Series2};

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Every `J <= I` componentwise.
fn sub_indices(index: &[u32]) -> Vec<Vec<u32>> {
    let mut out = alloc::vec![Vec::new()];
    for &i in index {
        let mut next = Vec::new();
        for prefix in &out {
            for j in 0..=i {
                let mut v = prefix.clone();
                v.push(j);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// The equation satisfied by `y - s` when `y` solves `spec`:
/// `F'(y) = F(y + s) - eps^alpha L(s)`, re-expanded exactly.
///
/// With `p = -1` the operator lowers the `x` order by one and the result
/// is cropped accordingly.
pub fn recenter<R: Ring>(spec: &EquationSpec<R>, s: &Series2<R>) -> Result<EquationSpec<R>> {
    let dim = spec.dim();
    if s.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
    }
    let (nx, ne) = (spec.nx(), spec.ne());
    let s = s.resized(nx, ne);
    let f = &spec.f;

    let mut b = f.b.add(&f.a.mul_vec(&s)?)?;
    let mut a = f.a.clone();
    let mut nonlinear: BTreeMap<Vec<u32>, Series2<R>> = BTreeMap::new();
    let mut powers = alloc::vec![Vec::new(); dim];

    for term in &f.nonlinear {
        for j in sub_indices(&term.index) {
            let rest: Vec<u32> = term.index.iter().zip(&j).map(|(i, j)| i - j).collect();
            let weight: BigInt = term.index.iter().zip(&j).map(|(&i, &j)| binomial(i, j)).product();
            let w = R::from_rational(&BigRational::from_integer(weight));
            let contribution = monomial_power(&mut powers, &s, &rest)?.mul(&term.coeff)?.scale(&w);
            match j.iter().sum::<u32>() {
                0 => b.add_assign_overlap(&contribution),
                1 => {
                    let l = j.iter().position(|&x| x == 1).expect("unit index");
                    for n in 0..=nx {
                        for m in 0..=ne {
                            let col = contribution.get(n, m);
                            let mat = a.get_mut(n, m);
                            for (r, v) in col.iter().enumerate() {
                                *mat.get_mut(r, l) += v;
                            }
                        }
                    }
                }
                _ => {
                    nonlinear
                        .entry(j)
                        .and_modify(|c| c.add_assign_overlap(&contribution))
                        .or_insert(contribution);
                }
            }
        }
    }

    let correction = lhs_operator(spec, &s)?.shifted(0, spec.alpha as usize);
    let nx_out = correction.nx().min(nx);
    b = b.resized(nx_out, ne).sub(&correction.resized(nx_out, ne))?;

    let out = FData {
        b,
        a,
        nonlinear: nonlinear
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(index, coeff)| NonlinearTerm { index, coeff })
            .collect(),
    };
    Ok(EquationSpec { f: out.resized(nx_out, ne), ..spec.clone() })
}

/// Recenters at an `x`-independent slice `y0(eps)`.
pub fn recenter_x<R: Ring>(spec: &EquationSpec<R>, y0: &Series1<R>) -> Result<EquationSpec<R>> {
    let s = Series2::from_fn(spec.dim(), spec.nx(), spec.ne(), |n, m, c| {
        if n == 0 && m <= y0.order() {
            y0.get(m, c).clone()
        } else {
            R::zero()
        }
    });
    recenter(spec, &s)
}

/// Recenters at an `eps`-independent slice `u0(x)`.
pub fn recenter_e<R: Ring>(spec: &EquationSpec<R>, u0: &Series1<R>) -> Result<EquationSpec<R>> {
    let s = Series2::from_fn(spec.dim(), spec.nx(), spec.ne(), |n, m, c| {
        if m == 0 && n <= u0.order() {
            u0.get(n, c).clone()
        } else {
            R::zero()
        }
    });
    recenter(spec, &s)
}
