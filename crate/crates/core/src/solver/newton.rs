use alloc::vec::Vec;

use num_complex::Complex64;

use super::{EquationSpec, Operator};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::ring::Ring;
use crate::series::{MatSeries1, Series1};

/// `F` restricted to one coordinate axis: `b(t) + A(t) y + sum_I A_I(t) y^I`.
pub(crate) struct AxisSystem<R> {
    pub b: Series1<R>,
    pub a: MatSeries1<R>,
    pub terms: Vec<(Vec<u32>, Series1<R>)>,
}

fn scalar_power<R: Ring>(cache: &mut Vec<Vec<Series1<R>>>, y: &Series1<R>, l: usize, k: u32) -> Series1<R> {
    let list = &mut cache[l];
    while list.len() <= k as usize {
        let next = match list.last() {
            Some(prev) => prev.mul_scalar(&y.component(l)),
            None => {
                let mut one = Series1::zeros(1, y.order());
                one.set(0, 0, R::one());
                one
            }
        };
        list.push(next);
    }
    list[k as usize].clone()
}

fn monomial<R: Ring>(cache: &mut Vec<Vec<Series1<R>>>, y: &Series1<R>, index: &[u32]) -> Series1<R> {
    let mut acc = scalar_power(cache, y, 0, 0);
    for (l, &k) in index.iter().enumerate() {
        if k > 0 {
            acc = acc.mul_scalar(&scalar_power(cache, y, l, k));
        }
    }
    acc
}

impl<R: Ring> AxisSystem<R> {
    fn residual(&self, y: &Series1<R>) -> Series1<R> {
        let mut r = self.b.add(&self.a.mul_vec(y));
        let mut cache = alloc::vec![Vec::new(); y.dim()];
        for (index, coeff) in &self.terms {
            let m = monomial(&mut cache, y, index);
            r.add_assign(&m.mul_scalar(coeff));
        }
        r
    }

    fn jacobian(&self, y: &Series1<R>) -> MatSeries1<R> {
        let dim = y.dim();
        let order = y.order();
        let mut j = self.a.resized(order);
        let mut cache = alloc::vec![Vec::new(); dim];
        for (index, coeff) in &self.terms {
            for l in 0..dim {
                if index[l] == 0 {
                    continue;
                }
                let mut reduced = index.clone();
                reduced[l] -= 1;
                let factor = monomial(&mut cache, y, &reduced).scale(&R::from_int(index[l] as i64));
                let col = factor.mul_scalar(coeff);
                for k in 0..=order.min(col.order()) {
                    let m = j.coeff_mut(k);
                    for r in 0..dim {
                        *m.get_mut(r, l) += col.get(k, r);
                    }
                }
            }
        }
        j
    }

    fn scale(&self) -> f64 {
        self.b
            .coeffs()
            .iter()
            .map(|c| c.scaled_at(Complex64::new(0.0, 0.0)).abs_f64())
            .fold(1.0, f64::max)
    }

    /// Formal Newton iteration `y <- y - J(y)^{-1} Phi(y)` from `y = 0`.
    pub fn newton(&self) -> Result<(Series1<R>, usize)> {
        let dim = self.b.dim();
        let order = self.b.order();
        let scale = if R::EXACT { 1.0 } else { self.scale() };
        let mut y = Series1::zeros(dim, order);
        let mut previous: Option<usize> = None;
        for iteration in 0..64 {
            let r = self.residual(&y);
            let Some(v) = r.valuation(scale) else {
                return Ok((y, iteration));
            };
            if previous.is_some_and(|p| v <= p) {
                return Err(Error::ImplicitStepStalled { valuation: v });
            }
            previous = Some(v);
            let delta = self.jacobian(&y).solve(&r)?;
            y = y.sub(&delta);
        }
        Err(Error::ImplicitStepStalled { valuation: previous.unwrap_or(0) })
    }
}

/// The `x^0` part of the equation as a system in `eps`.
///
/// For `sigma_q` with `p = 0` the left side does not vanish at `x = 0`;
/// it contributes `-eps^alpha y` to the Jacobian.
pub(crate) fn x_axis<R: Ring>(spec: &EquationSpec<R>) -> AxisSystem<R> {
    let f = &spec.f;
    let mut a = f.a.slice_x(0);
    if spec.operator == Operator::SigmaQ && spec.p == 0 {
        let k = spec.alpha as usize;
        if k <= a.order() {
            let m = a.coeff(k).sub(&Mat::identity(spec.dim()));
            *a.coeff_mut(k) = m;
        }
    }
    AxisSystem {
        b: f.b.slice_x(0).expect("x^0 slice exists"),
        a,
        terms: f
            .nonlinear
            .iter()
            .map(|t| (t.index.clone(), t.coeff.slice_x(0).expect("x^0 slice exists")))
            .collect(),
    }
}

/// `F(x, 0, .)` as a system in `x`.
pub(crate) fn e_axis<R: Ring>(spec: &EquationSpec<R>) -> AxisSystem<R> {
    let f = &spec.f;
    AxisSystem {
        b: f.b.slice_e(0).expect("eps^0 slice exists"),
        a: f.a.slice_e(0),
        terms: f
            .nonlinear
            .iter()
            .map(|t| (t.index.clone(), t.coeff.slice_e(0).expect("eps^0 slice exists")))
            .collect(),
    }
}

/// `y_0(eps)`, the `x^0` slice of the solution, to order `ne` of the spec.
pub fn solve_initial_x<R: Ring>(spec: &EquationSpec<R>) -> Result<Series1<R>> {
    spec.validate_with(false)?;
    if spec.p == -1 {
        return Err(Error::Unsupported(alloc::string::String::from(
            "for p=-1 the x^0 slice is coupled to x^1; use the eps-major path",
        )));
    }
    Ok(x_axis(spec).newton()?.0)
}

/// `u_0(x)` solving `F(x, 0, u_0(x)) = 0`; requires `alpha = 1`.
pub fn solve_initial_e<R: Ring>(spec: &EquationSpec<R>) -> Result<Series1<R>> {
    spec.validate_with(false)?;
    if spec.alpha != 1 {
        return Err(Error::InvalidArgument(alloc::string::String::from(
            "the eps^0 slice is defined after rank reduction (alpha = 1)",
        )));
    }
    Ok(e_axis(spec).newton()?.0)
}
