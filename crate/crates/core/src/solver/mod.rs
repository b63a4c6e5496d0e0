//! Constructive solution of
//! `eps^alpha x^{p+1} d_q y = F(x, eps, y)` and `eps^alpha x^p sigma_q y = F(x, eps, y)`.
//!
//! Both solution paths share the same preparation: an ε-adic (or x-adic)
//! Newton step for the initial slice, recentering, and rank reduction to
//! `alpha = 1`. They then fill the coefficient table either along `x`
//! (slices `y_n(eps)`) or along `eps` (slices `u_m(x)`).

mod majorant;
mod newton;
mod recenter;
mod recurrence;
mod reduce;

use core::cmp::Ordering;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::series::{FData, Series1, Series2};

pub use majorant::{majorant_certificate, CertificateOptions, MChoice, MajorantCertificate};
pub use newton::{solve_initial_e, solve_initial_x};
pub use recenter::{recenter, recenter_e, recenter_x};
pub use recurrence::{cross_check, solve_classical_limit, solve_e_major, solve_x_major, CrossCheck, CROSS_CHECK_TOLERANCE};
pub use reduce::{rank_reduce, RankReduced};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Dq,
    SigmaQ,
}

/// The full problem: operator, exponents, `q`, and the data of `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationSpec<R> {
    pub operator: Operator,
    pub p: i32,
    pub alpha: u32,
    pub q: R,
    pub f: FData<R>,
}

impl<R: Ring> EquationSpec<R> {
    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn nx(&self) -> usize {
        self.f.b.nx()
    }

    pub fn ne(&self) -> usize {
        self.f.b.ne()
    }

    /// Same equation with the data of `F` zero-padded or cropped.
    pub fn resized(&self, nx: usize, ne: usize) -> Self {
        EquationSpec { f: self.f.resized(nx, ne), ..self.clone() }
    }

    /// Checks every standing hypothesis and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(true)
    }

    /// As [`validate`](Self::validate), optionally skipping `|q| > 1`
    /// (used for the `q = 1` reference tables of the confluence study).
    pub fn validate_with(&self, check_q: bool) -> Result<()> {
        let mut errors: Vec<String> = Vec::new();
        if self.p < -1 {
            errors.push(alloc::format!("p must be at least -1, got {}", self.p));
        }
        if self.p == -1 && self.operator == Operator::SigmaQ {
            errors.push(String::from("p=-1 requires d_q operator"));
        }
        if self.alpha == 0 {
            errors.push(String::from("alpha must be at least 1"));
        }
        if check_q && matches!(self.q.cmp_unit_modulus(), Some(Ordering::Less | Ordering::Equal)) {
            errors.push(alloc::format!("|q| must exceed 1, got q = {}", self.q));
        }
        let n = self.dim();
        if n == 0 {
            errors.push(String::from("dimension must be at least 1"));
        }
        let (nx, ne) = (self.nx(), self.ne());
        if self.f.a.dim() != n {
            errors.push(alloc::format!("A has dimension {}, b has {}", self.f.a.dim(), n));
        } else if (self.f.a.nx(), self.f.a.ne()) != (nx, ne) {
            errors.push(String::from("A and b have different truncation orders"));
        } else if n > 0 && self.f.a.get(0, 0).inverse().is_none() {
            errors.push(String::from("DF_y(0,0,0) not invertible"));
        }
        for (k, t) in self.f.nonlinear.iter().enumerate() {
            if t.index.len() != n {
                errors.push(alloc::format!("nonlinear term {k}: multi-index has length {}, expected {n}", t.index.len()));
            }
            if t.index.iter().sum::<u32>() < 2 {
                errors.push(alloc::format!("nonlinear term {k}: |I| must be at least 2"));
            }
            if t.coeff.dim() != n {
                errors.push(alloc::format!("nonlinear term {k}: coefficient has dimension {}, expected {n}", t.coeff.dim()));
            }
            if (t.coeff.nx(), t.coeff.ne()) != (nx, ne) {
                errors.push(alloc::format!("nonlinear term {k}: truncation orders differ from b"));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(errors))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolvePath {
    XMajor,
    EMajor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub path: SolvePath,
    pub nx: usize,
    pub ne: usize,
    pub working_nx: usize,
    pub working_ne: usize,
    pub reduced_dim: usize,
    pub newton_iterations: usize,
}

/// Coefficients `a[n][m]` of the formal solution; `y0`/`u0` are its
/// `x^0` and `eps^0` slices.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<R> {
    pub table: Series2<R>,
    pub y0: Series1<R>,
    pub u0: Series1<R>,
    pub diagnostics: Diagnostics,
}

/// `x^s d_q u` for a series in `x`, as far as it is determined by `u`.
pub(crate) fn x_pow_dq<R: Ring>(u: &Series1<R>, s: usize, q: &R) -> Result<Series1<R>> {
    let d = u.dq(q)?;
    let order = d.order() + s;
    let order = order.min(u.order());
    Ok(Series1::from_fn(u.dim(), order, |k, c| if k >= s { d.get(k - s, c).clone() } else { R::zero() }))
}

/// `x^s sigma_q u`.
pub(crate) fn x_pow_sigma<R: Ring>(u: &Series1<R>, s: usize, q: &R) -> Series1<R> {
    u.sigmaq(q).shift_up(s)
}

/// The left-hand operator without its `eps^alpha` factor:
/// `x^{p+1} d_q s` or `x^p sigma_q s`, applied along `x`.
pub(crate) fn lhs_operator<R: Ring>(spec: &EquationSpec<R>, s: &Series2<R>) -> Result<Series2<R>> {
    match spec.operator {
        Operator::Dq => {
            let d = s.dq_x(&spec.q)?;
            let shift = (spec.p + 1) as usize;
            let nx = (d.nx() + shift).min(s.nx());
            Ok(Series2::from_fn(s.dim(), nx, s.ne(), |n, m, c| {
                if n >= shift {
                    d.at(n - shift, m, c).clone()
                } else {
                    R::zero()
                }
            }))
        }
        Operator::SigmaQ => Ok(s.sigmaq_x(&spec.q).shifted(spec.p as usize, 0)),
    }
}
