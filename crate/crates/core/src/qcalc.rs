//! q-analogues: brackets, factorials, Gaussian binomials, Pochhammer
//! symbols, and the operators `d_q` and `sigma_q` on truncated series.

use core::cmp::Ordering;

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qpoly::QPoly;
use crate::ring::{GaussRat, Ring};
use crate::series::Series1;

/// How `q` is held: as a symbol, exactly at a point, or approximately.
#[derive(Clone, Debug, PartialEq)]
pub enum QValue {
    Symbolic,
    Rational(BigRational),
    Gaussian(GaussRat),
    Approx(Complex64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QMode {
    Symbolic,
    ExactAtPoint,
    Approximate,
}

impl QValue {
    pub fn rational(q: BigRational) -> Result<Self> {
        check_modulus(&q)?;
        Ok(QValue::Rational(q))
    }

    pub fn gaussian(q: GaussRat) -> Result<Self> {
        check_modulus(&q)?;
        Ok(QValue::Gaussian(q))
    }

    pub fn approx(q: Complex64) -> Result<Self> {
        check_modulus(&q)?;
        Ok(QValue::Approx(q))
    }

    pub fn mode(&self) -> QMode {
        match self {
            QValue::Symbolic => QMode::Symbolic,
            QValue::Rational(_) | QValue::Gaussian(_) => QMode::ExactAtPoint,
            QValue::Approx(_) => QMode::Approximate,
        }
    }

    pub fn point(&self) -> Option<Complex64> {
        match self {
            QValue::Symbolic => None,
            QValue::Rational(r) => Some(r.scaled_at(Complex64::zero()).to_complex()),
            QValue::Gaussian(g) => Some(g.scaled_at(Complex64::zero()).to_complex()),
            QValue::Approx(z) => Some(*z),
        }
    }

    pub fn modulus(&self) -> Option<f64> {
        self.point().map(|z| z.norm())
    }
}

fn check_modulus<R: Ring>(q: &R) -> Result<()> {
    match q.cmp_unit_modulus() {
        Some(Ordering::Greater) | None => Ok(()),
        _ => Err(Error::InvalidArgument(alloc::format!("|q| must exceed 1, got {q}"))),
    }
}

/// `[n]_q = 1 + q + ... + q^{n-1}`.
pub fn bracket<R: Ring>(n: u32, q: &R) -> R {
    let mut acc = R::zero();
    let mut qk = R::one();
    for _ in 0..n {
        acc += &qk;
        qk = qk * q;
    }
    acc
}

/// `[n]!_q = [1]_q ... [n]_q`.
pub fn factorial<R: Ring>(n: u32, q: &R) -> R {
    let mut acc = R::one();
    let mut b = R::zero();
    let mut qk = R::one();
    for _ in 0..n {
        b += &qk;
        qk = qk * q;
        acc = acc * &b;
    }
    acc
}

/// `[hi]!_q / [lo]!_q = [lo+1]_q ... [hi]_q`, computed without division.
pub fn factorial_ratio<R: Ring>(hi: u32, lo: u32, q: &R) -> R {
    let mut acc = R::one();
    for k in lo + 1..=hi {
        acc = acc * &bracket(k, q);
    }
    acc
}

/// The Gaussian binomial `[n choose j]_q` as a polynomial, by the q-Pascal rule.
pub fn q_binomial(n: i64, j: i64) -> Result<QPoly> {
    if j < 0 || j > n {
        return Err(Error::InvalidArgument(alloc::format!("binomial index j={j} outside 0..={n}")));
    }
    let (n, j) = (n as usize, j as usize);
    let mut row = alloc::vec![QPoly::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut c = QPoly::zero();
            if i >= 1 {
                c += &row[i - 1];
            }
            if i < m {
                c += &row[i].shift(i as u32);
            }
            next.push(c);
        }
        row = next;
    }
    Ok(row.swap_remove(j))
}

/// `(a;q)_n = prod_{j<n} (1 - a q^j)`.
pub fn pochhammer<R: Ring>(a: &R, q: &R, n: u32) -> R {
    let mut acc = R::one();
    let mut aq = a.clone();
    for _ in 0..n {
        acc = acc * &(R::one() - &aq);
        aq = aq * q;
    }
    acc
}

/// `(a;q^{-1})_inf` truncated where the geometric tail `|a||q|^{-J}` drops below `tol`.
///
/// Returns the product and the last index `J` that was included.
pub fn pochhammer_inf(a: Complex64, q: Complex64, tol: f64) -> Result<(Complex64, u32)> {
    if q.norm() <= 1.0 {
        return Err(Error::InvalidArgument(String::from("|q| must exceed 1")));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(String::from("tolerance must be positive")));
    }
    let qinv = q.inv();
    let mut term = a;
    let mut acc = Complex64::one();
    let mut j = 0u32;
    loop {
        acc *= Complex64::one() - term;
        if term.norm() < tol {
            return Ok((acc, j));
        }
        term *= qinv;
        j += 1;
    }
}

pub fn apply_dq<R: Ring>(f: &Series1<R>, q: &R) -> Result<Series1<R>> {
    f.dq(q)
}

pub fn apply_sigmaq<R: Ring>(f: &Series1<R>, q: &R) -> Series1<R> {
    f.sigmaq(q)
}

/// `ln [n]_t` for real `t > 1`, stable for large `n`.
pub fn ln_bracket(n: u32, t: f64) -> f64 {
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    let lt = libm::log(t);
    if nf * lt < 40.0 {
        libm::log(libm::expm1(nf * lt)) - libm::log(libm::expm1(lt))
    } else {
        nf * lt + libm::log1p(-libm::exp(-nf * lt)) - libm::log(libm::expm1(lt))
    }
}

/// `ln [n]!_t` for real `t > 1`.
pub fn ln_factorial(n: u32, t: f64) -> f64 {
    (1..=n).map(|k| ln_bracket(k, t)).sum()
}

/// `ln n!`.
pub fn ln_classical_factorial(n: u32) -> f64 {
    (2..=n).map(|k| libm::log(k as f64)).sum()
}
