//! Polynomials in the symbol `q` with rational coefficients.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use core::str::FromStr;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::scaled::Scaled;

/// Sparse polynomial `sum c_k q^k`; zero coefficients are never stored,
/// so structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    terms: BTreeMap<u32, BigRational>,
}

const DENSE_THRESHOLD: f64 = 0.5;

impl QPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = QPoly::default();
        p.add_term(0, c);
        p
    }

    pub fn monomial(c: BigRational, k: u32) -> Self {
        let mut p = QPoly::default();
        p.add_term(k, c);
        p
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn from_coeffs(coeffs: &[BigRational]) -> Self {
        let mut p = QPoly::default();
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(k as u32, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, k: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn coeff(&self, k: u32) -> BigRational {
        self.terms.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return QPoly::default();
        }
        QPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v.clone() * c)).collect(),
        }
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: u32) -> Self {
        QPoly {
            terms: self.terms.iter().map(|(&k, v)| (k + s, v.clone())).collect(),
        }
    }

    /// `P(q) -> P(q^k)`.
    pub fn compose_power(&self, k: u32) -> Self {
        QPoly {
            terms: self.terms.iter().map(|(&e, v)| (e * k, v.clone())).collect(),
        }
    }

    fn density(&self) -> f64 {
        match (self.low_degree(), self.degree()) {
            (Some(lo), Some(hi)) => self.terms.len() as f64 / (hi - lo + 1) as f64,
            _ => 0.0,
        }
    }

    fn to_dense(&self, lo: u32, hi: u32) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (&k, c) in &self.terms {
            v[(k - lo) as usize] = c.clone();
        }
        v
    }

    fn mul_poly(&self, o: &QPoly) -> QPoly {
        if self.terms.is_empty() || o.terms.is_empty() {
            return QPoly::default();
        }
        if self.density() > DENSE_THRESHOLD && o.density() > DENSE_THRESHOLD {
            let (alo, ahi) = (self.low_degree().unwrap(), self.degree().unwrap());
            let (blo, bhi) = (o.low_degree().unwrap(), o.degree().unwrap());
            let a = self.to_dense(alo, ahi);
            let b = o.to_dense(blo, bhi);
            let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    if !y.is_zero() {
                        out[i + j] += x.clone() * y;
                    }
                }
            }
            let mut p = QPoly::default();
            for (k, c) in out.into_iter().enumerate() {
                if !c.is_zero() {
                    p.terms.insert(alo + blo + k as u32, c);
                }
            }
            return p;
        }
        let mut p = QPoly::default();
        for (&i, x) in &self.terms {
            for (&j, y) in &o.terms {
                p.add_term(i + j, x.clone() * y);
            }
        }
        p
    }

    /// Exact quotient by `q - 1`; fails if `q = 1` is not a root.
    pub fn div_q_minus_one(&self) -> Result<QPoly> {
        let Some(deg) = self.degree() else {
            return Ok(QPoly::default());
        };
        let mut quotient = vec![BigRational::zero(); deg as usize];
        let mut carry = BigRational::zero();
        for k in (1..=deg).rev() {
            carry += self.coeff(k);
            quotient[(k - 1) as usize] = carry.clone();
        }
        carry += self.coeff(0);
        if !carry.is_zero() {
            return Err(Error::InexactDivision);
        }
        Ok(QPoly::from_coeffs(&quotient))
    }

    pub fn eval_scaled(&self, q: Scaled) -> Scaled {
        let mut acc = Scaled::ZERO;
        let mut power = Scaled::ONE;
        let mut at = 0u32;
        for (&k, c) in &self.terms {
            power = power.mul(q.powi(k - at));
            at = k;
            acc = acc.add(Scaled::from_rational(c).mul(power));
        }
        acc
    }

    pub fn eval<R: Ring>(&self, q: &R) -> R {
        let mut acc = R::zero();
        let mut power = R::one();
        let mut at = 0u32;
        for (&k, c) in &self.terms {
            power = power * &q.pow(k - at);
            at = k;
            acc += &(power.clone() * &R::from_rational(c));
        }
        acc
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses a single monomial such as `3/2*q^4`, `-q`, or `7`.
fn parse_monomial(term: &str) -> core::result::Result<(u32, BigRational), String> {
    let bad = || alloc::format!("bad term '{term}'");
    if let Some(pos) = term.find('q') {
        let head = term[..pos].trim_end_matches('*');
        let coef = match head {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            h => h.parse::<BigRational>().map_err(|_| bad())?,
        };
        let tail = &term[pos + 1..];
        let k = if tail.is_empty() {
            1
        } else {
            tail.strip_prefix('^').ok_or_else(bad)?.parse::<u32>().map_err(|_| bad())?
        };
        Ok((k, coef))
    } else {
        Ok((0, term.parse::<BigRational>().map_err(|_| bad())?))
    }
}

impl FromStr for QPoly {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(String::from("empty polynomial"));
        }
        let mut p = QPoly::default();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..=bytes.len() {
            let boundary = i == bytes.len()
                || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'*');
            if boundary {
                let (k, c) = parse_monomial(&compact[start..i])?;
                p.add_term(k, c);
                start = i;
            }
        }
        Ok(p)
    }
}

impl Zero for QPoly {
    fn zero() -> Self {
        QPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for QPoly {
    fn one() -> Self {
        QPoly::constant(BigRational::one())
    }
}

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly {
            terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

impl AddAssign<&QPoly> for QPoly {
    fn add_assign(&mut self, o: &QPoly) {
        for (&k, c) in &o.terms {
            self.add_term(k, c.clone());
        }
    }
}

impl SubAssign<&QPoly> for QPoly {
    fn sub_assign(&mut self, o: &QPoly) {
        for (&k, c) in &o.terms {
            self.add_term(k, -c.clone());
        }
    }
}

impl Add<&QPoly> for QPoly {
    type Output = QPoly;
    fn add(mut self, o: &QPoly) -> QPoly {
        self += o;
        self
    }
}

impl Add for QPoly {
    type Output = QPoly;
    fn add(self, o: QPoly) -> QPoly {
        self + &o
    }
}

impl Sub<&QPoly> for QPoly {
    type Output = QPoly;
    fn sub(mut self, o: &QPoly) -> QPoly {
        self -= o;
        self
    }
}

impl Mul<&QPoly> for QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        self.mul_poly(o)
    }
}

impl Mul for QPoly {
    type Output = QPoly;
    fn mul(self, o: QPoly) -> QPoly {
        self.mul_poly(&o)
    }
}

impl Ring for QPoly {
    const EXACT: bool = true;

    fn try_inv(&self) -> Option<Self> {
        if self.is_constant() && !self.is_zero() {
            Some(QPoly::constant(self.coeff(0).recip()))
        } else {
            None
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        QPoly::constant(r.clone())
    }

    fn cmp_unit_modulus(&self) -> Option<Ordering> {
        if self.is_constant() {
            Some(self.coeff(0).abs().cmp(&BigRational::one()))
        } else {
            None
        }
    }

    fn scaled_at(&self, q: Complex64) -> Scaled {
        self.eval_scaled(Scaled::from_complex(q))
    }

    fn mul_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }
}
