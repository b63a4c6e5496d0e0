//! Complex numbers with a separate binary exponent.
//!
//! Coefficients such as `[60]!_2` or `2^{900}` overflow `f64`; growth
//! analysis only needs their logarithms and relative phases, which this
//! representation keeps intact.

use core::cmp::Ordering;
use core::f64::consts::LN_2;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// A complex number `mant * 2^exp2` with `max(|re|, |im|)` of `mant` in `[0.5, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    mant: Complex64,
    exp2: i64,
}

/// Terms more than this many binary orders below the larger summand are dropped.
const ALIGN_LIMIT: i64 = 64;

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mant: Complex64 { re: 0.0, im: 0.0 },
        exp2: 0,
    };

    pub const ONE: Scaled = Scaled {
        mant: Complex64 { re: 0.5, im: 0.0 },
        exp2: 1,
    };

    pub fn new(mant: Complex64, exp2: i64) -> Self {
        let m = libm::fmax(libm::fabs(mant.re), libm::fabs(mant.im));
        if m == 0.0 || !m.is_finite() {
            if m == 0.0 {
                return Self::ZERO;
            }
            return Scaled { mant, exp2 };
        }
        let (_, e) = libm::frexp(m);
        Scaled {
            mant: Complex64::new(libm::ldexp(mant.re, -e), libm::ldexp(mant.im, -e)),
            exp2: exp2 + e as i64,
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let bits = v.bits();
        let shift = bits.saturating_sub(60);
        let top = (v.magnitude() >> shift).to_f64().unwrap_or(0.0);
        let signed = if v.sign() == Sign::Minus { -top } else { top };
        Self::new(Complex64::new(signed, 0.0), shift as i64)
    }

    pub fn from_rational(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::ZERO;
        }
        Self::from_bigint(r.numer()).div(Self::from_bigint(r.denom()))
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn mul(self, o: Scaled) -> Scaled {
        if self.is_zero() || o.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.mant * o.mant, self.exp2 + o.exp2)
    }

    pub fn div(self, o: Scaled) -> Scaled {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.mant / o.mant, self.exp2 - o.exp2)
    }

    pub fn add(self, o: Scaled) -> Scaled {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.exp2 >= o.exp2 { (self, o) } else { (o, self) };
        let d = big.exp2 - small.exp2;
        if d > ALIGN_LIMIT {
            return big;
        }
        let s = Complex64::new(
            libm::ldexp(small.mant.re, -(d as i32)),
            libm::ldexp(small.mant.im, -(d as i32)),
        );
        Self::new(big.mant + s, big.exp2)
    }

    pub fn neg(self) -> Scaled {
        Scaled { mant: -self.mant, exp2: self.exp2 }
    }

    pub fn sub(self, o: Scaled) -> Scaled {
        self.add(o.neg())
    }

    pub fn scale_f64(self, x: f64) -> Scaled {
        self.mul(Self::from_f64(x))
    }

    pub fn powi(self, e: u32) -> Scaled {
        let mut base = self;
        let mut acc = Self::ONE;
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    /// `ln |z|`, or `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        libm::log(libm::hypot(self.mant.re, self.mant.im)) + self.exp2 as f64 * LN_2
    }

    /// Lossy conversion; overflows to infinity and underflows to zero.
    pub fn to_complex(&self) -> Complex64 {
        let e = self.exp2.clamp(-2000, 2000) as i32;
        Complex64::new(libm::ldexp(self.mant.re, e), libm::ldexp(self.mant.im, e))
    }

    pub fn abs_f64(&self) -> f64 {
        let z = self.to_complex();
        libm::hypot(z.re, z.im)
    }

    pub fn cmp_abs(&self, o: &Scaled) -> Ordering {
        self.ln_abs().partial_cmp(&o.ln_abs()).unwrap_or(Ordering::Equal)
    }
}

/// Evaluates `sum c_k z^k` by Horner's rule in extended range.
pub fn horner(coeffs: &[Scaled], z: Scaled) -> Scaled {
    let mut acc = Scaled::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(*c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_ordinary_values() {
        for &x in &[1.0, -3.5, 1e-300, 7e250, 0.125] {
            let s = Scaled::from_f64(x);
            assert!((s.to_complex().re - x).abs() <= x.abs() * 1e-15);
        }
        assert!(Scaled::from_f64(0.0).is_zero());
    }

    #[test]
    fn huge_rationals_keep_their_logarithm() {
        let big = BigInt::from(2).pow(5000u32);
        let r = BigRational::new(big * 3, BigInt::from(7));
        let expected = 5000.0 * LN_2 + libm::log(3.0 / 7.0);
        assert!((Scaled::from_rational(&r).ln_abs() - expected).abs() < 1e-9);
    }

    #[test]
    fn arithmetic_matches_f64_in_range() {
        let a = Scaled::from_complex(Complex64::new(1.5, -2.0));
        let b = Scaled::from_complex(Complex64::new(-0.25, 4.0));
        let za = Complex64::new(1.5, -2.0);
        let zb = Complex64::new(-0.25, 4.0);
        assert!((a.mul(b).to_complex() - za * zb).norm() < 1e-14);
        assert!((a.add(b).to_complex() - (za + zb)).norm() < 1e-14);
        assert!((a.div(b).to_complex() - za / zb).norm() < 1e-14);
        assert!((a.powi(5).to_complex() - za.powi(5)).norm() < 1e-11);
    }

    #[test]
    fn horner_evaluates_polynomials() {
        let c: alloc::vec::Vec<Scaled> = [1.0, 2.0, 3.0].iter().map(|&x| Scaled::from_f64(x)).collect();
        let v = horner(&c, Scaled::from_f64(2.0)).to_complex().re;
        assert_eq!(v, 17.0);
    }
}
