//! Coefficient domains for series arithmetic.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use core::str::FromStr;

use alloc::string::String;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scaled::Scaled;

/// A commutative ring with enough structure for the solvers.
///
/// Exact rings compare with `==`; floating rings override
/// [`Ring::is_negligible`] so that Newton steps and valuations see
/// round-off as zero.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    const EXACT: bool;

    fn try_inv(&self) -> Option<Self>;

    fn from_rational(r: &BigRational) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    /// Larger is a better pivot; zero means unusable.
    fn pivot_score(&self) -> f64 {
        if self.try_inv().is_some() {
            1.0
        } else {
            0.0
        }
    }

    /// How `|self|` compares with 1, when that is decidable.
    fn cmp_unit_modulus(&self) -> Option<Ordering>;

    /// Numeric value; `q` is substituted for the indeterminate of symbolic rings.
    fn scaled_at(&self, q: Complex64) -> Scaled;

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    fn mul_int(&self, k: i64) -> Self {
        self.clone() * &Self::from_int(k)
    }
}

impl Ring for BigRational {
    const EXACT: bool = true;

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn cmp_unit_modulus(&self) -> Option<Ordering> {
        Some(self.abs().cmp(&BigRational::one()))
    }

    fn scaled_at(&self, _q: Complex64) -> Scaled {
        Scaled::from_rational(self)
    }
}

/// Relative size below which a float coefficient counts as zero.
pub const FLOAT_NEGLIGIBLE: f64 = 1e-12;

impl Ring for Complex64 {
    const EXACT: bool = false;

    fn try_inv(&self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(self.inv())
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        Scaled::from_rational(r).to_complex()
    }

    fn pivot_score(&self) -> f64 {
        self.norm()
    }

    fn cmp_unit_modulus(&self) -> Option<Ordering> {
        self.norm().partial_cmp(&1.0)
    }

    fn scaled_at(&self, _q: Complex64) -> Scaled {
        Scaled::from_complex(*self)
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.norm() <= FLOAT_NEGLIGIBLE * libm::fmax(scale, 1.0)
    }
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn norm_sqr(&self) -> BigRational {
        self.re.clone() * &self.re + self.im.clone() * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for GaussRat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = s
            .strip_suffix('i')
            .ok_or_else(|| alloc::format!("gaussian rational must end in 'i': {s}"))?;
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| alloc::format!("missing imaginary part: {s}"))?;
        let re: BigRational = body[..split]
            .parse()
            .map_err(|_| alloc::format!("bad real part: {s}"))?;
        let im_abs: BigRational = body[split + 1..]
            .parse()
            .map_err(|_| alloc::format!("bad imaginary part: {s}"))?;
        let im = if body.as_bytes()[split] == b'-' { -im_abs } else { im_abs };
        Ok(GaussRat::new(re, im))
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::new(BigRational::one(), BigRational::zero())
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Add<&GaussRat> for GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(self.re + &o.re, self.im + &o.im)
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        self + &o
    }
}

impl Sub<&GaussRat> for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(self.re - &o.re, self.im - &o.im)
    }
}

impl Mul<&GaussRat> for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        let re = self.re.clone() * &o.re - self.im.clone() * &o.im;
        let im = self.re * &o.im + self.im * &o.re;
        GaussRat::new(re, im)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        self * &o
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl Ring for GaussRat {
    const EXACT: bool = true;

    fn try_inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(GaussRat::new(c.re / &n, c.im / &n))
    }

    fn from_rational(r: &BigRational) -> Self {
        GaussRat::new(r.clone(), BigRational::zero())
    }

    fn cmp_unit_modulus(&self) -> Option<Ordering> {
        Some(self.norm_sqr().cmp(&BigRational::one()))
    }

    fn scaled_at(&self, _q: Complex64) -> Scaled {
        let re = Scaled::from_rational(&self.re);
        let im = Scaled::from_rational(&self.im).mul(Scaled::from_complex(Complex64::new(0.0, 1.0)));
        re.add(im)
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
