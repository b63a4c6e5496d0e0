//! The polynomials `P_m(x, q)` in the numerators of the `eps`-slices of
//! `eps x^2 d_q y = (1 + x) y - x eps`:
//!
//! ```text
//! u_m(x) = x^m P_m(x, q) / ((1+x)^m (1+qx)^{m-1} ... (1+q^{m-1}x))
//! P_{m+1} = q^m (1+x)^m x d_q P_m + (q^m (1+x)^m - (-qx;q)_m)/(q - 1) P_m
//! ```

use core::fmt;

use alloc::vec::Vec;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qcalc::bracket;
use crate::qpoly::QPoly;
use crate::series::Series2;

/// A polynomial in `x` with coefficients in `Q[q]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct XQPoly {
    coeffs: Vec<QPoly>,
}

impl XQPoly {
    pub fn from_coeffs(mut coeffs: Vec<QPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        XQPoly { coeffs }
    }

    pub fn constant(c: QPoly) -> Self {
        Self::from_coeffs(alloc::vec![c])
    }

    pub fn one() -> Self {
        Self::constant(QPoly::one())
    }

    /// `1 + c x`.
    pub fn linear(c: QPoly) -> Self {
        Self::from_coeffs(alloc::vec![QPoly::one(), c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^k`.
    pub fn coeff(&self, k: usize) -> QPoly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn degree_q(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(|c| c.degree()).max()
    }

    /// Number of monomials `c x^i q^j` with `c != 0`.
    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().map(|c| c.num_terms()).sum()
    }

    /// The monomial of largest `x` degree, then largest `q` degree.
    pub fn leading_term(&self) -> Option<(usize, u32, BigRational)> {
        let k = self.degree_x()?;
        let c = &self.coeffs[k];
        let d = c.degree()?;
        Some((k, d, c.coeff(d)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return XQPoly::default();
        }
        let mut out = alloc::vec![QPoly::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a.clone() * b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &QPoly) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(XQPoly::one(), |acc, _| acc.mul(self))
    }

    /// `d_q` in `x`: `x^k -> [k]_q x^{k-1}`.
    pub fn dq(&self) -> Self {
        let q = QPoly::q();
        Self::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * &bracket(k as u32, &q)).collect(),
        )
    }

    /// Multiplication by `x`.
    pub fn shift_x(&self) -> Self {
        if self.is_zero() {
            return XQPoly::default();
        }
        let mut coeffs = alloc::vec![QPoly::zero()];
        coeffs.extend(self.coeffs.iter().cloned());
        XQPoly { coeffs }
    }

    /// Exact coefficientwise division by `q - 1`.
    pub fn div_q_minus_one(&self) -> Result<Self> {
        Ok(Self::from_coeffs(self.coeffs.iter().map(|c| c.div_q_minus_one()).collect::<Result<_>>()?))
    }
}

impl fmt::Display for XQPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// `(-qx;q)_m = (1+qx)(1+q^2x)...(1+q^m x)`.
fn neg_qx_pochhammer(m: u32) -> XQPoly {
    (1..=m).fold(XQPoly::one(), |acc, j| acc.mul(&XQPoly::linear(QPoly::monomial(BigRational::one(), j))))
}

/// `P_1, ..., P_{m_max}`; entry `k` holds `P_{k+1}`.
pub fn pm_ladder(m_max: u32) -> Result<Vec<XQPoly>> {
    if m_max < 1 {
        return Err(Error::InvalidArgument(alloc::string::String::from("m_max must be at least 1")));
    }
    let one_plus_x = XQPoly::linear(QPoly::one());
    let mut out = alloc::vec![XQPoly::one()];
    for m in 1..m_max {
        let p = out.last().expect("nonempty");
        let qm = QPoly::monomial(BigRational::one(), m);
        let lead = one_plus_x.pow(m).scale(&qm);
        let ratio = lead.sub(&neg_qx_pochhammer(m)).div_q_minus_one()?;
        out.push(lead.mul(&p.dq().shift_x()).add(&ratio.mul(p)));
    }
    Ok(out)
}

/// `(1+x)^m (1+qx)^{m-1} ... (1+q^{m-1}x)`.
pub fn denominator(m: u32) -> XQPoly {
    (0..m).fold(XQPoly::one(), |acc, j| acc.mul(&XQPoly::linear(QPoly::monomial(BigRational::one(), j)).pow(m - j)))
}

/// Checks `u_m(x) D_m(x) = x^m P_m(x)` on the `x`-window of a solved table,
/// for every `1 <= m <= ladder.len()` inside the table. Returns the first
/// failing `(m, n)`.
pub fn cross_validate(ladder: &[XQPoly], table: &Series2<QPoly>) -> Option<(usize, usize)> {
    let nx = table.nx();
    for m in 1..=ladder.len().min(table.ne()) {
        let u = XQPoly::from_coeffs((0..=nx).map(|n| table.at(n, m, 0).clone()).collect());
        let lhs = u.mul(&denominator(m as u32));
        let p = &ladder[m - 1];
        for n in 0..=nx {
            let want = if n >= m { p.coeff(n - m) } else { QPoly::zero() };
            if lhs.coeff(n) != want {
                return Some((m, n));
            }
        }
    }
    None
}

/// `deg_x P_m = m(m-1)/2 - 1` for `m >= 2`.
pub fn expected_degree_x(m: u32) -> usize {
    (m * (m - 1) / 2 - 1) as usize
}

/// `deg_q P_m = (m-1)(m-2)(m+3)/6`.
pub fn expected_degree_q(m: u32) -> u32 {
    (m - 1) * (m - 2) * (m + 3) / 6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rungs() {
        let l = pm_ladder(3).unwrap();
        assert_eq!(l[0], XQPoly::one());
        assert_eq!(l[1], XQPoly::one());
        let p3: XQPoly = XQPoly::from_coeffs(alloc::vec![
            "q + 1".parse().unwrap(),
            "q".parse().unwrap(),
            "-q^2".parse().unwrap(),
        ]);
        assert_eq!(l[2], p3);
        assert_eq!(alloc::format!("{}", l[2]), "(-q^2)*x^2 + (q)*x + (q + 1)");
    }

    #[test]
    fn denominator_small() {
        // (1+x)^2 (1+qx)
        let d = denominator(2);
        assert_eq!(d.coeff(0), QPoly::one());
        assert_eq!(d.coeff(3), QPoly::q());
        assert_eq!(d.degree_x(), Some(3));
    }
}
