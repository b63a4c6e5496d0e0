//! The worked examples, each with a closed-form coefficient oracle.
//!
//! Oracles are written from the closed forms alone (q-brackets, Gaussian
//! binomials, explicit products) and never call the solver.

use core::fmt;
use core::str::FromStr;

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::qcalc::{bracket, factorial, factorial_ratio, q_binomial};
use crate::ring::Ring;
use crate::series::{FData, MatrixSeries2, Series2};
use crate::solver::{EquationSpec, Operator, SolvePath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleId {
    /// `eps x^2 d_q y = x - y`, the q-Euler series.
    EulerQ,
    /// `eps x sigma_q y = y - x`.
    GeomQ,
    /// `eps^alpha sigma_q y = (1 - x) y - 1`.
    Heine,
    /// `eps^alpha x d_q y = y - sum_{n>=1} x^n`.
    DqP0,
    /// `eps x sigma_q y = y - x - eps x^2`.
    SigmaShift,
    /// `eps x^2 sigma_q y = y - x`.
    SigmaX2,
    /// `eps x^2 d_q y = y - sum_{n>=1} x^n`.
    DqP1Geom,
    /// `eps x^2 d_q y = (1 + x) y - x eps`.
    DqP1Pm,
    /// `eps^alpha d_q y = y - 1/(1 - x)`.
    DqPMinus1,
    /// `eps sigma_q y = y - 1/(1 - x)`, whose solution is `sum q^{nm} x^n eps^m`.
    ModelM,
}

impl ExampleId {
    pub const ALL: [ExampleId; 10] = [
        ExampleId::EulerQ,
        ExampleId::GeomQ,
        ExampleId::Heine,
        ExampleId::DqP0,
        ExampleId::SigmaShift,
        ExampleId::SigmaX2,
        ExampleId::DqP1Geom,
        ExampleId::DqP1Pm,
        ExampleId::DqPMinus1,
        ExampleId::ModelM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::EulerQ => "euler-q",
            ExampleId::GeomQ => "geom-q",
            ExampleId::Heine => "heine",
            ExampleId::DqP0 => "dq-p0",
            ExampleId::SigmaShift => "sigma-shift",
            ExampleId::SigmaX2 => "sigma-x2",
            ExampleId::DqP1Geom => "dq-p1-geom",
            ExampleId::DqP1Pm => "dq-p1-pm",
            ExampleId::DqPMinus1 => "dq-pminus1",
            ExampleId::ModelM => "model-M",
        }
    }

    /// Whether `alpha > 1` is meaningful for this example.
    pub fn takes_alpha(self) -> bool {
        matches!(self, ExampleId::Heine | ExampleId::DqP0 | ExampleId::DqPMinus1)
    }

    /// `p = -1` is only solvable along `eps`.
    pub fn path(self) -> SolvePath {
        match self {
            ExampleId::DqPMinus1 => SolvePath::EMajor,
            _ => SolvePath::XMajor,
        }
    }

    pub fn operator(self) -> Operator {
        match self {
            ExampleId::GeomQ | ExampleId::Heine | ExampleId::SigmaShift | ExampleId::SigmaX2 | ExampleId::ModelM => {
                Operator::SigmaQ
            }
            _ => Operator::Dq,
        }
    }

    pub fn p(self) -> i32 {
        match self {
            ExampleId::Heine | ExampleId::DqP0 | ExampleId::ModelM => 0,
            ExampleId::SigmaX2 => 2,
            ExampleId::DqPMinus1 => -1,
            _ => 1,
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("unknown example id {s:?}")))
    }
}

fn scalar_a<R: Ring>(nx: usize, ne: usize, f: impl Fn(usize, usize) -> i64) -> MatrixSeries2<R> {
    MatrixSeries2::from_fn(1, nx, ne, |n, m| Mat::scalar(1, R::from_int(f(n, m))))
}

fn scalar_b<R: Ring>(nx: usize, ne: usize, f: impl Fn(usize, usize) -> i64) -> Series2<R> {
    Series2::from_fn(1, nx, ne, |n, m, _| R::from_int(f(n, m)))
}

/// The equation of an example on an `nx x ne` data window.
///
/// Forcing terms that are infinite series are truncated to the window; for
/// `dq-pminus1` the window is widened by `ne` in `x` so that the table is
/// exact on the requested window.
pub fn build<R: Ring>(id: ExampleId, q: R, alpha: u32, nx: usize, ne: usize) -> Result<EquationSpec<R>> {
    if alpha == 0 || (alpha != 1 && !id.takes_alpha()) {
        return Err(Error::InvalidArgument(alloc::format!("{id} does not take alpha = {alpha}")));
    }
    let (fx, b, a) = match id {
        ExampleId::EulerQ => (nx, scalar_b(nx, ne, |n, m| (n == 1 && m == 0) as i64), scalar_a(nx, ne, |n, m| -((n == 0 && m == 0) as i64))),
        ExampleId::GeomQ | ExampleId::SigmaX2 => {
            (nx, scalar_b(nx, ne, |n, m| -((n == 1 && m == 0) as i64)), scalar_a(nx, ne, |n, m| (n == 0 && m == 0) as i64))
        }
        ExampleId::Heine => (
            nx,
            scalar_b(nx, ne, |n, m| -((n == 0 && m == 0) as i64)),
            scalar_a(nx, ne, |n, m| match (n, m) {
                (0, 0) => 1,
                (1, 0) => -1,
                _ => 0,
            }),
        ),
        ExampleId::DqP0 | ExampleId::DqP1Geom => {
            (nx, scalar_b(nx, ne, |n, m| -((n >= 1 && m == 0) as i64)), scalar_a(nx, ne, |n, m| (n == 0 && m == 0) as i64))
        }
        ExampleId::SigmaShift => (
            nx,
            scalar_b(nx, ne, |n, m| -(((n, m) == (1, 0) || (n, m) == (2, 1)) as i64)),
            scalar_a(nx, ne, |n, m| (n == 0 && m == 0) as i64),
        ),
        ExampleId::DqP1Pm => (
            nx,
            scalar_b(nx, ne, |n, m| -((n == 1 && m == 1) as i64)),
            scalar_a(nx, ne, |n, m| (m == 0 && n <= 1) as i64),
        ),
        ExampleId::DqPMinus1 => {
            let fx = nx + ne;
            (fx, scalar_b(fx, ne, |_, m| -((m == 0) as i64)), scalar_a(fx, ne, |n, m| (n == 0 && m == 0) as i64))
        }
        ExampleId::ModelM => {
            (nx, scalar_b(nx, ne, |_, m| -((m == 0) as i64)), scalar_a(nx, ne, |n, m| (n == 0 && m == 0) as i64))
        }
    };
    debug_assert_eq!(b.nx(), fx);
    let spec = EquationSpec {
        operator: id.operator(),
        p: id.p(),
        alpha: if id.takes_alpha() { alpha } else { 1 },
        q,
        f: FData { b, a, nonlinear: Vec::new() },
    };
    Ok(spec)
}

/// The closed-form value of `a_{n,m}`.
pub fn oracle<R: Ring>(id: ExampleId, q: &R, alpha: u32, n: usize, m: usize) -> R {
    let a = alpha as usize;
    let (nu, mu) = (n as u32, m as u32);
    match id {
        ExampleId::EulerQ => {
            if n == m + 1 {
                let f = factorial(mu, q);
                if m.is_multiple_of(2) {
                    f
                } else {
                    -f
                }
            } else {
                R::zero()
            }
        }
        ExampleId::GeomQ => {
            if n == m + 1 {
                q.pow(mu * (mu + 1) / 2)
            } else {
                R::zero()
            }
        }
        ExampleId::Heine => {
            if m.is_multiple_of(a) {
                let k = (m / a) as i64;
                q_binomial(n as i64 + k, k).map(|p| p.eval(q)).unwrap_or_else(|_| R::zero())
            } else {
                R::zero()
            }
        }
        ExampleId::DqP0 => {
            if n >= 1 && m.is_multiple_of(a) {
                bracket(nu, q).pow((m / a) as u32)
            } else {
                R::zero()
            }
        }
        ExampleId::SigmaShift => {
            // u_m = sum_j q^{j(j-1)/2} x^j f_{m-j}(q^j x), f_0 = x, f_1 = x^2
            let mut acc = R::zero();
            for j in 0..=m {
                let deg = match m - j {
                    0 => 1,
                    1 => 2,
                    _ => continue,
                };
                if n == j + deg {
                    let e = (j * (j.saturating_sub(1)) / 2 + j * deg) as u32;
                    acc += &q.pow(e);
                }
            }
            acc
        }
        ExampleId::SigmaX2 => {
            if n == 2 * m + 1 {
                q.pow(mu * mu)
            } else {
                R::zero()
            }
        }
        ExampleId::DqP1Geom => {
            if n > m {
                let k = nu - mu;
                factorial_ratio(k + mu - 1, k - 1, q)
            } else {
                R::zero()
            }
        }
        ExampleId::DqP1Pm => {
            // [eps^m] eps prod_{j<n} ([j] eps - 1)
            if n == 0 {
                return R::zero();
            }
            let mut poly = alloc::vec![R::zero(), R::one()];
            for j in 1..nu {
                let bj = bracket(j, q);
                let mut next = alloc::vec![R::zero(); poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k + 1] += &(c.clone() * &bj);
                    next[k] -= c;
                }
                poly = next;
            }
            poly.get(m).cloned().unwrap_or_else(R::zero)
        }
        ExampleId::DqPMinus1 => {
            if m.is_multiple_of(a) {
                factorial_ratio(nu + (m / a) as u32, nu, q)
            } else {
                R::zero()
            }
        }
        ExampleId::ModelM => q.pow(nu * mu),
    }
}

/// Result of comparing a table with an oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub example: ExampleId,
    pub checked: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<(usize, usize)>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Relative tolerance for float tables.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

fn agrees<R: Ring>(got: &R, want: &R) -> bool {
    if R::EXACT {
        return got == want;
    }
    let z = Complex64::new(0.0, 0.0);
    let (g, w) = (got.scaled_at(z), want.scaled_at(z));
    let diff = g.sub(w);
    if diff.is_zero() {
        return true;
    }
    if w.is_zero() {
        return diff.abs_f64() <= ORACLE_TOLERANCE;
    }
    diff.ln_abs() - w.ln_abs() <= libm::log(ORACLE_TOLERANCE)
}

/// Compares every entry of `table` with the oracle.
pub fn compare<R: Ring>(id: ExampleId, q: &R, alpha: u32, table: &Series2<R>) -> OracleReport {
    let mut checked = 0;
    let mut mismatches = 0;
    let mut first = None;
    for n in 0..=table.nx() {
        for m in 0..=table.ne() {
            checked += 1;
            if !agrees(table.at(n, m, 0), &oracle(id, q, alpha, n, m)) {
                mismatches += 1;
                first.get_or_insert((n, m));
            }
        }
    }
    OracleReport { example: id, checked, mismatches, first_mismatch: first }
}

/// Human-readable statement of the closed form checked by [`oracle`].
pub fn describe(id: ExampleId) -> String {
    String::from(match id {
        ExampleId::EulerQ => "a(n+1,n) = (-1)^n [n]!",
        ExampleId::GeomQ => "a(n+1,n) = q^(n(n+1)/2)",
        ExampleId::Heine => "a(n,alpha m) = [n+m choose m]",
        ExampleId::DqP0 => "a(n,alpha m) = [n]^m",
        ExampleId::SigmaShift => "u_m = sum_j q^(j(j-1)/2) x^j f_(m-j)(q^j x)",
        ExampleId::SigmaX2 => "a(2n+1,n) = q^(n^2)",
        ExampleId::DqP1Geom => "a(k+m,m) = [k][k+1]...[k+m-1]",
        ExampleId::DqP1Pm => "y_n = eps prod_(j<n) ([j] eps - 1)",
        ExampleId::DqPMinus1 => "a(n,alpha m) = [n+m]!/[n]!",
        ExampleId::ModelM => "a(n,m) = q^(nm)",
    })
}
