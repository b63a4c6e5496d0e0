//! Formal power-series solutions of singularly perturbed q-difference
//! equations
//!
//! ```text
//! eps^alpha x^{p+1} d_q y = F(x, eps, y)      (p >= -1)
//! eps^alpha x^p sigma_q y = F(x, eps, y)      (p >= 0)
//! ```
//!
//! together with the q-calculus primitives they are built from, the
//! q-Nagumo norm calculus, and q-Gevrey growth analytics for the computed
//! coefficient tables.
//!
//! The crate is `no_std` and needs only `alloc`. Exact arithmetic is
//! available over the rationals, the Gaussian rationals, and polynomials in
//! a symbolic `q`; approximate arithmetic runs over `Complex64`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod growth;
pub mod ladder;
pub mod linalg;
pub mod nagumo;
pub mod qcalc;
pub mod qpoly;
pub mod registry;
pub mod ring;
pub mod scaled;
pub mod series;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::Mat;
pub use qcalc::{QMode, QValue};
pub use qpoly::QPoly;
pub use ring::{GaussRat, Ring};
pub use scaled::Scaled;
pub use series::{FData, MatSeries1, MatrixSeries2, NonlinearTerm, Series1, Series2};
