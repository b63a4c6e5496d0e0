//! The JSON equation document and its conversion to a typed spec.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use qflow_core::solver::{EquationSpec, Operator};
use qflow_core::{FData, GaussRat, Mat, MatrixSeries2, NonlinearTerm, QPoly, Ring, Series2};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub operator: String,
    pub p: i32,
    pub alpha: u32,
    #[serde(rename = "N")]
    pub dim: usize,
    pub q: QDoc,
    pub truncation: Truncation,
    #[serde(rename = "F")]
    pub f: FDoc,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct QDoc {
    /// `symbolic`, `rational`, `gaussian`, or `float`.
    pub mode: String,
    #[serde(default)]
    pub value: Value,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub nx: usize,
    pub ne: usize,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FDoc {
    #[serde(default)]
    pub b: Vec<(usize, usize, Vec<Value>)>,
    #[serde(default, rename = "A")]
    pub a: Vec<(usize, usize, Vec<Vec<Value>>)>,
    #[serde(default)]
    pub nonlinear: Vec<NonlinearDoc>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearDoc {
    #[serde(rename = "I")]
    pub index: Vec<u32>,
    pub terms: Vec<(usize, usize, Vec<Value>)>,
}

/// Parses a JSON document, reporting schema errors with their field path.
pub fn parse_document(text: &str) -> CliResult<SpecDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Validation(format!("{}: {}", e.path(), e.inner())))
}

/// Coefficient types that can be read from JSON entries.
pub trait JsonRing: Ring {
    fn from_json(v: &Value) -> Result<Self, String>;
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Ok(r);
    }
    BigInt::from_str(s).map(BigRational::from_integer).map_err(|_| format!("not a rational number: {s:?}"))
}

fn exact_number(v: &Value) -> Option<Result<BigRational, String>> {
    match v {
        Value::Number(n) => Some(match n.as_i64() {
            Some(i) => Ok(BigRational::from_integer(i.into())),
            None => Err(format!("exact rings take integers or fraction strings, got {n}")),
        }),
        Value::String(s) => parse_rational(s).ok().map(Ok),
        Value::Array(a) if a.len() == 2 && a.iter().all(|x| x.is_i64()) => {
            let (n, d) = (a[0].as_i64().unwrap_or(0), a[1].as_i64().unwrap_or(1));
            Some(if d == 0 { Err("zero denominator".to_string()) } else { Ok(BigRational::new(n.into(), d.into())) })
        }
        _ => None,
    }
}

impl JsonRing for BigRational {
    fn from_json(v: &Value) -> Result<Self, String> {
        exact_number(v).unwrap_or_else(|| Err(format!("expected a rational number, got {v}")))
    }
}

impl JsonRing for GaussRat {
    fn from_json(v: &Value) -> Result<Self, String> {
        if let Some(r) = exact_number(v) {
            return r.map(|x| GaussRat::new(x, BigRational::zero()));
        }
        match v {
            Value::String(s) => GaussRat::from_str(s).map_err(|e| format!("bad Gaussian rational {s:?}: {e}")),
            Value::Array(a) if a.len() == 2 => Ok(GaussRat::new(BigRational::from_json(&a[0])?, BigRational::from_json(&a[1])?)),
            _ => Err(format!("expected a Gaussian rational, got {v}")),
        }
    }
}

impl JsonRing for QPoly {
    fn from_json(v: &Value) -> Result<Self, String> {
        if let Some(r) = exact_number(v) {
            return r.map(QPoly::constant);
        }
        match v {
            Value::String(s) => QPoly::from_str(s),
            _ => Err(format!("expected a polynomial in q, got {v}")),
        }
    }
}

impl JsonRing for Complex64 {
    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n.as_f64().map(|x| Complex64::new(x, 0.0)).ok_or_else(|| format!("bad number {n}")),
            Value::Array(a) if a.len() == 2 && a.iter().all(|x| x.is_number()) => {
                Ok(Complex64::new(a[0].as_f64().unwrap_or(0.0), a[1].as_f64().unwrap_or(0.0)))
            }
            Value::String(s) => parse_rational(s).map(|r| Complex64::from_rational(&r)),
            _ => Err(format!("expected a number or [re, im], got {v}")),
        }
    }
}

/// Which coefficient ring a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingChoice {
    Exact,
    Float,
}

/// A spec over whichever ring its `q` calls for.
#[derive(Clone, Debug)]
pub enum AnySpec {
    Symbolic(EquationSpec<QPoly>),
    Rational(EquationSpec<BigRational>),
    Gaussian(EquationSpec<GaussRat>),
    Float(EquationSpec<Complex64>),
}

/// The value of `q` named by a document, before a ring is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum QChoice {
    Symbolic,
    Rational(BigRational),
    Gaussian(GaussRat),
    Float(Complex64),
}

impl QChoice {
    /// Parses a command-line `--q`: `symbolic`, `3/2`, `1+2i`, `1.5`, or `re,im`.
    pub fn parse_flag(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if s == "symbolic" {
            return Ok(QChoice::Symbolic);
        }
        if let Ok(r) = parse_rational(s) {
            return Ok(QChoice::Rational(r));
        }
        if let Ok(g) = GaussRat::from_str(s) {
            return Ok(QChoice::Gaussian(g));
        }
        if let Some((re, im)) = s.split_once(',') {
            if let (Ok(a), Ok(b)) = (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
                return Ok(QChoice::Float(Complex64::new(a, b)));
            }
        }
        s.parse::<f64>()
            .map(|x| QChoice::Float(Complex64::new(x, 0.0)))
            .map_err(|_| CliError::Validation(format!("cannot read q from {s:?}")))
    }

    fn from_doc(q: &QDoc) -> Result<Self, String> {
        match q.mode.as_str() {
            "symbolic" => Ok(QChoice::Symbolic),
            "rational" => BigRational::from_json(&q.value).map(QChoice::Rational),
            "gaussian" => GaussRat::from_json(&q.value).map(QChoice::Gaussian),
            "float" | "approx" => Complex64::from_json(&q.value).map(QChoice::Float),
            other => Err(format!("unknown mode {other:?}")),
        }
    }

    /// Numeric value, if `q` is not symbolic.
    pub fn point(&self) -> Option<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        match self {
            QChoice::Symbolic => None,
            QChoice::Rational(r) => Some(r.scaled_at(z).to_complex()),
            QChoice::Gaussian(g) => Some(g.scaled_at(z).to_complex()),
            QChoice::Float(c) => Some(*c),
        }
    }
}

fn entry<R: JsonRing>(v: &Value, path: &str, errors: &mut Vec<String>) -> R {
    R::from_json(v).unwrap_or_else(|e| {
        errors.push(format!("{path}: {e}"));
        R::zero()
    })
}

fn vector_series<R: JsonRing>(
    entries: &[(usize, usize, Vec<Value>)],
    path: &str,
    dim: usize,
    nx: usize,
    ne: usize,
    errors: &mut Vec<String>,
) -> Series2<R> {
    let mut s: Series2<R> = Series2::zeros(dim, nx, ne);
    for (k, (n, m, v)) in entries.iter().enumerate() {
        let here = format!("{path}[{k}]");
        if *n > nx || *m > ne {
            errors.push(format!("{here}: index ({n},{m}) outside truncation {nx}x{ne}"));
            continue;
        }
        if v.len() != dim {
            errors.push(format!("{here}: vector has length {}, expected N = {dim}", v.len()));
            continue;
        }
        for (c, x) in v.iter().enumerate() {
            let val: R = entry(x, &format!("{here}[2][{c}]"), errors);
            let cur = s.at(*n, *m, c).clone() + &val;
            s.set(*n, *m, c, cur);
        }
    }
    s
}

impl SpecDocument {
    pub fn q_choice(&self) -> CliResult<QChoice> {
        QChoice::from_doc(&self.q).map_err(|e| CliError::Validation(format!("q: {e}")))
    }

    fn build<R: JsonRing>(&self, q: R, nx: usize, ne: usize) -> CliResult<EquationSpec<R>> {
        let mut errors = Vec::new();
        let operator = match self.operator.as_str() {
            "dq" => Operator::Dq,
            "sigmaq" => Operator::SigmaQ,
            other => {
                errors.push(format!("operator: expected \"dq\" or \"sigmaq\", got {other:?}"));
                Operator::Dq
            }
        };
        let dim = self.dim;
        if dim == 0 {
            return Err(CliError::Validation("N: must be at least 1".into()));
        }
        let b = vector_series::<R>(&self.f.b, "F.b", dim, nx, ne, &mut errors);
        let mut a = MatrixSeries2::zeros(dim, nx, ne);
        for (k, (n, m, rows)) in self.f.a.iter().enumerate() {
            let here = format!("F.A[{k}]");
            if *n > nx || *m > ne {
                errors.push(format!("{here}: index ({n},{m}) outside truncation {nx}x{ne}"));
                continue;
            }
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                errors.push(format!("{here}: matrix must be {dim}x{dim}"));
                continue;
            }
            let mut mat = Mat::zeros(dim);
            for (i, row) in rows.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    mat.set(i, j, entry(x, &format!("{here}[2][{i}][{j}]"), &mut errors));
                }
            }
            let cur = a.get(*n, *m).add(&mat);
            *a.get_mut(*n, *m) = cur;
        }
        let mut nonlinear = Vec::new();
        for (k, t) in self.f.nonlinear.iter().enumerate() {
            let path = format!("F.nonlinear[{k}]");
            if t.index.len() != dim {
                errors.push(format!("{path}.I: multi-index has length {}, expected N = {dim}", t.index.len()));
                continue;
            }
            let coeff = vector_series::<R>(&t.terms, &format!("{path}.terms"), dim, nx, ne, &mut errors);
            nonlinear.push(NonlinearTerm { index: t.index.clone(), coeff });
        }
        if !errors.is_empty() {
            return Err(CliError::Validation(errors.join("; ")));
        }
        let spec = EquationSpec { operator, p: self.p, alpha: self.alpha, q, f: FData { b, a, nonlinear } };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the typed spec on the document window, or on `window` when given.
    pub fn to_spec(&self, ring: RingChoice, window: Option<(usize, usize)>) -> CliResult<AnySpec> {
        let (nx, ne) = window.unwrap_or((self.truncation.nx, self.truncation.ne));
        let (nx, ne) = (nx.max(self.truncation.nx), ne.max(self.truncation.ne));
        let q = self.q_choice()?;
        Ok(match (ring, q) {
            (RingChoice::Exact, QChoice::Symbolic) => AnySpec::Symbolic(self.build(QPoly::q(), nx, ne)?),
            (RingChoice::Exact, QChoice::Rational(r)) => AnySpec::Rational(self.build(r, nx, ne)?),
            (RingChoice::Exact, QChoice::Gaussian(g)) => AnySpec::Gaussian(self.build(g, nx, ne)?),
            (RingChoice::Exact, QChoice::Float(_)) => {
                return Err(CliError::Validation("q: a float q needs --ring float".into()));
            }
            (RingChoice::Float, QChoice::Symbolic) => {
                return Err(CliError::Validation("q: symbolic q needs --ring exact".into()));
            }
            (RingChoice::Float, q) => AnySpec::Float(self.build(q.point().unwrap_or_default(), nx, ne)?),
        })
    }
}
