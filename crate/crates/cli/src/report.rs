//! Serializable forms of the core reports.

use qflow_core::growth::{
    Axis, ConfluenceReport, Constants, DisciplineCheck, GevreyFit, SpaceKind, SpaceVerdict, Stabilization,
};
use qflow_core::nagumo::{NormReport, Tally, Violation};
use qflow_core::solver::{CrossCheck, Diagnostics, SolvePath};
use serde::Serialize;

pub fn path_name(p: SolvePath) -> &'static str {
    match p {
        SolvePath::XMajor => "x-major",
        SolvePath::EMajor => "e-major",
    }
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsDoc {
    pub path: &'static str,
    pub ring: &'static str,
    pub q: String,
    pub nx: usize,
    pub ne: usize,
    pub working_nx: usize,
    pub working_ne: usize,
    pub reduced_dim: usize,
    pub newton_iterations: usize,
}

impl DiagnosticsDoc {
    pub fn new(d: &Diagnostics, ring: &'static str, q: String) -> Self {
        DiagnosticsDoc {
            path: path_name(d.path),
            ring,
            q,
            nx: d.nx,
            ne: d.ne,
            working_nx: d.working_nx,
            working_ne: d.working_ne,
            reduced_dim: d.reduced_dim,
            newton_iterations: d.newton_iterations,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CrossCheckDoc {
    pub agree: bool,
    pub max_discrepancy: f64,
    pub first_mismatch: Option<(usize, usize, usize)>,
}

impl From<&CrossCheck> for CrossCheckDoc {
    fn from(c: &CrossCheck) -> Self {
        CrossCheckDoc { agree: c.agree, max_discrepancy: c.max_discrepancy, first_mismatch: c.first_mismatch }
    }
}

#[derive(Debug, Serialize)]
pub struct ConstantsDoc {
    pub c: f64,
    pub a: f64,
    pub ln_c: f64,
    pub ln_a: f64,
}

impl From<&Constants> for ConstantsDoc {
    fn from(k: &Constants) -> Self {
        ConstantsDoc { c: k.c(), a: k.a(), ln_c: k.ln_c, ln_a: k.ln_a }
    }
}

#[derive(Debug, Serialize)]
pub struct WindowDoc {
    pub end: usize,
    pub constants: ConstantsDoc,
}

#[derive(Debug, Serialize)]
pub struct StabilizationDoc {
    pub windows: Vec<WindowDoc>,
    pub drift: f64,
    pub stable: bool,
}

impl From<&Stabilization> for StabilizationDoc {
    fn from(s: &Stabilization) -> Self {
        StabilizationDoc {
            windows: s.windows.iter().map(|(end, c)| WindowDoc { end: *end, constants: c.into() }).collect(),
            drift: s.drift,
            stable: s.stable,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FitDoc {
    pub s: f64,
    pub log_a: f64,
    pub log_c: f64,
    pub residual: f64,
    pub used: usize,
    pub masked: Vec<usize>,
}

impl From<&GevreyFit> for FitDoc {
    fn from(f: &GevreyFit) -> Self {
        FitDoc { s: f.s, log_a: f.log_a, log_c: f.log_c, residual: f.residual, used: f.used, masked: f.masked.clone() }
    }
}

#[derive(Debug, Serialize)]
pub struct SpaceDoc {
    pub space: String,
    pub constants: Option<ConstantsDoc>,
    pub stabilization: StabilizationDoc,
    pub curve: Vec<(f64, f64)>,
    pub consistent: bool,
}

pub fn space_name(k: SpaceKind) -> String {
    match k {
        SpaceKind::OZero => "o0".into(),
        SpaceKind::Monomial { p, alpha } => format!("monomial:{p},{alpha}"),
    }
}

impl From<&SpaceVerdict> for SpaceDoc {
    fn from(v: &SpaceVerdict) -> Self {
        SpaceDoc {
            space: space_name(v.kind),
            constants: v.constants.as_ref().map(Into::into),
            stabilization: (&v.stabilization).into(),
            curve: v.curve.clone(),
            consistent: v.consistent,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SliceDoc {
    pub index: usize,
    pub radius: f64,
    pub ln_sup: f64,
    pub ln_template: f64,
}

#[derive(Debug, Serialize)]
pub struct DisciplineDoc {
    pub axis: &'static str,
    pub slices: Vec<SliceDoc>,
    pub stabilization: StabilizationDoc,
    pub fit: Option<FitDoc>,
}

impl From<&DisciplineCheck> for DisciplineDoc {
    fn from(d: &DisciplineCheck) -> Self {
        DisciplineDoc {
            axis: match d.axis {
                Axis::X => "x",
                Axis::E => "eps",
            },
            slices: d
                .slices
                .iter()
                .zip(&d.ln_template)
                .map(|(s, t)| SliceDoc { index: s.index, radius: s.radius, ln_sup: s.ln_sup, ln_template: *t })
                .collect(),
            stabilization: (&d.stabilization).into(),
            fit: d.fit.as_ref().map(Into::into),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TallyDoc {
    pub inequality: &'static str,
    pub checked: usize,
    pub violations: usize,
    pub worst_ratio: f64,
}

impl From<&Tally> for TallyDoc {
    fn from(t: &Tally) -> Self {
        TallyDoc { inequality: t.inequality.name(), checked: t.checked, violations: t.violations, worst_ratio: t.worst_ratio }
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationDoc {
    pub sample: usize,
    pub inequality: &'static str,
    pub n: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl From<&Violation> for ViolationDoc {
    fn from(v: &Violation) -> Self {
        ViolationDoc { sample: v.sample, inequality: v.inequality.name(), n: v.n, m: v.m, lhs: v.lhs, rhs: v.rhs }
    }
}

#[derive(Debug, Serialize)]
pub struct TightnessDoc {
    pub n: usize,
    pub ratio: f64,
    pub expected: f64,
    pub error: f64,
}

#[derive(Debug, Serialize)]
pub struct ClassicalGapDoc {
    pub degree: usize,
    pub n: usize,
    pub q_norm: f64,
    pub classical_norm: f64,
    pub relative_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct NormsDoc {
    pub q: (f64, f64),
    pub r: f64,
    pub samples: usize,
    pub max_degree: usize,
    pub max_index: usize,
    pub seed: u64,
    pub slack: f64,
    pub total_violations: usize,
    pub tallies: Vec<TallyDoc>,
    pub violations: Vec<ViolationDoc>,
    pub tightness: Vec<TightnessDoc>,
    pub classical_limit: Option<Vec<ClassicalGapDoc>>,
}

/// At most this many violations are listed in a report.
pub const VIOLATIONS_LISTED: usize = 50;

impl NormsDoc {
    pub fn tallies(r: &NormReport) -> (Vec<TallyDoc>, Vec<ViolationDoc>) {
        (r.tallies.iter().map(Into::into).collect(), r.violations.iter().take(VIOLATIONS_LISTED).map(Into::into).collect())
    }
}

#[derive(Debug, Serialize)]
pub struct ConfluenceRowDoc {
    pub q: String,
    pub max_deviation: f64,
    pub bracket_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct ConfluenceDoc {
    pub example: String,
    pub window: (usize, usize),
    pub rows: Vec<ConfluenceRowDoc>,
    pub converging: Option<bool>,
    pub limit_diagonal: Vec<String>,
    pub limit_discipline: StabilizationDoc,
}

impl From<&ConfluenceReport> for ConfluenceDoc {
    fn from(r: &ConfluenceReport) -> Self {
        let w = r.limit.nx().min(r.limit.ne());
        ConfluenceDoc {
            example: r.example.to_string(),
            window: (r.limit.nx(), r.limit.ne()),
            rows: r
                .rows
                .iter()
                .map(|row| ConfluenceRowDoc {
                    q: row.q.to_string(),
                    max_deviation: row.max_deviation,
                    bracket_deviation: row.bracket_deviation,
                })
                .collect(),
            converging: r.converging,
            limit_diagonal: (0..=w).map(|n| r.limit.at(n, n, 0).to_string()).collect(),
            limit_discipline: (&r.limit_discipline).into(),
        }
    }
}
