//! The subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_rational::BigRational;
use qflow_core::growth::{
    classify_space, confluence_study, dyadic_q, fit_gevrey_ln, verify_theorem_bounds, GrowthOptions, LnTable, SpaceKind,
};
use qflow_core::ladder::{self, cross_validate, expected_degree_q, expected_degree_x};
use qflow_core::nagumo::{check_sample, sigma_tightness, NagumoContext, NormReport, SamplePlan};
use qflow_core::registry::{self, ExampleId};
use qflow_core::solver::{cross_check, solve_e_major, solve_x_major, EquationSpec, SolvePath, SolveResult};
use qflow_core::{QPoly, Ring};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    ConfluenceArgs, GrowthArgs, NormsArgs, PathArg, PmLadderArgs, ReproduceArgs, RingArg, SolveArgs, SpaceArg,
};
use crate::error::{CliError, CliResult};
use crate::output::{read_ln_table, table_csv, write_atomic, write_json, CsvValue};
use crate::report::{
    ClassicalGapDoc, ConfluenceDoc, CrossCheckDoc, DiagnosticsDoc, DisciplineDoc, FitDoc, NormsDoc,
    SpaceDoc, TightnessDoc,
};
use crate::spec_doc::{parse_document, AnySpec, QChoice, RingChoice};

/// Runs `$body` with `$v` bound to the value of `q` in its natural ring.
macro_rules! with_q {
    ($q:expr, |$v:ident| $body:expr) => {
        match $q {
            QChoice::Symbolic => {
                let $v = QPoly::q();
                $body
            }
            QChoice::Rational(r) => {
                let $v = r.clone();
                $body
            }
            QChoice::Gaussian(g) => {
                let $v = g.clone();
                $body
            }
            QChoice::Float(c) => {
                let $v = *c;
                $body
            }
        }
    };
}

fn solve_along<R: Ring>(spec: &EquationSpec<R>, path: SolvePath, nx: usize, ne: usize) -> CliResult<SolveResult<R>> {
    Ok(match path {
        SolvePath::XMajor => solve_x_major(spec, nx, ne)?,
        SolvePath::EMajor => solve_e_major(spec, nx, ne)?,
    })
}

/// `out.csv` becomes `out.<tag>.json`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    path.with_extension(format!("{tag}.json"))
}

pub fn solve(a: &SolveArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.spec).map_err(|e| CliError::Validation(format!("{}: {e}", a.spec.display())))?;
    let doc = parse_document(&text)?;
    let ring = match a.ring {
        RingArg::Exact => RingChoice::Exact,
        RingArg::Float => RingChoice::Float,
    };
    let (nx, ne) = a.window.unwrap_or((doc.truncation.nx, doc.truncation.ne));
    match doc.to_spec(ring, a.window)? {
        AnySpec::Symbolic(s) => solve_in(&s, a, "exact", nx, ne),
        AnySpec::Rational(s) => solve_in(&s, a, "exact", nx, ne),
        AnySpec::Gaussian(s) => solve_in(&s, a, "exact", nx, ne),
        AnySpec::Float(s) => solve_in(&s, a, "float", nx, ne),
    }
}

fn solve_in<R: CsvValue>(spec: &EquationSpec<R>, a: &SolveArgs, ring: &'static str, nx: usize, ne: usize) -> CliResult<()> {
    let path = match a.path {
        PathArg::Auto if spec.p < 0 => SolvePath::EMajor,
        PathArg::Auto | PathArg::X => SolvePath::XMajor,
        PathArg::E => SolvePath::EMajor,
    };
    let res = solve_along(spec, path, nx, ne)?;
    write_atomic(&a.output, &table_csv(&res.table)?)?;
    write_json(&sibling(&a.output, "diagnostics"), &DiagnosticsDoc::new(&res.diagnostics, ring, spec.q.to_string()))?;
    if a.both_paths {
        let cc = cross_check(spec, nx, ne)?;
        write_json(&sibling(&a.output, "cross_check"), &CrossCheckDoc::from(&cc))?;
        if !cc.agree {
            return Err(CliError::Mismatch(format!(
                "paths disagree at {:?} (relative discrepancy {})",
                cc.first_mismatch, cc.max_discrepancy
            )));
        }
    }
    Ok(())
}

pub fn reproduce(a: &ReproduceArgs) -> CliResult<()> {
    let q = QChoice::parse_flag(&a.q)?;
    if a.alpha != 1 && !a.example.takes_alpha() {
        return Err(CliError::Validation(format!("{} is defined for alpha = 1 only", a.example)));
    }
    let mut ok = with_q!(&q, |qv| reproduce_in(a, qv))?;
    if a.example == ExampleId::DqP1Pm && q == QChoice::Symbolic {
        ok &= ladder_check(a.max_order, a.max_order.min(6))?.passed;
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} disagrees with its closed form", a.example)))
    }
}

fn reproduce_in<R: CsvValue>(a: &ReproduceArgs, q: R) -> CliResult<bool> {
    let n = a.max_order;
    let spec = registry::build(a.example, q.clone(), a.alpha, n, n)?;
    let res = solve_along(&spec, a.example.path(), n, n)?;
    let rep = registry::compare(a.example, &q, a.alpha, &res.table);
    let verdict = if rep.passed() { "PASS" } else { "FAIL" };
    let first = rep.first_mismatch.map(|(n, m)| format!(" first=({n},{m})")).unwrap_or_default();
    println!(
        "{verdict} {} q={} alpha={} window={n}x{n} checked={} mismatches={}{first}: {}",
        a.example,
        q,
        a.alpha,
        rep.checked,
        rep.mismatches,
        registry::describe(a.example)
    );
    if let Some(path) = &a.table {
        write_atomic(path, &table_csv(&res.table)?)?;
    }
    Ok(rep.passed())
}

#[derive(Debug, Serialize)]
pub struct LadderCheck {
    pub window: (usize, usize),
    pub passed: bool,
    pub first_mismatch: Option<(usize, usize)>,
}

/// Compares `u_m D_m = x^m P_m` with the solved dq-p1-pm table at symbolic q.
fn ladder_check(nx: usize, ne: usize) -> CliResult<LadderCheck> {
    let ladder = ladder::pm_ladder(ne.max(1) as u32)?;
    let spec = registry::build(ExampleId::DqP1Pm, QPoly::q(), 1, nx, ne)?;
    let res = solve_e_major(&spec, nx, ne)?;
    let first = cross_validate(&ladder, &res.table);
    let verdict = if first.is_none() { "PASS" } else { "FAIL" };
    let at = first.map(|(m, n)| format!(" first=(m={m},n={n})")).unwrap_or_default();
    println!("{verdict} ladder cross-validation window={nx}x{ne}{at}");
    Ok(LadderCheck { window: (nx, ne), passed: first.is_none(), first_mismatch: first })
}

#[derive(Debug, Serialize)]
struct PolyDoc {
    m: u32,
    terms: usize,
    degree_x: Option<usize>,
    degree_q: Option<u32>,
    leading: Option<(usize, u32, String)>,
    text: String,
}

#[derive(Debug, Serialize)]
struct LadderDoc {
    m_max: u32,
    polynomials: Vec<PolyDoc>,
    degree_formulas_hold: bool,
    cross_validation: LadderCheck,
}

pub fn pm_ladder(a: &PmLadderArgs) -> CliResult<()> {
    if a.m_max < 2 {
        return Err(CliError::Validation(format!("--m-max must be at least 2, got {}", a.m_max)));
    }
    let ladder = ladder::pm_ladder(a.m_max)?;
    let mut polys = Vec::new();
    let mut degrees_ok = true;
    for m in 2..=a.m_max {
        let p = &ladder[m as usize - 1];
        let leading = p.leading_term().map(|(i, j, c)| (i, j, c.to_string()));
        let ok = p.degree_x() == Some(expected_degree_x(m)) && p.degree_q() == Some(expected_degree_q(m));
        degrees_ok &= ok;
        let lead = leading.as_ref().map(|(i, j, c)| format!("{c}*x^{i}*q^{j}")).unwrap_or_else(|| "0".into());
        println!(
            "P_{m}: terms={} deg_x={} deg_q={} leading={lead} degrees={}",
            p.num_terms(),
            p.degree_x().map_or(-1, |d| d as i64),
            p.degree_q().map_or(-1, i64::from),
            if ok { "ok" } else { "MISMATCH" }
        );
        if a.full {
            println!("P_{m} = {p}");
        }
        polys.push(PolyDoc {
            m,
            terms: p.num_terms(),
            degree_x: p.degree_x(),
            degree_q: p.degree_q(),
            leading,
            text: p.to_string(),
        });
    }
    let (cnx, cne) = a.check_window;
    let check = ladder_check(cnx, cne.min(a.m_max as usize))?;
    let passed = check.passed;
    if let Some(out) = &a.output {
        write_json(out, &LadderDoc { m_max: a.m_max, polynomials: polys, degree_formulas_hold: degrees_ok, cross_validation: check })?;
    }
    if degrees_ok && passed {
        Ok(())
    } else {
        Err(CliError::Mismatch("P_m ladder failed its degree or cross-validation checks".into()))
    }
}

fn numeric_q(s: &str) -> CliResult<Complex64> {
    QChoice::parse_flag(s)?.point().ok_or_else(|| CliError::Validation("a numeric q is required".into()))
}

/// Runs the randomized inequality check, one task per sample, merged in index order.
pub fn norm_report(ctx: &NagumoContext, q: Complex64, plan: &SamplePlan) -> NormReport {
    let parts: Vec<NormReport> = (0..plan.count).into_par_iter().map(|i| check_sample(ctx, q, plan, i)).collect();
    parts.into_iter().fold(NormReport::empty(), NormReport::merge)
}

pub fn norms(a: &NormsArgs) -> CliResult<()> {
    let q = numeric_q(&a.q)?;
    let ctx = NagumoContext::new(a.r, q.norm())?;
    let plan = SamplePlan {
        count: a.samples,
        max_degree: a.degrees,
        max_index: a.max_index,
        seed: a.seed,
        slack: a.slack,
        ..SamplePlan::default()
    };
    let report = norm_report(&ctx, q, &plan);
    let expected = a.r * (1.0 - 1.0 / q.norm());
    let tightness: Vec<TightnessDoc> = (0..=a.max_index)
        .map(|n| {
            let ratio = sigma_tightness(&ctx, n);
            TightnessDoc { n, ratio, expected, error: (ratio - expected).abs() }
        })
        .collect();
    let classical_limit = (q.im == 0.0).then(|| {
        let mut gaps = Vec::new();
        for degree in 0..=a.degrees.min(4) {
            let mut f = vec![Complex64::new(0.0, 0.0); degree + 1];
            f[degree] = Complex64::new(1.0, 0.0);
            for n in 0..=a.max_index {
                let (qn, cl) = (ctx.norm_prime(&f, n), ctx.classical_norm(&f, n));
                let relative_gap = if cl > 0.0 { (qn - cl).abs() / cl } else { (qn - cl).abs() };
                gaps.push(ClassicalGapDoc { degree, n, q_norm: qn, classical_norm: cl, relative_gap });
            }
        }
        gaps
    });
    let (tallies, violations) = NormsDoc::tallies(&report);
    let total = report.total_violations();
    for t in &tallies {
        println!("{} checked={} violations={} worst_ratio={}", t.inequality, t.checked, t.violations, t.worst_ratio);
    }
    let worst_tight = tightness.iter().map(|t| t.error).fold(0.0, f64::max);
    println!("sigma tightness: expected={expected} max_error={worst_tight}");
    if let Some(g) = &classical_limit {
        println!("classical limit: max_relative_gap={}", g.iter().map(|g| g.relative_gap).fold(0.0, f64::max));
    }
    let doc = NormsDoc {
        q: (q.re, q.im),
        r: a.r,
        samples: report.samples,
        max_degree: a.degrees,
        max_index: a.max_index,
        seed: a.seed,
        slack: a.slack,
        total_violations: total,
        tallies,
        violations,
        tightness,
        classical_limit,
    };
    if let Some(out) = &a.output {
        write_json(out, &doc)?;
    }
    println!("{} norms samples={} violations={total}", if total == 0 { "PASS" } else { "FAIL" }, report.samples);
    if total == 0 {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{total} norm inequality violations")))
    }
}

#[derive(Debug, Serialize)]
pub struct GrowthDoc {
    pub source: String,
    pub q_point: (f64, f64),
    pub window: (usize, usize),
    pub component: usize,
    /// `max_n ln|a_{n,m}|` for each eps-order `m`.
    pub row_maxima: Vec<f64>,
    pub fit_window: (u32, u32),
    pub row_fit: Option<FitDoc>,
    pub row_fit_error: Option<String>,
    pub space: Option<SpaceDoc>,
    pub theorem: Option<Vec<DisciplineDoc>>,
}

struct ExampleGrowth {
    table: LnTable,
    theorem: Vec<DisciplineDoc>,
    p: i32,
}

fn growth_example<R: Ring>(a: &GrowthArgs, id: ExampleId, q: R, q_point: Complex64) -> CliResult<ExampleGrowth> {
    let (nx, ne) = a.window;
    let spec = registry::build(id, q, a.alpha, nx, ne)?;
    let res = solve_along(&spec, id.path(), nx, ne)?;
    let mut opts = GrowthOptions::new(a.r, q_point);
    opts.start = a.start;
    opts.steps = a.steps;
    let report = verify_theorem_bounds(&spec, &res, &opts);
    Ok(ExampleGrowth {
        table: LnTable::from_series(&res.table, a.component, q_point),
        theorem: report.checks.iter().map(Into::into).collect(),
        p: spec.p,
    })
}

/// Row maxima, fit window, row fit, and space verdict.
pub type TableAnalysis = (Vec<f64>, (u32, u32), Result<FitDoc, String>, Option<SpaceDoc>);

/// Row maxima, fit and space verdict of a table; shared by both sources so
/// that a re-ingested table yields the same verdicts.
pub fn analyse_table(
    table: &LnTable,
    q_modulus: f64,
    fit_window: Option<(u32, u32)>,
    space: Option<SpaceKind>,
    steps: usize,
) -> TableAnalysis {
    let row_maxima: Vec<f64> = (0..=table.ne())
        .map(|m| (0..=table.nx()).map(|n| table.get(n, m)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let ne = table.ne() as u32;
    let fw = fit_window.unwrap_or(if ne >= 20 { (10, ne) } else { (0, ne) });
    let fit = fit_gevrey_ln(&row_maxima, q_modulus, fw.0 as usize..=fw.1.min(ne) as usize)
        .map(|f| FitDoc::from(&f))
        .map_err(|e| e.to_string());
    let space = space.map(|k| SpaceDoc::from(&classify_space(table, q_modulus, k, steps)));
    (row_maxima, fw, fit, space)
}

pub fn growth(a: &GrowthArgs) -> CliResult<()> {
    let q = QChoice::parse_flag(&a.q)?;
    let q_point = match &a.q_point {
        Some(s) => numeric_q(s)?,
        None => q.point().ok_or_else(|| CliError::Validation("symbolic q needs --q-point".into()))?,
    };
    let (source, table, theorem, p) = if let Some(id) = a.source.example {
        if a.alpha != 1 && !id.takes_alpha() {
            return Err(CliError::Validation(format!("{id} is defined for alpha = 1 only")));
        }
        let g = with_q!(&q, |qv| growth_example(a, id, qv, q_point))?;
        (id.to_string(), g.table, Some(g.theorem), Some(g.p))
    } else if let Some(path) = &a.source.table {
        (path.display().to_string(), read_ln_table(path, a.component, q_point)?, None, None)
    } else {
        return Err(CliError::Validation("one of --example or --table is required".into()));
    };
    let space = match a.space {
        SpaceArg::None => None,
        SpaceArg::OZero => Some(SpaceKind::OZero),
        SpaceArg::Monomial { p, alpha } => Some(SpaceKind::Monomial { p, alpha }),
        SpaceArg::Auto => match p {
            Some(0) => Some(SpaceKind::OZero),
            Some(p) if p > 0 => Some(SpaceKind::Monomial { p: p as u32, alpha: a.alpha }),
            _ => None,
        },
    };
    let (row_maxima, fit_window, fit, space_doc) = analyse_table(&table, q_point.norm(), a.fit_window, space, a.steps);
    match &fit {
        Ok(f) => println!("row fit: s={} log_a={} log_c={} residual={}", f.s, f.log_a, f.log_c, f.residual),
        Err(e) => println!("row fit: {e}"),
    }
    if let Some(s) = &space_doc {
        let c = s.constants.as_ref().map(|c| format!("C={} A={}", c.c, c.a)).unwrap_or_else(|| "no constants".into());
        println!(
            "space {}: {c} drift={} {}",
            s.space,
            s.stabilization.drift,
            if s.consistent { "consistent" } else { "inconclusive" }
        );
    }
    if let Some(t) = &theorem {
        for d in t {
            println!(
                "discipline {}: drift={} {}",
                d.axis,
                d.stabilization.drift,
                if d.stabilization.stable { "stable" } else { "unstable" }
            );
        }
    }
    let (row_fit, row_fit_error) = match fit {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e)),
    };
    let doc = GrowthDoc {
        source,
        q_point: (q_point.re, q_point.im),
        window: (table.nx(), table.ne()),
        component: a.component,
        row_maxima,
        fit_window,
        row_fit,
        row_fit_error,
        space: space_doc,
        theorem,
    };
    if let Some(out) = &a.output {
        write_json(out, &doc)?;
    }
    Ok(())
}

pub fn confluence(a: &ConfluenceArgs) -> CliResult<()> {
    let qs: Vec<BigRational> = if a.q.is_empty() {
        (a.k_range.0..=a.k_range.1).map(dyadic_q).collect()
    } else {
        a.q.iter()
            .map(|s| match QChoice::parse_flag(s)? {
                QChoice::Rational(r) => Ok(r),
                _ => Err(CliError::Validation(format!("confluence points must be rational, got {s:?}"))),
            })
            .collect::<CliResult<_>>()?
    };
    let (nx, ne) = a.window;
    let report = confluence_study(a.example, &qs, nx, ne, a.bracket_max)?;
    let doc = ConfluenceDoc::from(&report);
    for row in &doc.rows {
        println!("q={} max_deviation={} bracket_deviation={}", row.q, row.max_deviation, row.bracket_deviation);
    }
    match doc.converging {
        Some(c) => println!("converging: {c}"),
        None => println!("converging: single point, no trend"),
    }
    println!(
        "limit discipline: drift={} {}",
        doc.limit_discipline.drift,
        if doc.limit_discipline.stable { "stable" } else { "unstable" }
    );
    if let Some(out) = &a.output {
        write_json(out, &doc)?;
    }
    Ok(())
}

