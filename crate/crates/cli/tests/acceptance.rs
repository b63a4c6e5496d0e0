//! Acceptance gate: one PASS/FAIL line per criterion.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qflow_core::growth::{confluence_study, fit_gevrey, fit_gevrey_ln, verify_theorem_bounds, Axis, GrowthOptions};
use qflow_core::ladder::{expected_degree_q, expected_degree_x, pm_ladder, XQPoly};
use qflow_core::nagumo::{check_norm_inequalities, sigma_tightness, NagumoContext, SamplePlan};
use qflow_core::qcalc::ln_classical_factorial;
use qflow_core::registry::{self, ExampleId};
use qflow_core::solver::{solve_e_major, solve_x_major, EquationSpec, Operator};
use qflow_core::{FData, Mat, MatrixSeries2, NonlinearTerm, QPoly, Ring, Series2};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

type Q = BigRational;

fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn qpow(q: &Q, k: u32) -> Q {
    Ring::pow(q, k)
}

/// `[n]_q = (q^n - 1)/(q - 1)`.
fn bracket(n: u32, q: &Q) -> Q {
    (qpow(q, n) - Q::one()) / (q - Q::one())
}

fn q_factorial(n: u32, q: &Q) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * bracket(k, q))
}

/// Gaussian binomial by the product formula.
fn gaussian_binomial(n: u32, k: u32, q: &Q) -> Q {
    (1..=k).fold(Q::one(), |acc, j| acc * (Q::one() - qpow(q, n - k + j)) / (Q::one() - qpow(q, j)))
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn xq(rows: &[(i32, usize, &str)]) -> XQPoly {
    let len = rows.iter().map(|r| r.1).max().unwrap_or(0) + 1;
    let mut coeffs = vec![QPoly::default(); len];
    for &(sign, k, text) in rows {
        let c: QPoly = text.parse().expect("golden polynomial");
        coeffs[k] = if sign < 0 { -c } else { c };
    }
    XQPoly::from_coeffs(coeffs)
}

fn golden_p4() -> XQPoly {
    xq(&[
        (1, 5, "q^7"),
        (1, 4, "-3*q^6 - 2*q^5"),
        (1, 3, "-4*q^6 - 6*q^5 - 3*q^4 - 2*q^3"),
        (1, 2, "-q^6 - 2*q^5 - q^4 - q^3"),
        (1, 1, "q^4 + 3*q^3 + 4*q^2 + 2*q"),
        (1, 0, "q^3 + 2*q^2 + 2*q + 1"),
    ])
}

fn golden_p5() -> XQPoly {
    xq(&[
        (1, 9, "-q^16"),
        (-1, 8, "-6*q^15 - 7*q^14 - 3*q^13"),
        (-1, 7, "-10*q^15 - 19*q^14 - 14*q^13 - 8*q^12 - 5*q^11 - 3*q^10"),
        (-1, 6, "-5*q^15 - 11*q^14 - 4*q^13 + 7*q^12 + 12*q^11 + 8*q^10 + 6*q^9 + q^8"),
        (-1, 5, "-q^15 - 2*q^14 + 8*q^13 + 35*q^12 + 64*q^11 + 71*q^10 + 61*q^9 + 40*q^8 + 19*q^7 + 6*q^6"),
        (-1, 4, "3*q^13 + 22*q^12 + 55*q^11 + 84*q^10 + 98*q^9 + 93*q^8 + 69*q^7 + 37*q^6 + 12*q^5 + 3*q^4"),
        (-1, 3, "4*q^12 + 15*q^11 + 30*q^10 + 44*q^9 + 54*q^8 + 50*q^7 + 34*q^6 + 18*q^5 + 8*q^4 + 2*q^3"),
        (-1, 2, "q^11 + 3*q^10 + 5*q^9 + 5*q^8 - 10*q^6 - 15*q^5 - 13*q^4 - 8*q^3 - 2*q^2"),
        (-1, 1, "-q^8 - 4*q^7 - 11*q^6 - 18*q^5 - 21*q^4 - 18*q^3 - 10*q^2 - 3*q"),
        (1, 0, "q^6 + 3*q^5 + 5*q^4 + 6*q^3 + 5*q^2 + 3*q + 1"),
    ])
}

fn criterion_1() -> Outcome {
    let l = pm_ladder(8).map_err(|e| e.to_string())?;
    ensure(l[1] == XQPoly::one(), || format!("P_2 = {}", l[1]))?;
    let p3 = xq(&[(1, 2, "-q^2"), (1, 1, "q"), (1, 0, "q + 1")]);
    ensure(l[2] == p3, || format!("P_3 = {}", l[2]))?;
    ensure(l[3] == golden_p4(), || format!("P_4 = {}", l[3]))?;
    ensure(l[4] == golden_p5(), || format!("P_5 = {}", l[4]))?;
    let p6 = &l[5];
    ensure(p6.num_terms() == 203, || format!("P_6 has {} terms", p6.num_terms()))?;
    let lead = p6.leading_term();
    ensure(lead == Some((14, 30, Q::one())), || format!("P_6 leading term {lead:?}"))?;
    for m in 2..=8u32 {
        let p = &l[m as usize - 1];
        ensure(p.degree_x() == Some(expected_degree_x(m)) && p.degree_q() == Some(expected_degree_q(m)), || {
            format!("degrees of P_{m}: {:?}, {:?}", p.degree_x(), p.degree_q())
        })?;
    }
    Ok("P_2..P_5 exact, P_6 has 203 terms led by x^14 q^30, degree formulas hold for m <= 8".into())
}

fn criterion_2() -> Outcome {
    let q = rat(3, 2);
    let mut checked = 0;
    for alpha in [1u32, 2] {
        let spec = registry::build(ExampleId::Heine, q.clone(), alpha, 15, 15).map_err(|e| e.to_string())?;
        let t = solve_x_major(&spec, 15, 15).map_err(|e| e.to_string())?.table;
        for n in 0..=15usize {
            for k in 0..=15usize {
                let want = if k % alpha as usize == 0 {
                    let m = (k / alpha as usize) as u32;
                    gaussian_binomial(n as u32 + m, m, &q)
                } else {
                    Q::zero()
                };
                ensure(*t.at(n, k, 0) == want, || format!("alpha={alpha} a({n},{k}) = {}, want {want}", t.at(n, k, 0)))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} entries equal Gaussian binomials or zero at q = 3/2, alpha in {{1,2}}"))
}

fn criterion_3() -> Outcome {
    let q = rat(3, 2);
    let spec = registry::build(ExampleId::SigmaX2, q.clone(), 1, 25, 12).map_err(|e| e.to_string())?;
    let t = solve_x_major(&spec, 25, 12).map_err(|e| e.to_string())?.table;
    for n in 0..=12usize {
        let want = qpow(&q, (n * n) as u32);
        ensure(*t.at(2 * n + 1, n, 0) == want, || format!("sigma-x2 a({},{n}) = {}", 2 * n + 1, t.at(2 * n + 1, n, 0)))?;
    }
    let spec = registry::build(ExampleId::DqP1Pm, q.clone(), 1, 12, 12).map_err(|e| e.to_string())?;
    let t = solve_x_major(&spec, 12, 12).map_err(|e| e.to_string())?.table;
    for n in 1..=12usize {
        let want = q_factorial(n as u32 - 1, &q);
        ensure(*t.at(n, n, 0) == want, || format!("dq-p1-pm a({n},{n}) = {}", t.at(n, n, 0)))?;
    }
    for alpha in [1u32, 2] {
        let spec = registry::build(ExampleId::DqPMinus1, q.clone(), alpha, 12, 12).map_err(|e| e.to_string())?;
        let t = solve_e_major(&spec, 12, 12).map_err(|e| e.to_string())?.table;
        for n in 0..=12usize {
            for k in 0..=12usize {
                let want = if k % alpha as usize == 0 {
                    let m = (k / alpha as usize) as u32;
                    q_factorial(n as u32 + m, &q) / q_factorial(n as u32, &q)
                } else {
                    Q::zero()
                };
                ensure(*t.at(n, k, 0) == want, || format!("dq-pminus1 alpha={alpha} a({n},{k}) = {}", t.at(n, k, 0)))?;
            }
        }
    }
    Ok("sigma-x2 q^(n^2), dq-p1-pm [n-1]!, dq-pminus1 [n+m]!/[n]! exact at q = 3/2".into())
}

fn small(rng: &mut ChaCha8Rng, span: i64) -> Q {
    rat((rng.next_u64() % (2 * span as u64 + 1)) as i64 - span, 1 + (rng.next_u64() % 3) as i64)
}

/// A random system with a few nonzero coefficients and invertible `A(0,0)`.
fn random_spec(rng: &mut ChaCha8Rng, w: usize) -> EquationSpec<Q> {
    let dim = 1 + (rng.next_u64() % 2) as usize;
    let p = (rng.next_u64() % 3) as i32;
    let operator = if rng.next_u64().is_multiple_of(2) { Operator::Dq } else { Operator::SigmaQ };
    let q = [rat(3, 2), rat(2, 1), rat(5, 3)][(rng.next_u64() % 3) as usize].clone();
    let mut b = Series2::zeros(dim, w, w);
    for _ in 0..4 {
        let (n, m) = ((rng.next_u64() % 4) as usize, (rng.next_u64() % 4) as usize);
        if n + m > 0 {
            b.set(n, m, (rng.next_u64() as usize) % dim, small(rng, 3));
        }
    }
    let mut a = MatrixSeries2::zeros(dim, w, w);
    let mut a00 = Mat::zeros(dim);
    for i in 0..dim {
        a00.set(i, i, rat(1 + (rng.next_u64() % 3) as i64, 1));
    }
    if dim == 2 {
        a00.set(0, 1, small(rng, 2));
    }
    *a.get_mut(0, 0) = a00;
    for _ in 0..3 {
        let (n, m) = ((rng.next_u64() % 3) as usize, (rng.next_u64() % 3) as usize);
        if n + m > 0 {
            let (i, j) = ((rng.next_u64() as usize) % dim, (rng.next_u64() as usize) % dim);
            a.get_mut(n, m).set(i, j, small(rng, 2));
        }
    }
    let index = match dim {
        1 => vec![2],
        _ => [vec![2, 0], vec![1, 1], vec![0, 2]][(rng.next_u64() % 3) as usize].clone(),
    };
    let mut coeff = Series2::zeros(dim, w, w);
    for _ in 0..2 {
        let (n, m) = ((rng.next_u64() % 2) as usize, (rng.next_u64() % 2) as usize);
        coeff.set(n, m, (rng.next_u64() as usize) % dim, small(rng, 2));
    }
    EquationSpec { operator, p, alpha: 1, q, f: FData { b, a, nonlinear: vec![NonlinearTerm { index, coeff }] } }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_401);
    let w = 12;
    let mut shapes = Vec::new();
    for k in 0..10 {
        let spec = random_spec(&mut rng, w);
        spec.validate().map_err(|e| format!("spec {k}: {e}"))?;
        let x = solve_x_major(&spec, w, w).map_err(|e| format!("spec {k} x-major: {e}"))?.table;
        let e = solve_e_major(&spec, w, w).map_err(|e| format!("spec {k} e-major: {e}"))?.table;
        ensure(x == e, || format!("spec {k} ({:?}, p={}, N={}): tables differ", spec.operator, spec.p, spec.dim()))?;
        shapes.push(format!("{}{}N{}", if spec.operator == Operator::Dq { "d" } else { "s" }, spec.p, spec.dim()));
    }
    Ok(format!("10 random nonlinear specs agree exactly on 12x12 [{}]", shapes.join(" ")))
}

fn criterion_5() -> Outcome {
    let configs = [
        ("3/2", Complex64::new(1.5, 0.0)),
        ("2", Complex64::new(2.0, 0.0)),
        ("1.2e^(i pi/7)", Complex64::from_polar(1.2, std::f64::consts::PI / 7.0)),
    ];
    let plan = SamplePlan { count: 500, max_index: 5, slack: 1.02, ..SamplePlan::default() };
    let mut parts = Vec::new();
    for (name, q) in configs {
        let ctx = NagumoContext::new(1.0, q.norm()).map_err(|e| e.to_string())?;
        let report = check_norm_inequalities(&ctx, q, &plan);
        ensure(report.samples == 500, || format!("q={name}: {} samples", report.samples))?;
        ensure(report.total_violations() == 0, || format!("q={name}: first violation {:?}", report.violations.first()))?;
        let primed = report.tallies.iter().filter(|t| t.inequality.name().ends_with("_prime")).map(|t| t.checked).sum::<usize>();
        ensure((q.im == 0.0) == (primed > 0), || format!("q={name}: primed checks {primed}"))?;
        let expected = 1.0 - 1.0 / q.norm();
        for n in 0..=5 {
            let got = sigma_tightness(&ctx, n);
            ensure((got - expected).abs() <= 1e-12, || format!("q={name}: tightness at n={n} is {got}, want {expected}"))?;
        }
        parts.push(format!("q={name} ok"));
    }
    Ok(format!("500 pairs each, zero violations, sigma constant to 1e-12 ({})", parts.join(", ")))
}

fn criterion_6() -> Outcome {
    let q = rat(2, 1);
    let two = Complex64::new(2.0, 0.0);
    let mut fits = Vec::new();
    for id in [ExampleId::EulerQ, ExampleId::GeomQ] {
        let spec = registry::build(id, q.clone(), 1, 61, 60).map_err(|e| e.to_string())?;
        let t = solve_x_major(&spec, 61, 60).map_err(|e| e.to_string())?.table;
        let diag: Vec<f64> = (0..=60).map(|n| t.at(n + 1, n, 0).scaled_at(two).ln_abs()).collect();
        let fit = fit_gevrey_ln(&diag, 2.0, 10..=60).map_err(|e| e.to_string())?;
        ensure((0.95..=1.05).contains(&fit.s), || format!("{id}: s = {}", fit.s))?;
        fits.push(format!("{id} s={:.4}", fit.s));
    }
    for (c, a) in [(3.0, 1.7), (0.5, 5.0), (1.0, 1.0)] {
        let geo: Vec<f64> = (0..=60).map(|n| c * f64::powi(a, n)).collect();
        let fit = fit_gevrey(&geo, 2.0, 10..=60).map_err(|e| e.to_string())?;
        ensure(fit.s.abs() <= 1e-6, || format!("geometric {c}*{a}^n: s = {}", fit.s))?;
    }
    fits.push("geometric controls s=0".into());
    Ok(fits.join(", "))
}

fn criterion_7() -> Outcome {
    let q = rat(2, 1);
    let two = Complex64::new(2.0, 0.0);
    let mut opts = GrowthOptions::new(0.5, two);
    opts.start = 5;
    let spec = registry::build(ExampleId::DqP0, q.clone(), 1, 40, 40).map_err(|e| e.to_string())?;
    let res = solve_x_major(&spec, 40, 40).map_err(|e| e.to_string())?;
    let report = verify_theorem_bounds(&spec, &res, &opts);
    let x = report.checks.iter().find(|c| c.axis == Axis::X).ok_or("no x discipline for p = 0")?;
    ensure(x.stabilization.stable, || format!("dq-p0 drift {}", x.stabilization.drift))?;
    let spec = registry::build(ExampleId::DqPMinus1, q, 1, 20, 40).map_err(|e| e.to_string())?;
    let res = solve_e_major(&spec, 20, 40).map_err(|e| e.to_string())?;
    let report = verify_theorem_bounds(&spec, &res, &opts);
    let e = report.checks.iter().find(|c| c.axis == Axis::E).ok_or("no eps discipline for p = -1")?;
    ensure(e.stabilization.stable, || format!("dq-pminus1 drift {}", e.stabilization.drift))?;
    Ok(format!(
        "dq-p0 drift {:.2e} on n in [5,40], dq-pminus1 drift {:.2e}, both < 5%",
        x.stabilization.drift, e.stabilization.drift
    ))
}

fn criterion_8() -> Outcome {
    let q = rat(1_000_001, 1_000_000);
    let report = confluence_study(ExampleId::DqP1Pm, std::slice::from_ref(&q), 8, 8, 20).map_err(|e| e.to_string())?;
    let row = &report.rows[0];
    ensure(row.bracket_deviation < 1e-4, || format!("bracket deviation {}", row.bracket_deviation))?;
    let spec = registry::build(ExampleId::DqP1Pm, q, 1, 8, 8).map_err(|e| e.to_string())?;
    let t = solve_x_major(&spec, 8, 8).map_err(|e| e.to_string())?.table;
    let zero = Complex64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    for n in 1..=8usize {
        let dev = (t.at(n, n, 0).scaled_at(zero).ln_abs() - ln_classical_factorial(n as u32 - 1)).exp_m1().abs();
        worst = worst.max(dev);
    }
    ensure(worst < 1e-3, || format!("a(n,n) vs (n-1)! deviates by {worst}"))?;
    ensure(report.limit_discipline.stable, || format!("limit drift {}", report.limit_discipline.drift))?;
    Ok(format!(
        "bracket dev {:.1e}, a(n,n)/(n-1)! dev {worst:.1e}, limit drift {:.2e}",
        row.bracket_deviation, report.limit_discipline.drift
    ))
}

struct Run {
    stdout: Vec<u8>,
    files: Vec<Vec<u8>>,
}

fn run_exact_suite(dir: &Path, threads: &str) -> Result<Run, String> {
    let bin = env!("CARGO_BIN_EXE_qflow");
    let spec = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/heine.json");
    let _ = std::fs::remove_dir_all(dir);
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let d = |name: &str| dir.join(name).display().to_string();
    let spec = spec.display().to_string();
    let calls: Vec<Vec<String>> = vec![
        vec!["solve".into(), spec, "-o".into(), d("heine.csv"), "--both-paths".into()],
        vec!["reproduce".into(), "heine".into(), "--max-order".into(), "15".into(), "--alpha".into(), "2".into(), "--table".into(), d("heine2.csv")],
        vec!["reproduce".into(), "dq-p1-pm".into(), "--q".into(), "symbolic".into(), "--max-order".into(), "8".into(), "--table".into(), d("pm.csv")],
        vec!["reproduce".into(), "dq-pminus1".into(), "--q".into(), "3/2+1/2i".into(), "--table".into(), d("pminus1.csv")],
        vec!["pm-ladder".into(), "--m-max".into(), "6".into(), "-o".into(), d("ladder.json")],
        vec!["growth".into(), "--example".into(), "dq-p0".into(), "--window".into(), "20,20".into(), "-o".into(), d("growth.json")],
        vec!["confluence".into(), "dq-p1-pm".into(), "--k-range".into(), "6..8".into(), "-o".into(), d("confluence.json")],
        vec!["norms".into(), "--samples".into(), "40".into(), "-o".into(), d("norms.json")],
    ];
    let mut stdout = Vec::new();
    for args in &calls {
        let out = Command::new(bin).args(args).env("QFLOW_THREADS", threads).output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("qflow {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))?;
        stdout.extend(out.stdout);
    }
    let names = [
        "heine.csv",
        "heine.diagnostics.json",
        "heine.cross_check.json",
        "heine2.csv",
        "pm.csv",
        "pminus1.csv",
        "ladder.json",
        "growth.json",
        "confluence.json",
        "norms.json",
    ];
    let files = names.iter().map(|n| std::fs::read(dir.join(n)).map_err(|e| format!("{n}: {e}"))).collect::<Result<_, _>>()?;
    Ok(Run { stdout, files })
}

fn criterion_9() -> Outcome {
    let base = std::env::temp_dir().join(format!("qflow-acceptance-{}", std::process::id()));
    let runs = [("1", "a"), ("1", "b"), ("4", "c"), ("4", "d")]
        .iter()
        .map(|(threads, tag)| run_exact_suite(&base.join(tag), threads))
        .collect::<Result<Vec<_>, _>>()?;
    let _ = std::fs::remove_dir_all(&base);
    for (k, r) in runs.iter().enumerate().skip(1) {
        ensure(r.stdout == runs[0].stdout, || format!("stdout of run {k} differs"))?;
        for (i, f) in r.files.iter().enumerate() {
            ensure(*f == runs[0].files[i], || format!("output file {i} of run {k} differs"))?;
        }
    }
    let bytes: usize = runs[0].files.iter().map(Vec::len).sum();
    Ok(format!("8 invocations x 4 runs (QFLOW_THREADS 1,1,4,4) bit-identical, {bytes} bytes of output"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "P_m ladder golden", criterion_1),
        (2, "Heine reproduction", criterion_2),
        (3, "optimality diagonals", criterion_3),
        (4, "cross-path equivalence", criterion_4),
        (5, "norm inequalities", criterion_5),
        (6, "growth fits", criterion_6),
        (7, "theorem disciplines", criterion_7),
        (8, "confluence", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, name, f) in criteria {
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {k} PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {k} FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
