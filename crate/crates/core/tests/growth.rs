use num_complex::Complex64;
use num_rational::BigRational;
use qflow_core::growth::{
    confluence_study, fit_gevrey, fit_gevrey_ln, verify_theorem_bounds, Axis, GrowthOptions,
};
use qflow_core::qcalc::ln_classical_factorial;
use qflow_core::registry::{self, ExampleId};
use qflow_core::ring::{rat, Ring};
use qflow_core::solver::{solve_e_major, solve_x_major};

fn two() -> Complex64 {
    Complex64::new(2.0, 0.0)
}

#[test]
fn euler_and_geometric_fits() {
    let spec = registry::build(ExampleId::EulerQ, rat(2, 1), 1, 61, 60).unwrap();
    let t = solve_x_major(&spec, 61, 60).unwrap().table;
    let diag: Vec<f64> = (0..=60).map(|n| t.at(n + 1, n, 0).scaled_at(two()).ln_abs()).collect();
    let fit = fit_gevrey_ln(&diag, 2.0, 10..=60).unwrap();
    assert!((0.95..=1.05).contains(&fit.s), "s = {}", fit.s);

    let spec = registry::build(ExampleId::GeomQ, rat(2, 1), 1, 41, 40).unwrap();
    let t = solve_x_major(&spec, 41, 40).unwrap().table;
    let diag: Vec<f64> = (0..=40).map(|n| t.at(n + 1, n, 0).scaled_at(two()).ln_abs()).collect();
    let fit = fit_gevrey_ln(&diag, 2.0, 10..=40).unwrap();
    assert!((0.95..=1.05).contains(&fit.s), "s = {}", fit.s);

    let geo: Vec<f64> = (0..=60).map(|n| 3.0 * 1.7f64.powi(n)).collect();
    assert!(fit_gevrey(&geo, 2.0, 10..=60).unwrap().s.abs() <= 1e-6);
}

#[test]
fn sigma_x2_diagonal_sups() {
    let q = rat(2, 1);
    let spec = registry::build(ExampleId::SigmaX2, q, 1, 13, 6).unwrap();
    let res = solve_x_major(&spec, 13, 6).unwrap();
    let r = 0.5;
    let report = verify_theorem_bounds(&spec, &res, &GrowthOptions::new(r, two()));
    let x = report.checks.iter().find(|c| c.axis == Axis::X).unwrap();
    for n in 0..=6usize {
        let want = n as f64 * r.ln() + (n * n) as f64 * 2f64.ln();
        assert!((x.slices[2 * n + 1].ln_sup - want).abs() < 1e-12);
    }
}

#[test]
fn p0_discipline_stabilizes() {
    let spec = registry::build(ExampleId::DqP0, rat(2, 1), 1, 40, 40).unwrap();
    let res = solve_x_major(&spec, 40, 40).unwrap();
    let mut opts = GrowthOptions::new(0.5, two());
    opts.start = 5;
    let report = verify_theorem_bounds(&spec, &res, &opts);
    let x = report.checks.iter().find(|c| c.axis == Axis::X).unwrap();
    assert!(x.stabilization.stable, "{:?}", x.stabilization);
}

#[test]
fn p_minus_one_discipline_stabilizes() {
    let spec = registry::build(ExampleId::DqPMinus1, rat(2, 1), 1, 20, 40).unwrap();
    let res = solve_e_major(&spec, 20, 40).unwrap();
    let mut opts = GrowthOptions::new(0.5, two());
    opts.start = 5;
    let report = verify_theorem_bounds(&spec, &res, &opts);
    let e = report.checks.iter().find(|c| c.axis == Axis::E).unwrap();
    assert!(e.stabilization.stable, "{:?}", e.stabilization);
    // |u_n| <= |[n]!_q| / (1 - r)^{n+1} on |x| <= r/|q|^n
    for s in &e.slices {
        let bound = qflow_core::qcalc::ln_factorial(s.index as u32, 2.0) - (s.index as f64 + 1.0) * (1.0f64 - 0.5).ln();
        assert!(s.ln_sup <= bound + 1e-9);
    }
}

#[test]
fn confluence_near_one() {
    let q = BigRational::new(1_000_001.into(), 1_000_000.into());
    let report = confluence_study(ExampleId::DqP1Pm, std::slice::from_ref(&q), 8, 8, 20).unwrap();
    let row = &report.rows[0];
    assert!(row.bracket_deviation < 1e-4);
    let spec = registry::build(ExampleId::DqP1Pm, q, 1, 8, 8).unwrap();
    let t = solve_x_major(&spec, 8, 8).unwrap().table;
    for n in 1..=8usize {
        let got = t.at(n, n, 0).scaled_at(Complex64::new(0.0, 0.0)).ln_abs();
        let want = ln_classical_factorial(n as u32 - 1);
        assert!((got - want).exp_m1().abs() < 1e-3, "n={n}");
    }
    assert!(report.limit_discipline.stable, "{:?}", report.limit_discipline);
    assert_eq!(report.converging, None);
}
