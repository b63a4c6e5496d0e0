use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use qflow_core::growth::{classify_space, fit_gevrey_ln, ln_c_at, LnTable, SpaceKind};
use qflow_core::nagumo::NagumoContext;
use qflow_core::registry::{self, ExampleId};
use qflow_core::ring::rat;
use qflow_core::solver::{rank_reduce, solve_x_major, EquationSpec, Operator};
use qflow_core::{FData, GaussRat, Mat, MatrixSeries2, QPoly, Ring, Series2};

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn qpoly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(small_rat(), 0..5).prop_map(|c| QPoly::from_coeffs(&c))
}

fn gauss() -> impl Strategy<Value = GaussRat> {
    (small_rat(), small_rat()).prop_map(|(a, b)| GaussRat::new(a, b))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn series(nx: usize, ne: usize) -> impl Strategy<Value = Series2<BigRational>> {
    prop::collection::vec(small_rat(), (nx + 1) * (ne + 1))
        .prop_map(move |v| Series2::from_fn(1, nx, ne, |n, m, _| v[n * (ne + 1) + m].clone()))
}

fn axioms_exact<R: Ring>(a: R, b: R, c: R) {
    assert_eq!((a.clone() * &b) * &c, a.clone() * &(b.clone() * &c));
    assert_eq!(a.clone() * &(b.clone() + &c), a.clone() * &b + &(a.clone() * &c));
    assert_eq!(a.clone() * &b, b.clone() * &a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_ring_axioms(a in small_rat(), b in small_rat(), c in small_rat(),
                         p in qpoly(), r in qpoly(), s in qpoly(),
                         g in gauss(), h in gauss(), k in gauss()) {
        axioms_exact(a, b, c);
        axioms_exact(p, r, s);
        axioms_exact(g, h, k);
    }

    #[test]
    fn float_ring_axioms(a in complex(), b in complex(), c in complex()) {
        let scale = 1.0 + a.norm() * b.norm() * c.norm() + a.norm() * (b.norm() + c.norm());
        prop_assert!(((a * b) * c - a * (b * c)).norm() <= 1e-12 * scale);
        prop_assert!((a * (b + c) - (a * b + a * c)).norm() <= 1e-12 * scale);
    }

    #[test]
    fn scalar_product_commutes(f in series(4, 3), g in series(4, 3)) {
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
    }

    #[test]
    fn unit_inverse_is_two_sided(mut f in series(4, 4), lead in 1i64..5) {
        f.set(0, 0, 0, rat(lead, 3));
        let g = f.invert_unit().unwrap();
        let one = Series2::monomial(4, 4, 0, 0, BigRational::one());
        prop_assert_eq!(f.mul(&g).unwrap(), one.clone());
        prop_assert_eq!(g.mul(&f).unwrap(), one);
    }

    #[test]
    fn truncation_commutes_with_products(f in series(5, 5), g in series(5, 5), wx in 0usize..5, we in 0usize..5) {
        prop_assert_eq!(f.mul(&g).unwrap().resized(wx, we), f.resized(wx, we).mul(&g.resized(wx, we)).unwrap());
        let mut u = f.clone();
        u.set(0, 0, 0, BigRational::one());
        prop_assert_eq!(u.invert_unit().unwrap().resized(wx, we), u.resized(wx, we).invert_unit().unwrap());
        let q = rat(3, 2);
        prop_assert_eq!(f.dq_x(&q).unwrap().resized(wx.min(4), we), f.resized(wx + 1, we).dq_x(&q).unwrap());
    }

    #[test]
    fn profile_is_monotone_and_lipschitz(q in 1.05f64..4.0, r in 0.1f64..3.0, n in 0usize..8, i in 0usize..64, j in 0usize..64) {
        let ctx = NagumoContext::new(r, q).unwrap();
        let outer = r / q.powi(n as i32 + 1);
        let (t, s) = (outer * i as f64 / 63.0, outer * j as f64 / 63.0);
        let (dn, dn1) = (ctx.dn(t, n).unwrap(), ctx.dn(t, n + 1).unwrap());
        prop_assert!(dn1 <= dn + 1e-15 && dn <= r * (1.0 - 1.0 / q) + 1e-15);
        prop_assert!((ctx.dn(t, n).unwrap() - ctx.dn(s, n).unwrap()).abs() <= q.powi(n as i32) * (t - s).abs() + 1e-14);
        prop_assert!((ctx.dn(q * t, n).unwrap() - ctx.dn(t, n + 1).unwrap()).abs() <= 1e-14);
    }

    #[test]
    fn grid_refinement_never_lowers_norms(c in prop::collection::vec(complex(), 1..6), n in 0usize..5) {
        let coarse = NagumoContext::with_grid(1.0, 2.0, 17, 16).unwrap();
        let fine = NagumoContext::with_grid(1.0, 2.0, 33, 32).unwrap();
        prop_assert!(fine.norm(&c, n) >= coarse.norm(&c, n));
        prop_assert!(fine.norm_prime(&c, n) >= coarse.norm_prime(&c, n));
    }

    #[test]
    fn primed_norm_tends_to_classical(c in prop::collection::vec(complex(), 1..5), n in 0usize..4) {
        let ctx = NagumoContext::with_grid(1.0, 1.0 + 1e-9, 128, 32).unwrap();
        let (a, b) = (ctx.norm_prime(&c, n), ctx.classical_norm(&c, n));
        prop_assert!((a - b).abs() <= 1e-6 * (1.0 + b));
    }

    #[test]
    fn sigma_closed_form(p in 1i32..3, f in prop::collection::vec(small_rat(), 6)) {
        // eps x^p sigma_q y = y - f(x, eps), with f_m(x) = f[m] x for m < 6
        let q = rat(3, 2);
        let (nx, ne) = (12, 5);
        let spec = EquationSpec {
            operator: Operator::SigmaQ,
            p,
            alpha: 1,
            q: q.clone(),
            f: FData {
                b: Series2::from_fn(1, nx, ne, |n, m, _| if n == 1 { -f[m].clone() } else { BigRational::zero() }),
                a: MatrixSeries2::from_fn(1, nx, ne, |n, m| Mat::scalar(1, if n + m == 0 { BigRational::one() } else { BigRational::zero() })),
                nonlinear: vec![],
            },
        };
        let t = solve_x_major(&spec, nx, ne).unwrap().table;
        let pu = p as usize;
        for m in 0..=ne {
            for n in 0..=nx {
                // u_m = sum_j q^{p j(j-1)/2} x^{jp} f_{m-j}(q^j x)
                let mut want = BigRational::zero();
                for j in 0..=m {
                    if n == j * pu + 1 {
                        want += &(f[m - j].clone() * &Ring::pow(&q, (pu * j * (j.max(1) - 1) / 2 + j) as u32));
                    }
                }
                prop_assert_eq!(t.at(n, m, 0).clone(), want);
            }
        }
    }

    #[test]
    fn p0_closed_form(f in prop::collection::vec(small_rat(), 8), alpha in 1u32..3) {
        // eps^alpha x d_q y = y - f_0(x): a_{n, alpha m} = f_n [n]^m
        let q = rat(2, 1);
        let (nx, ne) = (7, 6);
        let spec = EquationSpec {
            operator: Operator::Dq,
            p: 0,
            alpha,
            q: q.clone(),
            f: FData {
                b: Series2::from_fn(1, nx, ne, |n, m, _| if m == 0 && n > 0 { -f[n].clone() } else { BigRational::zero() }),
                a: MatrixSeries2::from_fn(1, nx, ne, |n, m| Mat::scalar(1, if n + m == 0 { BigRational::one() } else { BigRational::zero() })),
                nonlinear: vec![],
            },
        };
        let t = solve_x_major(&spec, nx, ne).unwrap().table;
        for n in 1..=nx {
            for m in 0..=ne {
                let want = if m % alpha as usize == 0 {
                    f[n].clone() * &Ring::pow(&qflow_core::qcalc::bracket(n as u32, &q), m as u32 / alpha)
                } else {
                    BigRational::zero()
                };
                prop_assert_eq!(t.at(n, m, 0).clone(), want);
            }
        }
    }

    #[test]
    fn rank_reduction_consistency(f in prop::collection::vec(small_rat(), 8)) {
        let q = rat(3, 2);
        let (nx, ne) = (5, 7);
        let spec = EquationSpec {
            operator: Operator::Dq,
            p: 1,
            alpha: 2,
            q,
            f: FData {
                b: Series2::from_fn(1, nx, ne, |n, m, _| if n + m > 0 && n + m < 8 { f[n + m].clone() } else { BigRational::zero() }),
                a: MatrixSeries2::from_fn(1, nx, ne, |n, m| Mat::scalar(1, if n + m == 0 { BigRational::one() } else if m == 1 { f[n].clone() } else { BigRational::zero() })),
                nonlinear: vec![],
            },
        };
        let direct = solve_x_major(&spec, nx, ne).unwrap().table;
        let y0 = qflow_core::solver::solve_initial_x(&spec).unwrap();
        let shifted = qflow_core::solver::recenter_x(&spec, &y0).unwrap();
        let reduced = rank_reduce(&shifted).unwrap();
        let embedded = solve_x_major(&reduced.spec, nx, ne / 2).unwrap().table;
        let mut folded = reduced.fold(&embedded, ne);
        for m in 0..=ne {
            let v = folded.at(0, m, 0).clone() + y0.get(m, 0);
            folded.set(0, m, 0, v);
        }
        prop_assert_eq!(direct, folded);
    }

    #[test]
    fn fit_is_exact_on_its_model(lc in -5.0f64..5.0, la in -1.0f64..1.0, s in 0.0f64..2.0) {
        let lq = 2f64.ln();
        let v: Vec<f64> = (0..40).map(|n| lc + n as f64 * la + s * (n * n) as f64 / 2.0 * lq).collect();
        let fit = fit_gevrey_ln(&v, 2.0, 0..=39).unwrap();
        prop_assert!((fit.s - s).abs() < 1e-9 && (fit.log_a - la).abs() < 1e-8 && (fit.log_c - lc).abs() < 1e-8);
        prop_assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constants_grow_with_the_window(vals in prop::collection::vec(-5.0f64..5.0, 100)) {
        let t = LnTable::from_fn(9, 9, |n, m| vals[n * 10 + m] + (n * m) as f64 * 0.3);
        let v = classify_space(&t, 1.5, SpaceKind::OZero, 4);
        for w in v.stabilization.windows.windows(2) {
            for a in [1.0f64, 1.5, 3.0] {
                let lq = 1.5f64.ln();
                let small = ln_c_at(&t.excess(w[0].0, w[0].0, |n, m| SpaceKind::OZero.ln_template(n, m, lq)), a.ln());
                let big = ln_c_at(&t.excess(w[1].0, w[1].0, |n, m| SpaceKind::OZero.ln_template(n, m, lq)), a.ln());
                prop_assert!(big >= small);
            }
        }
    }

    #[test]
    fn ray_support_matches_ray_fit(c in 1usize..3, la in 0.0f64..0.5) {
        // a_{n, cn} = A^n |q|^{c n^2}: the O_0 template along the ray is |q|^{c n^2}
        let q = 1.5f64;
        let lq = q.ln();
        let t = LnTable::from_fn(20, 20, |n, m| if m == c * n { n as f64 * la + (c * n * n) as f64 * lq } else { f64::NEG_INFINITY });
        let ray: Vec<f64> = (0..=20 / c).map(|n| t.get(n, c * n)).collect();
        let fit = fit_gevrey_ln(&ray, q, 0..=20 / c).unwrap();
        prop_assert!((fit.s / 2.0 - c as f64).abs() < 1e-6);
        let v = classify_space(&t, q, SpaceKind::OZero, 3);
        let k = v.constants.unwrap();
        // excess along the ray is n la = (n + cn) la/(1+c)
        prop_assert!((k.ln_a - la / (1 + c) as f64).abs() < 1e-9);
    }
}

#[test]
fn registry_tables_are_unique_under_cropping() {
    let q = rat(3, 2);
    for id in [ExampleId::Heine, ExampleId::DqP1Pm, ExampleId::SigmaX2] {
        let big = solve_x_major(&registry::build(id, q.clone(), 1, 9, 9).unwrap(), 9, 9).unwrap().table;
        let small = solve_x_major(&registry::build(id, q.clone(), 1, 6, 4).unwrap(), 6, 4).unwrap().table;
        assert_eq!(big.resized(6, 4), small, "{id}");
    }
}
