use qflow_core::ladder::{cross_validate, expected_degree_q, expected_degree_x, pm_ladder, XQPoly};
use qflow_core::registry::{self, ExampleId};
use qflow_core::solver::solve_e_major;
use qflow_core::QPoly;

fn poly(rows: &[(i32, usize, &str)]) -> XQPoly {
    let len = rows.iter().map(|r| r.1).max().unwrap() + 1;
    let mut coeffs = vec![QPoly::default(); len];
    for &(sign, k, text) in rows {
        let c: QPoly = text.parse().unwrap();
        coeffs[k] = if sign < 0 { -c } else { c };
    }
    XQPoly::from_coeffs(coeffs)
}

fn p4() -> XQPoly {
    poly(&[
        (1, 5, "q^7"),
        (1, 4, "-3*q^6 - 2*q^5"),
        (1, 3, "-4*q^6 - 6*q^5 - 3*q^4 - 2*q^3"),
        (1, 2, "-q^6 - 2*q^5 - q^4 - q^3"),
        (1, 1, "q^4 + 3*q^3 + 4*q^2 + 2*q"),
        (1, 0, "q^3 + 2*q^2 + 2*q + 1"),
    ])
}

fn p5() -> XQPoly {
    poly(&[
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

#[test]
fn printed_rungs_match() {
    let l = pm_ladder(5).unwrap();
    assert_eq!(l[1], XQPoly::one());
    assert_eq!(l[2], poly(&[(1, 2, "-q^2"), (1, 1, "q"), (1, 0, "q + 1")]));
    assert_eq!(l[3], p4());
    assert_eq!(l[4], p5());
}

#[test]
fn sixth_rung_shape() {
    let p6 = &pm_ladder(6).unwrap()[5];
    assert_eq!(p6.num_terms(), 203);
    let (dx, dq, c) = p6.leading_term().unwrap();
    assert_eq!((dx, dq), (14, 30));
    assert_eq!(c, num_rational::BigRational::from_integer(1.into()));
}

#[test]
fn degree_formulas() {
    let l = pm_ladder(8).unwrap();
    for m in 2..=8u32 {
        let p = &l[m as usize - 1];
        assert_eq!(p.degree_x(), Some(expected_degree_x(m)), "deg_x P_{m}");
        assert_eq!(p.degree_q(), Some(expected_degree_q(m)), "deg_q P_{m}");
    }
}

#[test]
fn ladder_matches_solved_slices() {
    let q = QPoly::q();
    let spec = registry::build(ExampleId::DqP1Pm, q, 1, 12, 5).unwrap();
    let res = solve_e_major(&spec, 12, 5).unwrap();
    let ladder = pm_ladder(5).unwrap();
    assert_eq!(cross_validate(&ladder, &res.table), None);
}
