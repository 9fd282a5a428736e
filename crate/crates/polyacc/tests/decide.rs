mod common;

use std::collections::BTreeMap;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyacc::dag::BlackBoxOp;
use polyacc::decide::*;
use polyacc::rational::{q, qf};
use polyacc::{DeltaAssignment, Polynomial, Q};

use common::*;

fn pt(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&a| q(a)).collect()
}

#[test]
fn random_products_of_forms_are_evaluable_and_compile() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let n = rng.gen_range(1..=4);
        let forms = classical_factors(n);
        let k = rng.gen_range(1..=4);
        let c = q(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
        let mut p = Polynomial::constant(n, c.clone());
        for _ in 0..k {
            p = &p * &forms[rng.gen_range(0..forms.len())].poly;
        }
        let v = decide_complex(&p).unwrap();
        assert_eq!(v.status, Status::Evaluable, "{p}");
        let d = compile_verdict(&v, n, &BTreeMap::new()).unwrap();
        assert_eq!(d.extract_polynomial().unwrap(), p);

        // a product of exact forms with r roundings is off by at most (1+ε)^r − 1 everywhere
        let eps = qf(1, 1 << 20);
        let ids = d.rounded_ids();
        let bound = (0..ids.len()).fold(Q::one(), |a, _| a * (Q::one() + &eps)) - Q::one();
        for _ in 0..5 {
            let x: Vec<Q> = (0..n).map(|_| qf(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect();
            let delta = DeltaAssignment::new(
                eps.clone(),
                ids.iter().map(|&id| (id, if rng.gen_bool(0.5) { eps.clone() } else { -eps.clone() })).collect(),
            )
            .unwrap();
            let exact = p.eval(&x).unwrap();
            let got = d.eval_rounded(&x, &delta).unwrap();
            assert!((&got - &exact).abs() <= &bound * exact.abs(), "{p} at {x:?}");
        }
    }
}

#[test]
fn classic_examples() {
    assert_eq!(decide_complex(&poly("x1 + x2 + x3", 3)).unwrap().status, Status::NotEvaluable);
    assert_eq!(decide_complex(&poly("x1^2 + x2^2", 2)).unwrap().status, Status::NotEvaluable);
    assert_eq!(decide_complex(&poly(MOTZKIN, 3)).unwrap().status, Status::NotEvaluable);
    let v = decide_complex(&poly("x1^3 + x2", 2)).unwrap();
    assert_eq!(v.status, Status::NotEvaluable);
    assert!(matches!(v.certificate, Certificate::Inhomogeneous { .. }));
    assert!(decide_complex(&poly("x1 + 1", 1)).is_err());
    assert!(decide_complex(&poly("1/2*x1", 1)).is_err());
}

#[test]
fn real_witnesses() {
    let p = poly("x1 + x2 + x3", 3);
    let w = real_nonevaluability_witness(&p, &[pt(&[1, 1, -2])]).unwrap();
    assert_eq!(w.point, pt(&[1, 1, -2]));
    assert!(!w.restriction.is_zero());
    // the only zeros of x1*x2 lie on allowable hyperplanes
    assert!(real_nonevaluability_witness(&poly("x1*x2", 2), &[pt(&[0, 5])]).is_none());
    let v = decide_real(&poly("x1^2 + x2^2 - x3^2", 3), &line_zero_candidates(&poly("x1^2 + x2^2 - x3^2", 3), 5, 1000));
    assert_eq!(v.status, Status::NotEvaluable);
}

#[test]
fn allow_subspace_dimensions() {
    assert!(allow_subspace(&pt(&[1, 2, 3])).is_whole_space());
    let s = allow_subspace(&pt(&[1, -1, 0]));
    assert_eq!(s.dim, 1);
    assert_eq!(s.basis(), vec![pt(&[1, -1, 0])]);
    assert_eq!(allow_subspace(&pt(&[0, 0])).dim, 0);
}

#[test]
fn general_position_is_scale_invariant() {
    let p = poly("x1^2 + x2^2 - x3^2", 3);
    let base = pt(&[3, 4, 5]);
    for s in [q(1), q(-2), qf(7, 3)] {
        let x: Vec<Q> = base.iter().map(|v| v * &s).collect();
        assert!(is_general_position(&p, &x).unwrap().0);
    }
    assert!(is_general_position(&p, &pt(&[1, 1, 1])).is_err());
}

#[test]
fn constant_handling_in_products() {
    let forms = classical_factors(1);
    let d = compile_product(&q(1), &forms, 1, &BTreeMap::new()).unwrap();
    assert!(d.rounded_ids().is_empty());
    assert_eq!(d.extract_polynomial().unwrap(), poly("x1", 1));
    assert!(compile_product(&qf(1, 3), &forms, 1, &BTreeMap::new()).is_err());
    let third = scale_op(&qf(1, 3));
    let ops = BTreeMap::from([(third.name.clone(), third)]);
    let d = compile_product(&qf(1, 3), &forms, 1, &ops).unwrap();
    assert_eq!(d.extract_polynomial().unwrap(), poly("1/3*x1", 1));
}

#[test]
fn affine_black_box_makes_a_three_term_sum_evaluable() {
    let sum3 = BlackBoxOp::new("sum3", poly("x1 + x2 + x3", 3));
    let p = poly("(x1 + x2 + x3)*(x1 - x2)", 3);
    assert_eq!(decide_complex(&p).unwrap().status, Status::NotEvaluable);
    let v = decide_blackbox_affine(&p, std::slice::from_ref(&sum3)).unwrap();
    assert_eq!(v.status, Status::Evaluable);
    let ops = BTreeMap::from([(sum3.name.clone(), sum3)]);
    assert_eq!(compile_verdict(&v, 3, &ops).unwrap().extract_polynomial().unwrap(), p);
    let v = decide_blackbox_affine(&poly("x1^2 + x2^2", 2), &[BlackBoxOp::new("sum3", poly("x1 + x2 + x3", 3))]).unwrap();
    assert_eq!(v.status, Status::NotEvaluable);
}

#[test]
fn factorization_reexpands() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let n = 3;
        let mut p = Polynomial::zero(n);
        for _ in 0..4 {
            let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            p = &p + &Polynomial::monomial(n, e, q(rng.gen_range(-4..=4)));
        }
        let fz = factor_allowable(&p, &classical_factors(n));
        assert_eq!(fz.expand(), p);
    }
}
