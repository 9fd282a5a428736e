mod common;

use std::collections::BTreeMap;

use polyacc::dag::{Diagnostic, NodeId};
use polyacc::rational::{q, qf};
use polyacc::{Dag, DagBuilder, DeltaAssignment, Polynomial};

use common::*;

#[test]
fn naive_sum_validates_and_extracts() {
    let d = dag(NAIVE_SUM);
    assert!(d.validate().is_empty());
    assert_eq!(d.extract_polynomial().unwrap(), poly("x1 + x2 + x3", 3));
    assert_eq!(d.rounded_ids(), vec![1, 2]);
}

#[test]
fn diagnostics_for_cycles_and_arity() {
    let cyc = Dag::parse("dag c nvars=1\nnode 1 source x1\nnode 2 add 1 3\nnode 3 mul 2 1\nout 3\n").unwrap();
    assert!(cyc.validate().iter().any(|d| matches!(d, Diagnostic::Cycle { .. })), "{:?}", cyc.validate());
    let text = "dag f nvars=2\nop fma arity=3 poly=x1 + x2*x3\nnode 1 source x1\nnode 2 source x2\nnode 3 bbox fma 1 2\nout 3\n";
    let bad = Dag::parse(text).unwrap();
    assert!(bad.validate().iter().any(|d| matches!(d, Diagnostic::Arity { .. })), "{:?}", bad.validate());
}

#[test]
fn naive_sum_failure_at_the_cancelling_point() {
    let d = dag(NAIVE_SUM);
    let (d1, d2) = (qf(3, 1000), qf(-7, 1000));
    let delta = DeltaAssignment::new(qf(1, 100), BTreeMap::from([(1, d1.clone()), (2, d2.clone())])).unwrap();
    let v = d.eval_rounded(&[q(1), q(1), q(-2)], &delta).unwrap();
    assert_eq!(v, q(2) * &d1 * (q(1) + &d2));
}

#[test]
fn product_with_one_rounding() {
    let mut b = DagBuilder::new("prod", 2);
    let (x1, x2) = (b.source(0), b.source(1));
    let m = b.mul(x1, x2);
    let d = b.finish(m);
    let id = d.rounded_ids()[0];
    let delta = DeltaAssignment::new(qf(1, 10), BTreeMap::from([(id, qf(1, 10))])).unwrap();
    assert_eq!(d.eval_rounded(&[q(3), q(4)], &delta).unwrap(), qf(66, 5));
    assert_eq!(d.eval_rounded_f64(&[3.0, 4.0], &BTreeMap::from([(id, 0.1)])).unwrap(), 12.0 * 1.1);
}

#[test]
fn zero_delta_is_exact() {
    for text in [NAIVE_SUM, THREE_SQUARES, SUM_OF_SQUARES, MIXED] {
        let d = dag(text);
        let p = d.extract_polynomial().unwrap();
        let x: Vec<_> = (0..d.nvars).map(|i| qf(i as i64 * 7 - 5, 3)).collect();
        let zero = DeltaAssignment::uniform(&qf(1, 2), &d.rounded_ids(), &q(0));
        assert_eq!(d.eval_rounded(&x, &zero).unwrap(), p.eval(&x).unwrap());
    }
}

#[test]
fn naive_sum_expansion_to_order_two() {
    let e = dag(NAIVE_SUM).error_expansion(Some(2)).unwrap();
    assert_eq!(e.p(), poly("x1 + x2 + x3", 3));
    assert_eq!(e.coeff(&[(1, 1)]), poly("x1 + x2", 3));
    assert_eq!(e.coeff(&[(2, 1)]), poly("x1 + x2 + x3", 3));
    assert_eq!(e.coeff(&[(1, 1), (2, 1)]), poly("x1 + x2", 3));
    assert_eq!(e.delta_support().len(), 3);
}

#[test]
fn three_squares_first_order_coefficients() {
    let d = dag(THREE_SQUARES);
    assert_eq!(d.extract_polynomial().unwrap(), poly("x1^2*x2^2 + (x2 - x3)^4 + (x3 - x4)^2*x5^2", 5));
    let e = d.error_expansion(Some(1)).unwrap();
    let a = "x1^2*x2^2";
    let b = "(x2 - x3)^4";
    let c = "(x3 - x4)^2*x5^2";
    // δ_k enters through the exponent of (1+δ_k) along each path to the output
    let expected: [(NodeId, String); 12] = [
        (1, a.into()),
        (2, a.into()),
        (3, a.into()),
        (4, format!("4*{b}")),
        (5, format!("2*{b}")),
        (6, b.into()),
        (7, format!("{a} + {b}")),
        (8, format!("2*{c}")),
        (9, c.into()),
        (10, c.into()),
        (11, c.into()),
        (12, format!("{a} + {b} + {c}")),
    ];
    for (id, text) in expected {
        assert_eq!(e.coeff(&[(id, 1)]), poly(&text, 5), "δ{id}");
    }
    assert_eq!(e.delta_support().len(), 12);
}

#[test]
fn homogeneity_examples() {
    let ok = Dag::parse("dag h nvars=3\nnode 1 source x1\nnode 2 source x2\nnode 3 source x3\nnode 4 sub 1 2\nnode 5 mul 3 4\nout 5\n").unwrap();
    let v = ok.check_homogeneous_algorithm().unwrap();
    assert!(v.homogeneous);
    assert_eq!(v.degree, Some(2));
    let bad = Dag::parse("dag b nvars=2\nnode 1 source x1\nnode 2 source x2\nnode 3 mul 1 2\nnode 4 add 3 1\nout 4\n").unwrap();
    assert!(!bad.check_homogeneous_algorithm().unwrap().homogeneous);
}

#[test]
fn text_round_trip() {
    for text in [NAIVE_SUM, THREE_SQUARES, MIXED] {
        let d = dag(text);
        let again = Dag::parse(&d.to_text()).unwrap();
        assert_eq!(again, d);
    }
}

#[test]
fn symbolic_output_matches_rounded_evaluation() {
    let d = dag(MIXED);
    let (sym, ids) = d.symbolic_output(None).unwrap();
    let x = [qf(2, 3), q(-5), qf(7, 2)];
    let deltas: Vec<_> = ids.iter().enumerate().map(|(k, _)| qf(k as i64 + 1, 97)).collect();
    let mut point = x.to_vec();
    point.extend(deltas.iter().cloned());
    let delta = DeltaAssignment::new(qf(1, 2), ids.iter().copied().zip(deltas).collect()).unwrap();
    assert_eq!(sym.eval(&point).unwrap(), d.eval_rounded(&x, &delta).unwrap());
    assert_eq!(sym.nvars(), 3 + ids.len());
    assert_eq!(Polynomial::zero(3).nvars(), 3);
}
