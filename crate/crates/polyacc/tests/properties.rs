mod common;

use proptest::prelude::*;

use polyacc::decide::{classical_factors, factor_allowable};
use polyacc::generators::{gen_monomial_sum, gen_motzkin};
use polyacc::rational::{q, qf};
use polyacc::{parse_polynomial, Algorithm, Dag, DeltaAssignment, Polynomial, Q};

use common::*;

const N: usize = 3;

fn arb_poly(max_deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, N), -20i64..=20, 1i64..=6), 0..6).prop_map(|terms| {
        terms.into_iter().fold(Polynomial::zero(N), |acc, (e, n, d)| &acc + &Polynomial::monomial(N, e, qf(n, d)))
    })
}

fn arb_homogeneous(deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((0..=deg, 0..=deg, -9i64..=9), 1..5).prop_map(move |terms| {
        terms.into_iter().fold(Polynomial::zero(N), |acc, (a, b, c)| {
            let (a, b) = (a.min(deg), b.min(deg - a.min(deg)));
            &acc + &Polynomial::monomial(N, vec![a, b, deg - a - b], q(c))
        })
    })
}

fn arb_point() -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((-30i64..=30, 1i64..=7), N).prop_map(|v| v.into_iter().map(|(a, b)| qf(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_is_identity(p in arb_poly(4)) {
        prop_assert_eq!(parse_polynomial(&p.to_string(), N).unwrap(), p);
    }

    #[test]
    fn ring_laws(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2), x in arb_point()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!((&a * &b).eval(&x).unwrap(), a.eval(&x).unwrap() * b.eval(&x).unwrap());
        let id: Vec<Polynomial> = (0..N).map(|i| Polynomial::var(N, i)).collect();
        prop_assert_eq!(a.substitute(&id).unwrap(), a);
    }

    #[test]
    fn monomial_sum_is_exact_at_zero_delta(p in arb_homogeneous(3), x in arb_point()) {
        prop_assume!(!p.is_zero());
        let m = gen_monomial_sum(&p).unwrap();
        prop_assert_eq!(m.dag.extract_polynomial().unwrap(), p.clone());
        let zero = DeltaAssignment::uniform(&qf(1, 8), &m.dag.rounded_ids(), &q(0));
        prop_assert_eq!(m.dag.eval_rounded(&x, &zero).unwrap(), p.eval(&x).unwrap());
        prop_assert_eq!(Dag::parse(&m.dag.to_text()).unwrap(), m.dag);
    }

    #[test]
    fn factorization_reexpands(p in arb_poly(2), picks in prop::collection::vec(0usize..9, 0..4)) {
        let forms = classical_factors(N);
        let mut full = p.clone();
        for k in &picks {
            full = &full * &forms[*k].poly;
        }
        let fz = factor_allowable(&full, &forms);
        prop_assert_eq!(fz.expand(), full.clone());
        if !p.is_zero() {
            prop_assert!(fz.factors.len() >= picks.len());
        }
    }

    #[test]
    fn motzkin_program_is_exact_at_zero_delta(x in arb_point()) {
        let prog = gen_motzkin(1, 3).unwrap();
        let alg = Algorithm::Branch(prog);
        let zero = DeltaAssignment::uniform(&qf(1, 8), &alg.delta_ids(), &q(0));
        prop_assert_eq!(alg.eval_rounded(&x, &zero).unwrap(), poly(MOTZKIN, 3).eval(&x).unwrap());
    }

    #[test]
    fn symbolic_output_agrees_with_rounded_evaluation(x in arb_point(), ds in prop::collection::vec(-8i64..=8, 4)) {
        let d = dag(MIXED);
        let (sym, ids) = d.symbolic_output(None).unwrap();
        let deltas: Vec<Q> = ids.iter().enumerate().map(|(k, _)| qf(ds[k % ds.len()], 64)).collect();
        let mut point = x.clone();
        point.extend(deltas.iter().cloned());
        let delta = DeltaAssignment::new(qf(1, 8), ids.iter().copied().zip(deltas).collect()).unwrap();
        prop_assert_eq!(sym.eval(&point).unwrap(), d.eval_rounded(&x, &delta).unwrap());
    }
}
