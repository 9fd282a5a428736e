mod common;

use std::collections::BTreeSet;

use polyacc::dominance::*;
use polyacc::rational::{q, qf};
use polyacc::{DagBuilder, Polynomial};

use common::*;

const CONE_EXAMPLE: &str = "x2^8*x3^12 + x1^2*x2^2*x3^16 + x1^8*x3^12 + x1^6*x2^14 + x1^10*x2^6*x3^4";

fn spec(text: &str) -> ComponentSpec {
    ComponentSpec::parse(text).unwrap()
}

#[test]
fn standard_change_counts() {
    assert_eq!(enumerate_standard_changes(&spec("zero: x1"), 2).unwrap().len(), 1);
    assert_eq!(enumerate_standard_changes(&spec("chain: x1=x2"), 2).unwrap().len(), 2);
    assert!(enumerate_standard_changes(&spec("zero: x3"), 2).is_err());
}

#[test]
fn changes_are_invertible() {
    let p = poly("x1^2*x2 - x3^3 + x1*x2*x3", 3);
    for text in ["zero: x1,x2", "chain: x1=-x2=x3", "zero: x1; chain: x2=x3"] {
        for c in enumerate_standard_changes(&spec(text), 3).unwrap() {
            let back = transformed(&p, &c).unwrap().substitute(&c.to_original()).unwrap();
            assert_eq!(back, p, "{}", c.describe());
        }
    }
}

#[test]
fn support_projections() {
    let p = poly(CONE_EXAMPLE, 3);
    let keys: BTreeSet<Vec<u32>> = p.support_projection(&[0, 1]).unwrap().keys().cloned().collect();
    let want: BTreeSet<Vec<u32>> =
        [vec![0, 8], vec![2, 2], vec![8, 0], vec![6, 14], vec![10, 6]].into_iter().collect();
    assert_eq!(keys, want);
    let m = poly(MOTZKIN, 3);
    let keys: Vec<Vec<u32>> = m.support_projection(&[2]).unwrap().keys().cloned().collect();
    assert_eq!(keys, vec![vec![0], vec![2], vec![6]]);
    let parts = p.support_projection(&[0, 1]).unwrap();
    assert_eq!(Polynomial::reassemble(3, &[0, 1], &parts), p);
}

#[test]
fn cone_example_facets() {
    let p = poly(CONE_EXAMPLE, 3);
    let regions = dominance_regions(&p, &[0, 1]).unwrap();
    let facets: BTreeSet<Vec<Vec<u32>>> = regions.iter().filter(|r| r.facet).map(|r| r.lambda.clone()).collect();
    let want: BTreeSet<Vec<Vec<u32>>> =
        [vec![vec![0, 8], vec![2, 2]], vec![vec![2, 2], vec![8, 0]]].into_iter().collect();
    assert_eq!(facets, want);
    // interior generators select exactly their face
    let lambdas: Vec<Vec<u32>> = p.support_projection(&[0, 1]).unwrap().keys().cloned().collect();
    for r in &regions {
        assert_eq!(argmin(&lambdas, &r.generator), r.lambda);
    }
}

#[test]
fn sum_of_squares_has_one_facet() {
    let regions = dominance_regions(&poly("x1^2 + x2^2", 2), &[0, 1]).unwrap();
    let facets: Vec<_> = regions.iter().filter(|r| r.facet).collect();
    assert_eq!(facets.len(), 1);
    assert_eq!(facets[0].generator, vec![1, 1]);
    assert_eq!(regions.len(), 3);
}

#[test]
fn single_monomial_has_one_region() {
    let regions = dominance_regions(&poly("x1^3*x2", 2), &[0, 1]).unwrap();
    assert_eq!(regions.len(), 1);
    assert!(!regions[0].facet);
}

#[test]
fn widened_cone_membership() {
    let cone = WidenedCone::from_slopes((1, 2), (2, 3));
    assert!(cone.contains(&[qf(1, 8), qf(1, 4)]));
    assert!(!cone.contains(&[qf(1, 1024), qf(1, 2)]));
    assert!(cone.contains_eta(&[3, 2]));
    assert!(!cone.contains_eta(&[1, 3]));
    assert!(WidenedCone::full(2).contains(&[q(1), q(-1)]));
}

#[test]
fn three_squares_dominant_term() {
    let p = poly("x1^2*x2^2 + (x2 - x3)^4 + (x3 - x4)^2*x5^2", 5);
    let changes = enumerate_standard_changes(&spec("zero: x1; chain: x2=x3=x4"), 5).unwrap();
    let c = changes.iter().find(|c| c.groups.iter().any(|g| g.rep == 1)).unwrap();
    let block = c.block();
    let lambdas: Vec<Vec<u32>> = transformed(&p, c).unwrap().support_projection(&block).unwrap().keys().cloned().collect();
    let lambda = argmin(&lambdas, &vec![1; block.len()]);
    assert_eq!(dominant_term(&p, c, &lambda).unwrap(), poly("x1^2*x2^2 + (x3 - x4)^2*x5^2", 5));
}

#[test]
fn prune_keeps_an_already_dominant_program() {
    let d = dag(SUM_OF_SQUARES);
    let change = &enumerate_standard_changes(&spec("zero: x1,x2"), 2).unwrap()[0];
    let r = prune(&d, change, &[1, 1]).unwrap();
    assert!(r.deletions.is_empty() && r.redirections.is_empty());
    assert_eq!(r.dag.extract_polynomial().unwrap(), poly("x1^2 + x2^2", 2));
}

#[test]
fn prune_drops_the_vanishing_summand() {
    let mut b = DagBuilder::new("t", 2);
    let (x1, x2) = (b.source(0), b.source(1));
    let s = b.add(x1, x2);
    let m = b.mul(s, x2);
    let d = b.finish(m);
    let change = &enumerate_standard_changes(&spec("zero: x1"), 2).unwrap()[0];
    let r = prune(&d, change, &[1]).unwrap();
    assert_eq!(r.deletions.len(), 1);
    assert_eq!(r.dag.extract_polynomial().unwrap(), poly("x2^2", 2));
    assert!(prune(&d, change, &[1, 1]).is_err());
}

#[test]
fn pruning_yields_the_dominant_term() {
    for (text, component, eta) in [(THREE_SQUARES, "zero: x1; chain: x2=x3=x4", vec![1, 1, 1]), (MIXED, "zero: x1,x3", vec![1, 1])] {
        let d = dag(text);
        let p = d.extract_polynomial().unwrap();
        let change = &enumerate_standard_changes(&spec(component), d.nvars).unwrap()[0];
        let lambdas: Vec<Vec<u32>> =
            transformed(&p, change).unwrap().support_projection(&change.block()).unwrap().keys().cloned().collect();
        let dom = dominant_term(&p, change, &argmin(&lambdas, &eta)).unwrap();
        let r = prune(&d, change, &eta).unwrap();
        assert_eq!(r.dag.extract_polynomial().unwrap(), dom, "{text}");
    }
}
