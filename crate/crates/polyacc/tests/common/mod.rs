#![allow(dead_code)]

use polyacc::dominance::ComponentSpec;
use polyacc::{parse_polynomial, Dag, Polynomial};

pub const NAIVE_SUM: &str = "dag naive_sum nvars=3
node 101 source x1
node 102 source x2
node 103 source x3
node 1 add 101 102
node 2 add 1 103
out 2
";

/// x1²x2² + (x2−x3)⁴ + (x3−x4)²x5², the five inputs as nodes 101..105.
pub const THREE_SQUARES: &str = "dag three_squares nvars=5
node 101 source x1
node 102 source x2
node 103 source x3
node 104 source x4
node 105 source x5
node 1 mul 101 101
node 2 mul 102 102
node 3 mul 1 2
node 4 sub 102 103
node 5 mul 4 4
node 6 mul 5 5
node 7 add 3 6
node 8 sub 103 104
node 9 mul 8 8
node 10 mul 105 105
node 11 mul 9 10
node 12 add 7 11
out 12
";

pub const SUM_OF_SQUARES: &str = "dag sum_of_squares nvars=2
node 101 source x1
node 102 source x2
node 1 mul 101 101
node 2 mul 102 102
node 3 add 1 2
out 3
";

/// (x1 − x2)·x3 + x1·(x2 − x3), with a negated edge into the final sum.
pub const MIXED: &str = "dag mixed nvars=3
node 101 source x1
node 102 source x2
node 103 source x3
node 1 sub 101 102
node 2 mul 1 103
node 3 sub 102 103
node 4 mul 101 3
node 5 add 2 -4
out 5
";

pub const MOTZKIN: &str = "x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2*x3^2 + x3^6";

pub fn dag(text: &str) -> Dag {
    Dag::parse(text).expect("corpus DAG parses")
}

pub fn poly(text: &str, n: usize) -> Polynomial {
    parse_polynomial(text, n).expect("corpus polynomial parses")
}

/// Corpus DAGs with a component of their variety to prune along.
pub fn prune_corpus() -> Vec<(Dag, ComponentSpec)> {
    let c = |s: &str| ComponentSpec::parse(s).unwrap();
    vec![
        (dag(THREE_SQUARES), c("zero: x1; chain: x2=x3=x4")),
        (dag(THREE_SQUARES), c("zero: x5; chain: x2=x3")),
        (dag(NAIVE_SUM), c("chain: x1=x2=-x3")),
        (dag(SUM_OF_SQUARES), c("zero: x1,x2")),
        (dag(MIXED), c("chain: x1=x2=x3")),
        (dag(MIXED), c("zero: x1,x3")),
    ]
}

/// Homogeneous polynomials (integer coefficients) fed to the generators.
pub fn homogeneous_corpus() -> Vec<Polynomial> {
    vec![
        poly("x1^2 - x2^2", 2),
        poly("x1^2 + x2^2", 2),
        poly("x1^2*x2^2 + x3^2*x5^2 - 2*x3*x4*x5^2 + x4^2*x5^2", 5),
        poly(MOTZKIN, 3),
        poly("x2^8*x3^12 + x1^2*x2^2*x3^16 + x1^8*x3^12 + x1^6*x2^14 + x1^10*x2^6*x3^4", 3),
        poly("(x1 + x2)*(x1 - x3)*x2", 3),
        poly("3*x1*x2*x3 - 2*x1^3", 3),
        poly("(x2 - x1)*(x3 - x1)*(x3 - x2)", 3),
    ]
}
