use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for {nvars} variables")]
    VarOutOfRange { index: usize, nvars: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("homogeneous degree of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid dag: {0}")]
    Invalid(String),
    #[error("missing delta for node {0}")]
    MissingDelta(u32),
    #[error("unknown node {0}")]
    UnknownNode(u32),
    #[error("unknown black-box op {0:?}")]
    UnknownOp(String),
    #[error("black-box node {0} not supported here")]
    BlackBox(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("point is not on the variety (p(x) = {0})")]
    NotOnVariety(String),
    #[error("malformed derived-variety spec: {0}")]
    MalformedSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("computed polynomial {computed} does not match target {target}")]
    LeafMismatch { computed: String, target: String },
    #[error("unknown sampler {0:?}")]
    UnknownSampler(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominanceError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error("bad component spec: {0}")]
    Spec(String),
    #[error("empty block")]
    EmptyBlock,
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("mixed exponent condition across region generators")]
    MixedExpCond,
    #[error("region fails the exponent ordering condition")]
    ExpCondFails,
    #[error("eta does not select the region: {0}")]
    EtaNotInRegion(String),
    #[error("non-classical node {0} encountered")]
    NonClassical(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("{0}")]
    Precondition(String),
    #[error("inconsistent plans: {0}")]
    InconsistentPlans(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    OutOfRange(String),
    #[error("exact division failed")]
    DivisionFailed,
    #[error("singular diagonal entry at {0}")]
    SingularDiagonal(usize),
}
