//! Exact polynomial algebra, rounded-arithmetic DAGs, and decision procedures for
//! accurate evaluation under the (1+δ) rounding model.

pub mod cli;
pub mod dag;
pub mod decide;
pub mod dominance;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod sim;

pub use dag::{Algorithm, BranchProgram, Dag, DagBuilder, DeltaAssignment, ErrorExpansion, Ref};
pub use error::*;
pub use parse::{parse_point, parse_polynomial};
pub use poly::{Monomial, Polynomial};
pub use rational::Q;
