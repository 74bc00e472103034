//! Exact verification of log Enriques surface configurations.
//!
//! The numerical core ([`linalg`]) is generic over [`Scalar`]; everything
//! that certifies a result runs over [`Rational`].

pub mod cases;
pub mod classify;
pub mod explore;
pub mod formula;
pub mod graph;
pub mod linalg;
pub mod pair;
pub mod scalar;
pub mod symmetry;

pub use cases::{CaseRecord, GenusClass};
pub use classify::{CandidateSet, CaseVerdict};
pub use graph::{CurveVertex, GraphError, Pool, VertexKind, WeightedCurveGraph};
pub use linalg::{LinalgError, Solution, SymMatrix};
pub use pair::{KltVerdict, PairError, PairSolution};
pub use scalar::{Field, Scalar};
pub use symmetry::GraphMorphism;

/// Arbitrary-precision rational numbers.
pub type Rational = num_rational::BigRational;
/// Exact symmetric matrices.
pub type ExactMatrix = SymMatrix<Rational>;
/// Floating-point symmetric matrices, for quick screening only.
pub type FloatMatrix = SymMatrix<f64>;

/// `n/d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
