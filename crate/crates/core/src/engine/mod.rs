//! Exact finite-dimensional model of `L_K(𝒢)` for finite acyclic ultragraphs.

pub mod algebra;
pub mod linalg;
pub mod oracle;
pub mod rep;
pub mod scalar;

pub use algebra::{Corner, Element, GeneratorKind, Matrix, MatrixAlgebra, ProbeOutcome, Side, Subspace};
pub use oracle::{cross_check, OracleReport};
pub use rep::{
    build_representation, product_build, PathPairBasis, ProductElement, ProductRepresentation, Representation,
};
pub use scalar::Scalar;
