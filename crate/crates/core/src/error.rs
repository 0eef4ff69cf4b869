use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("polytope is not full-dimensional")]
    DegeneratePolytope,
    #[error("polytope has a vertex with a negative coordinate; normalize it first")]
    NotNormalized,
    #[error("point {0:?} is not a vertex of the polytope")]
    NotAVertex(Vec<Rational>),
    #[error("polytope is not Delzant: {0}")]
    NotDelzant(String),
    #[error("unknown catalog name `{0}`")]
    UnknownCatalogName(String),
    #[error("kernel support is missing the origin or a unit vector: {0:?}")]
    MissingOriginVertex(Vec<u32>),
    #[error("kernel has symbolic coefficients")]
    SymbolicKernel,
    #[error("no value assigned to unknown `{0}`")]
    MissingAssignment(String),
    #[error("determinant expansion limited to n <= {max}, got {n}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("sample point must have strictly positive coordinates")]
    NonPositiveSamplePoint,
    #[error("moment map input must have strictly positive coordinates")]
    NonPositiveInput,
    #[error("kernel support does not match the lattice points of the polytope")]
    SupportMismatch,
    #[error("no Einstein normalization with c_i <= {0}")]
    NotFound(u32),
    #[error("q * c_i is not a positive integer for factor {0}")]
    NonIntegralMultiple(usize),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
