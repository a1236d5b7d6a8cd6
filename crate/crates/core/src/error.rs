use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("τ = {0} is not in the upper half-plane")]
    InvalidTau(Complex64),

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("matrix ({a},{b};{c},{d}) has determinant {det}, expected 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i64 },

    #[error("series coefficient fields differ")]
    FieldMismatch,

    #[error("operation requires an exact-field series")]
    ExactFieldRequired,

    #[error("q-exponent {n} outside the truncation window 0..={order}")]
    OutOfWindow { n: i64, order: usize },

    #[error("row 0 of the series is not an invertible constant")]
    NotAUnit,

    #[error("form `{0}` carries no normalized series")]
    MissingSeries(String),

    #[error("z = {0} is a lattice point (pole of the Weierstrass zeta function)")]
    LatticePole(Complex64),

    #[error("function vanishes near the contour after {retries} re-basings")]
    NearZeroOnContour { retries: usize },

    #[error("function is identically zero on the slice")]
    IdenticallyZero,

    #[error("contour integral {integral} is not within 0.01 of an integer (residual {residual})")]
    NonIntegralWinding { integral: Complex64, residual: f64 },

    #[error("denominator φ_X' is zero")]
    ZeroDenominator,

    #[error("invalid embedding input: {0}")]
    InvalidEmbedding(String),

    #[error("component {index} has ord_q = {ord} < 0")]
    InequalityViolation { index: usize, ord: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
