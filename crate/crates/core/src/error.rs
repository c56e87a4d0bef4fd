use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The denominator is (numerically) the zero polynomial.
    #[error("zero denominator")]
    ZeroDenominator,

    /// Simultaneous root iteration failed to converge within the cap.
    #[error("root finding did not converge after {iterations} iterations")]
    RootFinding { iterations: u32 },

    /// The input is degenerate for the requested operation.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Evaluation was requested at or too close to a pole.
    #[error("evaluation at or near a pole")]
    PoleProximity,

    /// Map degree exceeds the continuation cap.
    #[error("map degree {degree} exceeds the continuation cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    /// Monodromy continuation could not be completed reliably; the result
    /// is reported as undetermined rather than a possibly wrong verdict.
    #[error("continuation undetermined after retries")]
    Undetermined,

    /// The differential has a nonzero residue, so no rational primitive exists.
    #[error("not an exact differential: residue {residue} at pole {pole}")]
    NotExact {
        pole: Complex64,
        residue: Complex64,
    },

    /// Computed data contradicts an invariant (tolerance failure).
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// A compiled expression exceeds the degree guard.
    #[error("degree {degree} exceeds the compile guard {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
}
