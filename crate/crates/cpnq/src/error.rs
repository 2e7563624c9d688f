//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A multi-index degree exceeded the bundle level `m`.
    #[error("multi-index degree {degree} exceeds level m = {level}")]
    DegreeExceedsLevel { degree: u32, level: u32 },

    /// A section or operator was combined with a basis of another dimension.
    #[error("basis dimension mismatch: expected {expected}, got {got}")]
    BasisMismatch { expected: usize, got: usize },

    /// A symbol denominator `⟨ψ_ν, ψ_μ⟩` (or a pullback kernel value) vanished.
    #[error("vanishing kernel denominator at {at}")]
    VanishingKernel { at: String },

    /// An integrand evaluated to NaN or Inf at a quadrature node.
    #[error("integrand is not finite at node {index} ({point})")]
    NonFiniteNode { index: usize, point: String },

    /// The manifold sampling cannot support a pullback space.
    #[error("degenerate manifold sampling: {0}")]
    DegenerateSampling(String),

    /// Orthonormalization of the pullback basis failed.
    #[error("ill-conditioned pullback Gram matrix (condition estimate {cond:.3e})")]
    IllConditionedGram { cond: f64 },

    /// A Monte-Carlo rule was requested without a seed.
    #[error("monte_carlo quadrature requires a seed")]
    MissingSeed,

    /// A path had fewer than two points or non-finite entries.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// Configuration rejected before any computation.
    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI process exit code: 2 for configuration errors, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::MissingSeed | Error::Json(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_split_config_from_numerical_failures() {
        let config = Error::Config {
            field: "x".into(),
            message: "bad".into(),
        };
        assert_eq!(config.exit_code(), 2);
        assert_eq!(Error::MissingSeed.exit_code(), 2);
        let numerical = Error::VanishingKernel { at: "pair".into() };
        assert_eq!(numerical.exit_code(), 3);
        assert_eq!(Error::DegenerateSampling("overlap".into()).exit_code(), 3);
    }
}
