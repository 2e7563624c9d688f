//! Numerical laboratory for Berezin and Odzijewicz-type quantization on
//! `CP^n` and on compact manifolds embedded into it.
//!
//! The crate works on the affine chart `U_0 ≅ C^n` of complex projective
//! space. It builds the level-`m` Hilbert space of polynomial sections with
//! the Fubini-Study weighted inner product, its coherent states and
//! reproducing kernel, Berezin covariant symbols and the star product,
//! pullback Hilbert spaces on embedded manifolds with the quotient norm,
//! and the transition-amplitude / holonomy / metric layer built from the
//! diagonal kernel.
//!
//! Modules map onto the mathematical layers:
//!
//! - [`cpn`] — chart geometry: Kähler potential, Fubini-Study metric,
//!   volume density, Poisson bracket.
//! - [`quadrature`] — weighted integration over the chart and the
//!   normalization constants, with closed-form counterparts in [`exact`].
//! - [`hilbert`] — monomial basis, inner product, coherent states,
//!   reproducing kernel, resolution of identity.
//! - [`berezin`] — covariant symbols, star product, Toeplitz operators,
//!   semiclassical convergence studies.
//! - [`embedding`] — embedded manifolds, pullback spaces, induced
//!   operators and their symbols.
//! - [`odzijewicz`] — transition amplitudes, Monge-Ampère residuals,
//!   discrete and integral holonomy, coherent-state metric.
//! - [`cli`] — batch experiment driver behind the `cpnq` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod berezin;
pub mod cli;
pub mod cpn;
pub mod embedding;
pub mod error;
pub mod exact;
pub mod fit;
pub mod hilbert;
pub mod odzijewicz;
pub mod quadrature;

pub use cpn::{PointU0, QuantizationConfig, SmoothField};
pub use error::Error;
pub use hilbert::{BasisSpec, MultiIndex, SectionVector};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
