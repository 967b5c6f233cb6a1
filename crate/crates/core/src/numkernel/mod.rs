//! Dense complex linear-algebra substrate.
//!
//! Everything the domain modules need lives here: the [`Operator`] and
//! [`Ket`] value types (with their JSON wire schema), the [`TolerancePolicy`]
//! that turns relative tolerances into concrete thresholds, numerical null
//! spaces, Hermitian square roots, and biorthogonal eigendecompositions of
//! general (non-normal) complex matrices.

mod decomp;
mod operator;
mod quad;
mod random;
mod tolerance;

pub use decomp::{
    eig_biorthogonal, herm_sqrt, herm_sqrt_pair, hermitian_eigen, null_space, EigBiorthogonal,
};
pub use operator::{canonical_phase, Ket, Operator, C64};
pub use quad::{gauss_legendre, gauss_legendre_on, poisson_cdf, tail_radius};
pub use random::{random_diagonalizable_2x2, random_operator, random_with_condition};
pub use tolerance::TolerancePolicy;

use thiserror::Error;

/// Errors raised by the numerical substrate and propagated by the domain
/// modules.
#[derive(Debug, Clone, Error)]
pub enum NumError {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error(
        "matrix is not positive definite: eigenvalue {eigenvalue:.6e} below threshold {threshold:.3e}"
    )]
    NotPositiveDefinite { eigenvalue: f64, threshold: f64 },

    #[error(
        "defective matrix: eigenvalue gap {gap:.3e} below threshold {threshold:.3e} (coalescing spectrum)"
    )]
    DefectiveMatrix { gap: f64, threshold: f64 },

    #[error("matrix is numerically singular (condition {condition:.3e})")]
    Singular { condition: f64 },

    #[error("expected a one-dimensional kernel, found {found}")]
    KernelDimension { found: usize },
}
