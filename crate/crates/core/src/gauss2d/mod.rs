//! Exact symbolic-numeric calculus for polynomial-times-Gaussian states on
//! ℝ², specialized to a coupled two-oscillator model with an imaginary
//! drive.
//!
//! States are `P(x)·exp(−½ xᵀQx − Lᵀx)` with explicit coefficient tables;
//! first/second-order differential operators act exactly on the
//! coefficients, inner products are closed-form Gaussian moments (with an
//! independent quadrature route for cross-checks), and the metric acts as
//! an exact complex translation of the arguments.

mod diffop;
mod inner;
mod model;
mod poly;
mod state;

pub use diffop::DiffOp;
pub use inner::{inner, inner_quadrature, inner_quadrature_adaptive, quadrature_gram};
pub use model::{
    annihilation_floor, build_vacua, energy_check, excitation_family, excite, gauss2d_verify,
    model_ops, proportionality, theta_shift, theta_shift_inv, EnergyCheck, ModelOps, ModelParams,
    TaggedPair,
};
pub use poly::PolyTable;
pub use state::{apply_op, translate, GaussPoly, DEFAULT_DEGREE_CAP};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GaussError {
    #[error("malformed state: {0}")]
    Malformed(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error(
        "combined quadratic form is not integrable (leading minor {leading:.3e}, determinant {determinant:.3e})"
    )]
    NotIntegrable { leading: f64, determinant: f64 },

    #[error("polynomial degree {needed} exceeds the cap {cap}")]
    DegreeCap { needed: usize, cap: usize },

    #[error("states are not compatible: {0}")]
    IncompatibleStates(String),
}
