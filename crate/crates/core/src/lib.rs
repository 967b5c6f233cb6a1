//! Finite-dimensional ladder-operator systems built on biorthogonal bases.
//!
//! The crate constructs and verifies three families of non-self-adjoint
//! operator systems, together with the dense linear algebra they need:
//!
//! * [`pseudofermion`] — deformed two-level ladder pairs `(a, b)` with
//!   `{a,b} = 1`, `a² = b² = 0`, their vacua, metric operators and the
//!   similarity mapping them onto canonical fermions;
//! * [`epf`] — extended ladder pairs acting on an arbitrary linearly
//!   independent basis of an `(M+1)`-dimensional space, with dual family,
//!   number operators and anticommutator diagnostics;
//! * [`dpb`] — truncated Fock-space realizations of deformed boson pairs
//!   `[a, b] = 1` obtained by similarity from the canonical pair, with
//!   bi-coherent states and a quadrature resolution of the identity;
//! * [`gauss2d`] — an exact polynomial-times-Gaussian calculus on ℝ² for a
//!   coupled two-oscillator model with complex shift metric.
//!
//! [`numkernel`] provides the shared substrate (complex dense operators,
//! eigen/singular decompositions, Hermitian square roots, tolerance
//! policies) and [`report`] the uniform pass/fail residual reporting.

pub mod dpb;
pub mod epf;
pub mod gauss2d;
pub mod numkernel;
pub mod pseudofermion;
pub mod report;

pub use numkernel::{Ket, NumError, Operator, TolerancePolicy, C64};
pub use report::{CheckEntry, VerificationReport};
