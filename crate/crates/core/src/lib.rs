//! logdmod — a symbolic computation engine for coherent logarithmic
//! D-modules on affine idealized log charts.
//!
//! The engine computes characteristic varieties, log dimensions,
//! holonomicity verdicts, Verdier duals, log-perverse membership, and the
//! Gabber/Sato–Kashiwara filtration for finitely presented modules over the
//! logarithmic Weyl algebra of a chart 𝔸ⁿ × Spec k[ℕ^r]/⟨t_j : j ∈ S⟩.
//!
//! Core algebra is generic over the coefficient field through [`scalar::Scalar`];
//! the concrete instantiation used by the frontend and CLI is exact rational
//! arithmetic, via the aliases below.

pub mod chart;
pub mod cli;
pub mod charvar;
pub mod comalg;
pub mod duality;
pub mod error;
pub mod frontend;
pub mod gen;
pub mod mono;
pub mod ncgb;
pub mod opalg;
pub mod perverse;
pub mod scalar;

pub use error::{Error, Result};

/// The coefficient field used by the frontend: exact rationals.
pub type Rat = num_rational::BigRational;
