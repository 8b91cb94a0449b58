//! Trajectory-coherent and coherent states of the Caldirola–Kanai damped
//! harmonic oscillator.
//!
//! The crate builds the Gaussian vacuum, its Fock tower and coherent states
//! as polynomial × Gaussian objects, evaluates moments and uncertainty
//! products in closed form, and checks all of it against independent
//! numerical oracles (RK45, Gauss–Hermite quadrature, Schrödinger residuals).

// `!(x > 0.0)` is used on purpose so that NaN is rejected with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Frozen extended-precision oracle values keep all their digits.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod states;
pub mod verify;
mod ode;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
