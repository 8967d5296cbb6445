//! Real rational approximation of frequency-dependent linear systems, real
//! linearization pencils and structured implicit time integration.
//!
//! The pipeline is: sample the nonlinear functions `g_j` of a split-form
//! system on the imaginary axis ([`aaa`]), optionally refit with filtered poles
//! and a quadratic polynomial part ([`refit`]), turn the rational surrogate into
//! a real pencil ([`linearize`]) and march `-E x' + A x = b` in time
//! ([`timedomain`]).

pub mod aaa;
pub mod conj;
pub mod error;
pub mod linalg;
pub mod linearize;
pub mod models;
pub mod pipeline;
pub mod refit;
pub mod timedomain;

pub use error::{Error, Result};
pub use num_complex::Complex64;
