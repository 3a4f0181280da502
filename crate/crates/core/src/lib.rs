//! Robust adaptive beamforming toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`array_sim`] generates uniform-linear-array snapshots (with optional
//!   local-coherent-scattering mismatch) and evaluates SINR against analytic
//!   covariance truth.
//! * [`estimators`] holds the exponentially windowed covariance estimates,
//!   the Cholesky factorisation and the complex-to-real embedding used to
//!   express complex quadratic forms as real second-order cones.
//! * [`socp`] is a dense primal-dual interior-point solver for problems of the
//!   form `min pᵀu  s.t.  f + Fᵀu ∈ K`, with `K` a product of second-order and
//!   zero cones.
//! * [`wc`] builds and solves the per-snapshot worst-case CMV and CCM programs.
//! * [`mcg`] contains the O(M²) modified-conjugate-gradient variants with an
//!   alternating Lagrange-multiplier update.
//! * [`harness`] runs Monte-Carlo experiments and writes CSV results.

pub mod array_sim;
pub mod estimators;
pub mod harness;
pub mod linalg;
pub mod mcg;
pub mod socp;
pub mod wc;

mod error;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
