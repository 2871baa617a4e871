//! Discrete-resolvent time integrators for linear delay differential equations.
//!
//! The crate realizes two one-step maps for problems of the form
//! `u'(t) = a(t) u(t) + b u(t + tau)` (and a reaction-diffusion variant with a
//! Dirichlet Laplacian on the present state):
//!
//! * implicit Euler, the full resolvent of the product-space generator;
//! * Lie-Trotter splitting, which composes the transport (history shift)
//!   resolvent with an algebraic reaction/delay correction.
//!
//! History is carried either on a uniform grid by a FIFO ring buffer
//! ([`history::RingBuffer`]) or as a sampled segment propagated by the
//! exponential transport kernel ([`history::transport_resolvent_apply`]).
//!
//! Besides the integrators, [`stability`] builds the propagators as finite
//! matrices and computes spectral radius, summability and Ritt profiles and
//! the telescoping/Abel identities; [`oracle`] provides a Fourier-quadrature
//! reference solution; [`harness`] holds the experiment drivers.

pub mod error;
pub mod harness;
pub mod history;
pub mod io;
pub mod oracle;
pub mod pde;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};

/// Threshold below which a step denominator is treated as singular.
pub const EPS_DENOMINATOR: f64 = 1e-12;
