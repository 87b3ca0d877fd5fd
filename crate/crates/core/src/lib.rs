//! Bloch eigenvalues of odd-order periodic differential operators
//!
//! ```text
//! l(y) = (-i)^n y^(n) + sum_{v=2}^{n} (-i)^(n-v) p_v(x) y^(n-v),   n odd,
//! ```
//!
//! with 1-periodic PT-symmetric coefficients `p_v`, restricted to the
//! quasi-periodic boundary conditions `y^(j)(1) = exp(i pi t) y^(j)(0)`.
//!
//! The crate is organised around the pipeline
//!
//! * [`fourier`] — trigonometric polynomials holding the coefficients,
//! * [`enclosure`] — closed-form localisation regions (disks, strips, rectangles),
//! * [`galerkin`] — the truncated Bloch matrix in the exponential basis and its eigensystem,
//! * [`verify`] — executable checks of the localisation and reality statements,
//! * [`bands`] — quasimomentum sweeps and band classification,
//! * [`config`], [`report`], [`cli`] — configuration, serialisation and command dispatch.

pub mod assignment;
pub mod bands;
pub mod cli;
pub mod config;
pub mod enclosure;
pub mod error;
pub mod fourier;
pub mod galerkin;
pub mod problem;
pub mod report;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
pub use fourier::FourierPoly;
pub use num_complex::Complex64;
pub use problem::ProblemSpec;
