//! Exact verification engine for the two-dimensional nonlinear sigma model at
//! one loop: truncated jet algebra on target manifolds, Lie-algebra
//! cohomology, finite-dimensional Wick/BV calculus, heat-kernel divergence
//! bookkeeping, and the counterterm pipeline that ties the one-loop
//! renormalization-group coefficient to the Ricci tensor.
//!
//! All computations are over exact rationals; floating point appears only in
//! report rendering and the quadrature cross-checks.

pub mod algebra;
pub mod error;
pub mod geometry;
pub mod lie;
pub mod linalg;
pub mod oneloop;
pub mod regulators;
pub mod report;
pub mod wick;

pub use error::{Error, Result};
