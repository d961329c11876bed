//! Hodge-star mean curvature flow on the 3-sphere and hyperbolic 3-space via
//! its correspondence with the constant-potential Gross-Pitaevskii equation.
//!
//! The library provides, in rough dependency order:
//!
//! - [`mat2`]: exact 2x2 complex matrix algebra, the quaternion and Hermitian
//!   models of R^4 and R^{1,3}, and Hermitian projections;
//! - [`hierarchy`]: the SU(2) hierarchy recursion, the NLS and GP Lax
//!   connections, gauge equivalence, and zero-curvature residuals;
//! - [`potential`]: periodic grids of the complex potential q(x,t), a Strang
//!   split-step spectral solver, exact solitons, and PDE residuals;
//! - [`frames`]: extended frames E(x,t,lambda) transported along the Lax
//!   connections, with reality-condition enforcement and periodicity checks;
//! - [`geometry`]: Sym-type curve reconstruction on S^3 and H^3, parallel and
//!   h-frames along curves, principal curvatures, holonomy, and the flow
//!   residual diagnostics;
//! - [`backlund`]: algebraic Backlund transformations of potentials, frames,
//!   and curves;
//! - [`cauchy`]: end-to-end Cauchy pipelines from an initial curve to the
//!   evolved flow.

pub mod backlund;
pub mod cauchy;
pub mod error;
pub mod frames;
pub mod geometry;
pub mod hierarchy;
pub mod mat2;
pub mod potential;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
