//! Curve geometry on the 3-sphere and hyperbolic 3-space: Sym-type
//! reconstruction of flow solutions from spectral frames, frames along given
//! curves, principal curvatures, holonomy, and the flow residual
//! diagnostics.

mod curve;
mod framefield;
mod sym;

pub use curve::{
    curvature_evolution_residual, holonomy, mcf_residual, CurveGrid, PrincipalCurvatures, Space,
};
pub use framefield::{
    connection_residual_s3, frame_field_s3, h_frame_periodic_defect, h_frame_rotate,
    parallel_frame_along_curve, su2_pair_from_frame, OrthoFrameField, ParallelFrame,
};
pub use sym::{sym_curve_s3, sym_curve_h3, SymCurveH3, SymCurveS3};
