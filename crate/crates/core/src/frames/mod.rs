//! Orthonormal frames on the disk: conformal immersions, the connection
//! form, frame rotations, the Coulomb gauge and the continuity argument.

mod conformal;
mod frame;
mod gauge;

pub use conformal::{
    frame_from_immersion, lambda_decomposition, stereographic_immersion, stereographic_map, ConformalData,
    LambdaDecomposition, LambdaDiagnostics, DEGENERATE_TOL,
};
pub use frame::{connection_form, edge_connection, rotate_frame, Frame, FRAME_TOL};
pub use gauge::{
    coulomb_gauge, frpol_roots, gauge_curve, lifting_pipeline, parse_radii, Branch, GaugeCurve, GaugeResult,
    LiftConstants, LiftDiagnostics, LiftOutcome, SmallnessViolation, MAX_RADII,
};

#[cfg(test)]
mod tests;
