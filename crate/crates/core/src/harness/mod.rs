//! Random field generators and empirical checks of the inequalities.
//!
//! Every check draws its samples from [`SampleSpec`] streams, so a report is
//! reproducible bit for bit from the spec. Constants are fitted as the
//! calibration-half maximum times [`FIT_MARGIN`] and validated on the other
//! half.

mod bounds;
mod collapse;
mod dyadic;
mod equivalence;
mod kernel;
mod operators;
mod report;
mod sample;
mod suite;
mod wente;

pub use bounds::{check_harmonic_bound, check_lifting, gen_harmonic, HarmonicReport, LiftReport};
pub use collapse::{collapse_experiment, CollapseReport, CollapseStep};
pub use dyadic::{check_dyadic_blocks, DyadicBlock, DyadicReport, CONSISTENCY_N, MAX_DYADIC_N};
pub use equivalence::{check_frame_estimate, check_uwu_equivalence, lagrange_excess, LAGRANGE_PAIRS};
pub use kernel::{
    check_kernel_lemmas, kxyz3_sides, kxyz3_stated_sides, xyz1_sides, KernelReport, KERNEL_BOX, KERNEL_MIN_SEPARATION,
    T_LATTICE,
};
pub use operators::{
    cell_singularity, check_operator_bounds, riesz_potential_constant, OperatorReport, MAX_OPERATOR_N, MC_TARGET_SE,
    OPERATOR_NAMES,
};
pub use report::{ConstantFit, ConstantReport, McEstimate, FIT_MARGIN, RATIO_FLOOR};
pub use sample::{gen_frame, gen_scalar, gen_unit_field, trial_rng, SampleSpec};
pub use suite::{
    default_lift_radii, run_suite, Suite, SuiteConfig, SuiteReport, FRAME_SMALL_U, HARMONIC_RADIUS, SUITE_T,
    WENTE_ORDERS,
};
pub use wente::{check_wente_constant, SweepPoint, WenteReport, SWEEP_SLACK};

#[cfg(test)]
mod tests;
