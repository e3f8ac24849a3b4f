//! Nonlocal double-sum functionals: Gagliardo seminorms, the fractional
//! normal-curvature energy, the inversion extension and the `s → 1` limit.
//!
//! All double sums run over ordered pairs of distinct masked nodes with
//! weight `h⁴` and node-center distances; the diagonal is excluded.

mod bbm;
mod extension;
mod seminorm;

pub use bbm::{bbm_limit, linear_fit, BbmReport, BbmSample};
pub use extension::{inversion_extension, sample_bilinear};
pub use seminorm::{
    default_p, frac_normal_energy, gagliardo_seminorm, gradient_lp_norm, unit_defect, EnergyReport, Functional,
    Quadrature,
};

#[cfg(test)]
mod tests;
