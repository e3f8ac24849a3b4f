use serde::{Deserialize, Serialize};

use crate::domain::{laplacian_interior, ScalarField};
use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// Relative five-point residual accepted as discrete harmonicity.
pub const HARMONIC_TOL: f64 = 1e-8;

/// Quantities of `sup_K f ≤ C₁ ∫_B f₊ − C₂ ∫_B f₋` for one harmonic sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicBound {
    pub k_radius: f64,
    pub sup_k: f64,
    pub int_pos: f64,
    pub int_neg: f64,
    /// Smallest `C₁` with `C₂ = 0`; absent when `∫f₊ = 0`.
    pub c1_alone: Option<f64>,
    /// Largest admissible `C₂` when `f ≤ 0`; absent otherwise.
    pub c2_max: Option<f64>,
}

impl HarmonicBound {
    /// Smallest `C₁` that works together with the given `C₂`, if any does.
    pub fn c1_for(&self, c2: f64) -> Option<f64> {
        let need = self.sup_k + c2 * self.int_neg;
        if self.int_pos > 0.0 {
            Some((need / self.int_pos).max(0.0))
        } else if need <= 0.0 {
            Some(0.0)
        } else {
            None
        }
    }

    pub fn holds(&self, c1: f64, c2: f64) -> bool {
        self.sup_k <= c1 * self.int_pos - c2 * self.int_neg
    }
}

/// Largest relative five-point residual `h² |Δf| / max |f|` over nodes with
/// all four neighbors masked.
pub fn harmonic_defect(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let h2 = grid.h() * grid.h();
    laplacian_interior(f).iter().filter_map(|v| *v).fold(0.0f64, |m, v| m.max(v.abs() * h2 / scale))
}

/// Evaluates both sides of the interior sup bound for a discrete harmonic `f`.
pub fn harmonic_sup_bound_check(f: &ScalarField, k_radius: f64) -> Result<HarmonicBound> {
    let grid = f.grid();
    if !(k_radius > 0.0 && k_radius < grid.radius()) {
        return Err(Error::invalid(format!("K radius must lie in (0, {}), got {k_radius}", grid.radius())));
    }
    let defect = harmonic_defect(f);
    if defect > HARMONIC_TOL {
        return Err(Error::invalid(format!("field is not discrete harmonic (defect {defect:e})")));
    }
    let sup_k = (0..grid.len())
        .filter(|&k| grid.dist_from_center(k) < k_radius)
        .map(|k| f.values()[k])
        .fold(f64::NEG_INFINITY, f64::max);
    if !sup_k.is_finite() {
        return Err(Error::invalid("K contains no grid nodes"));
    }
    let h2 = grid.h() * grid.h();
    let pos: Vec<f64> = f.values().iter().map(|v| v.max(0.0) * h2).collect();
    let neg: Vec<f64> = f.values().iter().map(|v| (-v).max(0.0) * h2).collect();
    let (int_pos, int_neg) = (pairwise_sum(&pos), pairwise_sum(&neg));
    Ok(HarmonicBound {
        k_radius,
        sup_k,
        int_pos,
        int_neg,
        c1_alone: (int_pos > 0.0).then(|| sup_k.max(0.0) / int_pos),
        c2_max: (int_pos == 0.0 && int_neg > 0.0).then(|| -sup_k / int_neg),
    })
}
