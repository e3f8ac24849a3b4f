use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Grid, ScalarField};
use crate::elliptic::{harmonic_extension, SolverOptions};
use crate::error::{Error, Result};
use crate::frames::{frame_from_immersion, stereographic_map};
use crate::sobolev::{frac_normal_energy, gradient_lp_norm, linear_fit};

/// Diagnostics of one scaled immersion `Φ_c = c Φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseStep {
    pub c: f64,
    /// `W_{s,2/s}` of the normal `u`.
    pub energy: f64,
    /// `‖∇Φ_c‖_{L²}`.
    pub grad_l2: f64,
    /// `sup |λ_c − λ_1 − log c|`.
    pub lambda_shift_error: f64,
    /// `max λ^h_c`.
    pub lambda_h_max: f64,
    /// `∫ (λ^h_c)₋`.
    pub lambda_h_negative: f64,
    pub solver_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub s: f64,
    pub n: usize,
    pub baseline: CollapseStep,
    pub steps: Vec<CollapseStep>,
    /// `max |W_c / W_1 − 1|`.
    pub energy_deviation: f64,
    /// `max |‖∇Φ_c‖ / (c ‖∇Φ_1‖) − 1|`.
    pub grad_scaling_error: f64,
    pub lambda_shift_error: f64,
    /// Slope of `∫(λ^h_c)₋` against `−log2 c` over steps with `λ^h_c < 0`.
    pub slope: Option<f64>,
    pub fitted_steps: usize,
    /// Area of the discrete disk times `log 2`.
    pub expected_slope: f64,
    pub slope_relative_error: Option<f64>,
    /// `|slope / (π log 2) − 1|`, the continuum disk.
    pub disk_slope_error: Option<f64>,
}

fn negative_part(f: &ScalarField) -> f64 {
    f.map(|v| (-v).max(0.0)).integrate()
}

fn step(
    grid: &Arc<Grid>,
    c: f64,
    s: f64,
    opts: &SolverOptions,
    base: Option<&ScalarField>,
) -> Result<(CollapseStep, ScalarField)> {
    let phi = stereographic_map(grid.clone()).map(|v| v.map(|x| c * x));
    let data = frame_from_immersion(&phi)?;
    let energy = frac_normal_energy(data.frame.u(), s, 2.0 / s)?.value;
    let ext = harmonic_extension(&data.lambda, opts)?;
    let shift = c.ln();
    let lambda_shift_error = base.map_or(0.0, |b| {
        data.lambda.values().iter().zip(b.values()).map(|(l, b)| (l - b - shift).abs()).fold(0.0, f64::max)
    });
    let st = CollapseStep {
        c,
        energy,
        grad_l2: gradient_lp_norm(&phi, 2.0),
        lambda_shift_error,
        lambda_h_max: ext.solution.max(),
        lambda_h_negative: negative_part(&ext.solution),
        solver_residual: ext.residual,
    };
    Ok((st, data.lambda))
}

/// Scales the stereographic immersion of the unit disk by each `c` and
/// tracks the normal energy, the Dirichlet energy and the negative part of
/// the harmonic part of the conformal factor.
pub fn collapse_experiment(c_list: &[f64], s: f64, n: usize, opts: &SolverOptions) -> Result<CollapseReport> {
    if c_list.is_empty() {
        return Err(Error::invalid("empty scale list"));
    }
    if c_list.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::invalid("scales must be positive and finite"));
    }
    if c_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("scales must be strictly decreasing"));
    }
    let grid = Arc::new(Grid::disk(1.0, n)?);
    let (baseline, base_lambda) = step(&grid, 1.0, s, opts, None)?;
    let steps =
        c_list.iter().map(|&c| step(&grid, c, s, opts, Some(&base_lambda)).map(|r| r.0)).collect::<Result<Vec<_>>>()?;

    let energy_deviation = steps.iter().map(|st| (st.energy / baseline.energy - 1.0).abs()).fold(0.0, f64::max);
    let grad_scaling_error =
        steps.iter().map(|st| (st.grad_l2 / (st.c * baseline.grad_l2) - 1.0).abs()).fold(0.0, f64::max);
    let lambda_shift_error = steps.iter().map(|st| st.lambda_shift_error).fold(0.0, f64::max);

    let (xs, ys): (Vec<f64>, Vec<f64>) =
        steps.iter().filter(|st| st.lambda_h_max < 0.0).map(|st| (-st.c.log2(), st.lambda_h_negative)).unzip();
    let area = grid.len() as f64 * grid.h() * grid.h();
    let expected_slope = area * LN_2;
    let slope = (xs.len() >= 2).then(|| linear_fit(&xs, &ys).1);
    Ok(CollapseReport {
        s,
        n,
        baseline,
        steps,
        energy_deviation,
        grad_scaling_error,
        lambda_shift_error,
        slope,
        fitted_steps: xs.len(),
        expected_slope,
        slope_relative_error: slope.map(|m| (m / expected_slope - 1.0).abs()),
        disk_slope_error: slope.map(|m| (m / (PI * LN_2) - 1.0).abs()),
    })
}
