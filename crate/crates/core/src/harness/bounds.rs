use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Field;
use crate::elliptic::{harmonic_extension, harmonic_sup_bound_check, HarmonicBound, SolverOptions};
use crate::error::{Error, Result};
use crate::frames::{gauge_curve, lifting_pipeline, Branch, LiftConstants, LiftOutcome};
use crate::sobolev::{default_p, gagliardo_seminorm};

use super::report::{ConstantReport, FIT_MARGIN};
use super::sample::{frame_from_rng, trial_rng, SampleSpec};

/// Fitted `(C₁, C₂)` of `sup_K f ≤ C₁ ∫f₊ − C₂ ∫f₋` and their validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicReport {
    pub k_radius: f64,
    pub trials: usize,
    pub c1: f64,
    pub c2: f64,
    pub margin: f64,
    pub calibration_trials: usize,
    pub validation_trials: usize,
    pub validation_violations: usize,
    /// Samples with `f ≤ 0` everywhere, which pin down `C₂`.
    pub nonpositive_samples: usize,
    pub samples: Vec<HarmonicBound>,
}

/// Harmonic function on the disk grid with boundary trace
/// `a₀ + A Σ_k (a_k cos kθ + b_k sin kθ) / k^{smoothness}`, `a₀` uniform in
/// `[−1.5, 1.5]` and `a_k, b_k` uniform in `[−1, 1]`.
pub fn gen_harmonic(spec: &SampleSpec, trial: u64, opts: &SolverOptions) -> Result<crate::domain::ScalarField> {
    spec.validate()?;
    let grid = spec.disk()?;
    let mut rng = trial_rng(spec.seed, trial);
    let a0 = rng.random_range(-1.5..=1.5);
    let coeffs: Vec<(f64, f64)> =
        (0..spec.modes).map(|_| (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))).collect();
    let trace = Field::from_fn(Arc::clone(&grid), |x| {
        let th = x[1].atan2(x[0]);
        a0 + spec.amplitude
            * coeffs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let k = (i + 1) as f64;
                    (a * (k * th).cos() + b * (k * th).sin()) / k.powf(spec.smoothness)
                })
                .sum::<f64>()
    })?;
    Ok(harmonic_extension(&trace, opts)?.solution)
}

/// Fits `(C₁, C₂)` on the first half of the samples and validates on the rest.
///
/// `C₂` is the smallest admissible value over the non-positive calibration
/// samples divided by the margin; `C₁` is then the largest requirement over
/// the calibration samples times the margin.
pub fn check_harmonic_bound(spec: &SampleSpec, k_radius: f64, opts: &SolverOptions) -> Result<HarmonicReport> {
    spec.validate()?;
    let samples = (0..spec.count as u64)
        .into_par_iter()
        .map(|trial| harmonic_sup_bound_check(&gen_harmonic(spec, trial, opts)?, k_radius))
        .collect::<Result<Vec<_>>>()?;
    let half = samples.len() / 2;
    let (cal, val) = samples.split_at(half);
    let c2 = cal.iter().filter_map(|b| b.c2_max).fold(f64::INFINITY, f64::min);
    let c2 = if c2.is_finite() { c2 / FIT_MARGIN } else { 0.0 };
    let mut c1 = 0.0f64;
    for b in cal {
        match b.c1_for(c2) {
            Some(v) => c1 = c1.max(v),
            None => return Err(Error::invalid("calibration sample admits no C1; lower C2")),
        }
    }
    let c1 = c1 * FIT_MARGIN;
    let validation_violations = val.iter().filter(|b| !b.holds(c1, c2)).count();
    Ok(HarmonicReport {
        k_radius,
        trials: samples.len(),
        c1,
        c2,
        margin: FIT_MARGIN,
        calibration_trials: cal.len(),
        validation_trials: val.len(),
        validation_violations,
        nonpositive_samples: samples.iter().filter(|b| b.c2_max.is_some()).count(),
        samples,
    })
}

/// Continuity-argument statistics over random frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub s: f64,
    pub radii: Vec<f64>,
    pub trials: usize,
    /// `max f(r) / (f(r)² + ε²)` over the calibration half.
    pub calibration_max: f64,
    pub constants: LiftConstants,
    pub epsilon_threshold: f64,
    pub epsilons: Vec<f64>,
    /// Fraction of trials with `ε < 1/(2C)`.
    pub small_fraction: f64,
    pub lower: usize,
    pub upper: usize,
    pub indeterminate: usize,
    pub smallness_violated: usize,
    pub lower_fraction: f64,
    /// `‖⟨ẽ₁,∇ẽ₂⟩‖_{L²} / ε²` per trial, fitted.
    pub c_prime: ConstantReport,
    /// `‖⟨ẽ₁,∇ẽ₂⟩‖_{L²} / ε^{2/s}` per trial, fitted.
    pub c_prime_alt: ConstantReport,
}

/// Calibrates the continuity constant `C` from the gauge curves of the
/// first half of the frames, then runs the lifting pipeline on all of them.
pub fn check_lifting(spec: &SampleSpec, s: f64, radii: &[f64], opts: &SolverOptions) -> Result<LiftReport> {
    spec.validate()?;
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::invalid(format!("s must lie in (1/2, 1), got {s}")));
    }
    let grid = spec.disk()?;
    let p = default_p(s);
    let frames = (0..spec.count as u64)
        .into_par_iter()
        .map(|trial| frame_from_rng(&mut trial_rng(spec.seed, trial), spec, &grid))
        .collect::<Result<Vec<_>>>()?;
    let half = frames.len() / 2;
    let calibration_max = frames[..half]
        .par_iter()
        .map(|frame| {
            let eps = gagliardo_seminorm(frame.u(), s, p)?.value;
            let curve = gauge_curve(frame, radii, opts)?;
            Ok(curve.f_values.iter().map(|f| f / (f * f + eps * eps)).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if calibration_max <= 0.0 {
        return Err(Error::invalid("calibration frames are all flat; C is undetermined"));
    }
    let constants = LiftConstants::new(calibration_max * FIT_MARGIN);
    let outcomes = frames
        .par_iter()
        .map(|frame| lifting_pipeline(frame, s, radii, &constants, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut report = LiftReport {
        s,
        radii: radii.to_vec(),
        trials: frames.len(),
        calibration_max,
        constants,
        epsilon_threshold: constants.epsilon_threshold(),
        epsilons: Vec::new(),
        small_fraction: 0.0,
        lower: 0,
        upper: 0,
        indeterminate: 0,
        smallness_violated: 0,
        lower_fraction: 0.0,
        c_prime: ConstantReport::new("lift-connection-vs-eps2"),
        c_prime_alt: ConstantReport::new("lift-connection-vs-eps2/s"),
    };
    for outcome in outcomes {
        match outcome {
            LiftOutcome::Lifted(d) => {
                match d.branch {
                    Branch::Lower => report.lower += 1,
                    Branch::Upper => report.upper += 1,
                    Branch::Indeterminate => report.indeterminate += 1,
                }
                report.c_prime.push(d.connection_norm, d.epsilon * d.epsilon);
                report.c_prime_alt.push(d.connection_norm, d.epsilon.powf(2.0 / s));
                report.epsilons.push(d.epsilon);
            }
            LiftOutcome::SmallnessViolated(v) => {
                report.smallness_violated += 1;
                report.epsilons.push(v.epsilon);
            }
        }
    }
    report.c_prime.fit(false);
    report.c_prime_alt.fit(false);
    let n = report.trials.max(1) as f64;
    report.small_fraction = report.epsilons.iter().filter(|&&e| e < report.epsilon_threshold).count() as f64 / n;
    report.lower_fraction = report.lower as f64 / n;
    Ok(report)
}
