use rand::Rng;
use rayon::prelude::*;

use crate::domain::{cross, norm3};
use crate::error::{Error, Result};
use crate::frames::connection_form;
use crate::sobolev::{default_p, frac_normal_energy, gagliardo_seminorm};

use super::report::ConstantReport;
use super::sample::{frame_from_rng, trial_rng, unit_from_rng, SampleSpec};

/// Random node pairs drawn for the pointwise Lagrange split, over all trials.
pub const LAGRANGE_PAIRS: usize = 1_000_000;

/// Relative slack in pointwise and trivial-direction comparisons.
const ROUNDOFF: f64 = 1e-12;

/// `|a − b| ≤ |a ∧ b| + ½|a − b|²` for unit vectors; returns the excess of
/// the left side over the right.
pub fn lagrange_excess(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dn = norm3(&d);
    dn - (norm3(&cross(a, b)) + 0.5 * dn * dn)
}

/// Two-sided comparison of `[u]_{W^{s,2/s}}` with `W_{s,2/s}(u)^{s/2}` on
/// random unit fields.
///
/// Ratios are `[u] / W^{s/2}`, fitted two-sided. Metrics record the trivial
/// direction `W ≤ ‖u‖_∞^{2/s} [u]^{2/s}` (which must hold on every trial)
/// and the pointwise Lagrange split on [`LAGRANGE_PAIRS`] random node pairs.
pub fn check_uwu_equivalence(spec: &SampleSpec, s: f64) -> Result<ConstantReport> {
    spec.validate()?;
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::invalid(format!("s must lie in (1/2, 1), got {s}")));
    }
    let grid = spec.disk()?;
    let p = default_p(s);
    let pairs_per_trial = LAGRANGE_PAIRS.div_ceil(spec.count.max(1));
    // (seminorm, W^{1/p}, trivial direction holds, Lagrange failures, worst excess)
    type Row = (f64, f64, bool, usize, f64);
    let rows: Vec<Result<Row>> = (0..spec.count as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(spec.seed, trial);
            let u = unit_from_rng(&mut rng, spec, &grid);
            let semi = gagliardo_seminorm(&u, s, p)?.value;
            let w = frac_normal_energy(&u, s, p)?.value;
            let sup = u.values().iter().map(norm3).fold(0.0, f64::max);
            let trivial_ok = w <= sup.powf(p) * semi.powf(p) * (1.0 + ROUNDOFF) + ROUNDOFF;
            let (mut bad, mut worst) = (0, f64::NEG_INFINITY);
            let vals = u.values();
            for _ in 0..pairs_per_trial {
                let a = rng.random_range(0..vals.len());
                let b = rng.random_range(0..vals.len());
                let e = lagrange_excess(&vals[a], &vals[b]);
                worst = worst.max(e);
                if e > ROUNDOFF {
                    bad += 1;
                }
            }
            Ok((semi, w.powf(1.0 / p), trivial_ok, bad, worst))
        })
        .collect();
    let mut report = ConstantReport::new("uwu-equivalence");
    let (mut trivial_failures, mut lagrange_bad, mut lagrange_worst) = (0, 0, f64::NEG_INFINITY);
    let mut max_semi = 0.0f64;
    for row in rows {
        let (semi, w, ok, bad, worst) = row?;
        report.push(semi, w);
        max_semi = max_semi.max(semi);
        trivial_failures += usize::from(!ok);
        lagrange_bad += bad;
        lagrange_worst = lagrange_worst.max(worst);
    }
    report.fit(true);
    report.metric("s", s);
    report.metric("p", p);
    report.metric("max_seminorm", max_semi);
    report.metric("trivial_direction_failures", trivial_failures as f64);
    report.metric("lagrange_pairs", (pairs_per_trial * spec.count) as f64);
    report.metric("lagrange_violations", lagrange_bad as f64);
    report.metric("lagrange_max_excess", lagrange_worst);
    Ok(report)
}

/// `[e₁] + [e₂] ≲ ‖⟨e₁,∇e₂⟩‖_{L²} + [u] + [u]([e₁] + [e₂])` on random frames.
///
/// Trials with `[u] ≤ small_u` also enter the simplified bound
/// `[e₁] + [e₂] ≲ ‖⟨e₁,∇e₂⟩‖_{L²} + [u]`, reported in the metrics.
pub fn check_frame_estimate(spec: &SampleSpec, s: f64, small_u: f64) -> Result<ConstantReport> {
    spec.validate()?;
    if !(s > 0.5 && s <= 1.0) {
        return Err(Error::invalid(format!("s must lie in (1/2, 1], got {s}")));
    }
    let grid = spec.disk()?;
    let p = default_p(s);
    let rows: Vec<Result<[f64; 4]>> = (0..spec.count as u64)
        .into_par_iter()
        .map(|trial| {
            let frame = frame_from_rng(&mut trial_rng(spec.seed, trial), spec, &grid)?;
            let e1 = gagliardo_seminorm(frame.e1(), s, p)?.value;
            let e2 = gagliardo_seminorm(frame.e2(), s, p)?.value;
            let u = gagliardo_seminorm(frame.u(), s, p)?.value;
            let conn = connection_form(&frame).l2_norm();
            Ok([e1, e2, u, conn])
        })
        .collect();
    let mut report = ConstantReport::new("frame-estimate");
    let mut simplified = ConstantReport::new("frame-estimate-small-u");
    for row in rows {
        let [e1, e2, u, conn] = row?;
        report.push(e1 + e2, conn + u + u * (e1 + e2));
        if u <= small_u {
            simplified.push(e1 + e2, conn + u);
        }
    }
    report.fit(false);
    report.metric("s", s);
    report.metric("small_u", small_u);
    report.metric("small_u_trials", simplified.trials as f64);
    report.metric("small_u_max_ratio", simplified.max_ratio.unwrap_or(0.0));
    report.metric("small_u_violations", simplified.violations as f64);
    Ok(report)
}
