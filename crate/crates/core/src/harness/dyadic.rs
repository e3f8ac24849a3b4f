use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{lp_decompose, PeriodicField};
use crate::sum::pairwise_sum;

use super::operators::{cell_singularity, MC_TARGET_SE};
use super::report::{ConstantReport, McEstimate};
use super::sample::{trial_rng, SampleSpec};

/// Largest torus grid for the block estimates.
pub const MAX_DYADIC_N: usize = 64;
/// Grid of the exact consistency check.
pub const CONSISTENCY_N: usize = 16;
/// Bands are indexed in cycles per unit, so the wavelength `2^{−j}` meets
/// the distance `2^{−k}` in angular terms at `k = j + log2 2π`.
const DIAGONAL_SHIFT: f64 = 2.651_496_129_472_319;
/// Coarser distance shells wrap around the unit torus.
const MIN_FIT_LEVEL: i32 = 2;
const BATCH: usize = 500;
const MAX_PAIRS: usize = 4000;

/// One block `Ĩ_{j,k}` with its two bounds (constants omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicBlock {
    pub trial: usize,
    pub j: i32,
    pub k: i32,
    pub value: f64,
    pub std_error: f64,
    /// `‖h_j‖_{L^p}`.
    pub band_norm: f64,
    /// `2^{(k−j)s} 2^{j(s−t)} ‖h_j‖`.
    pub bound_coarse: f64,
    /// `2^{(j−k)(t−s)} 2^{j(s−t)} ‖h_j‖`.
    pub bound_fine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicReport {
    pub s: f64,
    pub t: f64,
    pub p: f64,
    pub n: usize,
    pub blocks: Vec<DyadicBlock>,
    /// `Ĩ_{j,k} / min(bounds)`, fitted.
    pub ratios: ConstantReport,
    /// Decay per level of the normalized blocks in `|k − j − log2 2π|`.
    pub rate: f64,
    /// Same, restricted to distances below the wavelength; bound `t − s`.
    pub rate_fine: f64,
    /// Same, restricted to distances above the wavelength; bound `s`.
    pub rate_coarse: f64,
    /// `min(s, t − s)`.
    pub expected_rate: f64,
    /// `(∫∫|T h|^p/|x−y|^{2+sp})^{1/p} / (Σ_k (Σ_j Ĩ_{j,k})^p)^{1/p}` on the
    /// small grid; at most one by Minkowski's inequality.
    pub consistency_ratio: f64,
    pub max_relative_se: f64,
}

/// Random zero-mean trigonometric polynomial on the unit torus with
/// coefficients decaying like `|k|^{−smoothness}`, wavenumbers up to `modes`.
fn periodic_sample(rng: &mut ChaCha8Rng, spec: &SampleSpec, n: usize) -> Result<PeriodicField> {
    let m = spec.modes as i64;
    let mut terms = Vec::new();
    for k1 in 0..=m {
        for k2 in -m..=m {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let w = ((k1 * k1 + k2 * k2) as f64).powf(-spec.smoothness / 2.0);
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            terms.push((k1 as f64, k2 as f64, a * w * spec.amplitude, b * w * spec.amplitude));
        }
    }
    PeriodicField::from_fn(1.0, n, |x| {
        terms
            .iter()
            .map(|&(k1, k2, a, b)| {
                let ph = 2.0 * PI * (k1 * x[0] + k2 * x[1]);
                a * ph.cos() + b * ph.sin()
            })
            .sum()
    })
}

/// Periodic lattice geometry of the unit torus with `n = 2^N` nodes per axis.
struct Torus {
    n: usize,
    h: f64,
    /// `|d h|^{t−2}` on minimal-image offsets, cell mean at `d = 0`.
    kernel: Vec<f64>,
}

impl Torus {
    fn new(n: usize, t: f64) -> Self {
        let h = 1.0 / n as f64;
        let mut kernel = vec![0.0; n * n];
        for dj in 0..n {
            for di in 0..n {
                let (a, b) = (Self::wrap(di, n) as f64, Self::wrap(dj, n) as f64);
                let r = h * a.hypot(b);
                kernel[dj * n + di] =
                    if r == 0.0 { h.powf(t - 2.0) * cell_singularity(2.0 - t) } else { r.powf(t - 2.0) };
            }
        }
        Torus { n, h, kernel }
    }

    fn wrap(d: usize, n: usize) -> isize {
        let d = d as isize;
        if d >= n as isize / 2 {
            d - n as isize
        } else {
            d
        }
    }

    fn diff(&self, a: usize, b: usize) -> usize {
        let n = self.n;
        let (ai, aj, bi, bj) = (a % n, a / n, b % n, b / n);
        ((aj + n - bj) % n) * n + (ai + n - bi) % n
    }

    /// `T(h)(x, y) h^{-2}` for each band in `bands`, accumulated into `out`.
    fn t_values(&self, x: usize, y: usize, bands: &[Vec<f64>], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for z in 0..self.n * self.n {
            let w = (self.kernel[self.diff(x, z)] - self.kernel[self.diff(y, z)]).abs();
            for (o, b) in out.iter_mut().zip(bands) {
                *o += w * b[z];
            }
        }
    }

    /// Offsets `d` (as lattice ids) with `2^{2m−1} ≤ |d|² < 2^{2m+1}` in lattice
    /// units, i.e. `|x − y| ≈ 2^{m} h`.
    fn shell(&self, m: i32) -> Vec<usize> {
        let (lo, hi) = (2f64.powi(2 * m - 1), 2f64.powi(2 * m + 1));
        (0..self.n * self.n)
            .filter(|&l| {
                let (a, b) = (Self::wrap(l % self.n, self.n), Self::wrap(l / self.n, self.n));
                let d2 = (a * a + b * b) as f64;
                d2 > 0.0 && lo <= d2 && d2 < hi
            })
            .collect()
    }

    fn shift(&self, x: usize, d: usize) -> usize {
        let n = self.n;
        ((x / n + d / n) % n) * n + (x % n + d % n) % n
    }

    fn dist(&self, d: usize) -> f64 {
        let (a, b) = (Self::wrap(d % self.n, self.n) as f64, Self::wrap(d / self.n, self.n) as f64);
        self.h * a.hypot(b)
    }

    /// Distance levels `k` (so `|x − y| ≈ 2^{−k}`) whose shells are nonempty.
    fn levels(&self) -> Vec<(i32, Vec<usize>)> {
        let big = self.n.trailing_zeros() as i32;
        (0..=big).rev().map(|m| (big - m, self.shell(m))).filter(|(_, s)| !s.is_empty()).collect()
    }
}

/// Block norms `Ĩ_{j,k}` of `T(h_j)`, exactly when `pairs ≥ N |shell|`,
/// otherwise by uniform pair sampling within the shell.
fn block_values(
    torus: &Torus,
    bands: &[Vec<f64>],
    s: f64,
    p: f64,
    rng: &mut ChaCha8Rng,
    pairs: usize,
) -> Vec<(i32, Vec<McEstimate>)> {
    let nn = torus.n * torus.n;
    let h4 = torus.h.powi(4);
    torus
        .levels()
        .into_iter()
        .map(|(k, shell)| {
            let total = nn * shell.len();
            let mut samples: Vec<Vec<f64>> = vec![Vec::new(); bands.len()];
            let mut buf = vec![0.0; bands.len()];
            let mut push = |x: usize, d: usize, samples: &mut Vec<Vec<f64>>| {
                let y = torus.shift(x, d);
                torus.t_values(x, y, bands, &mut buf);
                let r = torus.dist(d);
                for (smp, v) in samples.iter_mut().zip(&buf) {
                    smp.push((v * torus.h * torus.h).abs().powf(p) / r.powf(2.0 + s * p));
                }
            };
            if total <= pairs {
                for x in 0..nn {
                    for &d in &shell {
                        push(x, d, &mut samples);
                    }
                }
                let est = samples
                    .iter()
                    .map(|v| {
                        let sum = pairwise_sum(v) * h4;
                        McEstimate { mean: sum.powf(1.0 / p), std_error: 0.0, samples: v.len() }
                    })
                    .collect();
                return (k, est);
            }
            loop {
                for _ in 0..BATCH {
                    let x = rng.random_range(0..nn);
                    let d = shell[rng.random_range(0..shell.len())];
                    push(x, d, &mut samples);
                }
                let raw: Vec<McEstimate> = samples.iter().map(|v| McEstimate::from_samples(v)).collect();
                let worst = raw.iter().map(McEstimate::relative_error).fold(0.0, f64::max);
                if worst <= MC_TARGET_SE || samples[0].len() >= pairs {
                    // Ĩ = (N |S| h⁴ mean)^{1/p}; the relative error shrinks by 1/p.
                    let est = raw
                        .iter()
                        .map(|e| {
                            let v = (e.mean * total as f64 * h4).powf(1.0 / p);
                            McEstimate { mean: v, std_error: v * e.relative_error() / p, samples: e.samples }
                        })
                        .collect();
                    return (k, est);
                }
            }
        })
        .collect()
}

/// Dyadic-block decay of `T(h)(x,y) = ∫ ||x−z|^{t−2} − |y−z|^{t−2}| h(z) dz`
/// on the unit torus, with exponent `p = 2`.
pub fn check_dyadic_blocks(spec: &SampleSpec, s: f64, t: f64) -> Result<DyadicReport> {
    spec.validate()?;
    if !(0.0 < s && s < t && t < 1.0) {
        return Err(Error::invalid(format!("need 0 < s < t < 1, got s = {s}, t = {t}")));
    }
    let n = spec.n;
    if !n.is_power_of_two() || !(CONSISTENCY_N..=MAX_DYADIC_N).contains(&n) {
        return Err(Error::invalid(format!(
            "dyadic checks need a power-of-two n in {CONSISTENCY_N}..={MAX_DYADIC_N}, got {n}"
        )));
    }
    let p = 2.0;
    let torus = Torus::new(n, t);
    let per_trial = (0..spec.count)
        .into_par_iter()
        .map(|trial| -> Result<Vec<DyadicBlock>> {
            let mut rng = trial_rng(spec.seed, trial as u64);
            let h = periodic_sample(&mut rng, spec, n)?;
            let dec = lp_decompose(&h);
            let mut levels = Vec::new();
            let mut bands = Vec::new();
            let total = h.lp_norm(p);
            for (j, b) in (dec.j_min..=dec.j_max).zip(&dec.bands) {
                let norm = b.lp_norm(p);
                if norm > 1e-12 * total || total == 0.0 {
                    levels.push((j, norm));
                    bands.push(b.channel(0).to_vec());
                }
            }
            let blocks = block_values(&torus, &bands, s, p, &mut rng, MAX_PAIRS);
            let mut out = Vec::new();
            for (k, ests) in blocks {
                for (&(j, band_norm), e) in levels.iter().zip(ests) {
                    let base = 2f64.powf(j as f64 * (s - t)) * band_norm;
                    out.push(DyadicBlock {
                        trial,
                        j,
                        k,
                        value: e.mean,
                        std_error: e.std_error,
                        band_norm,
                        bound_coarse: 2f64.powf((k - j) as f64 * s) * base,
                        bound_fine: 2f64.powf((j - k) as f64 * (t - s)) * base,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let blocks: Vec<DyadicBlock> = per_trial.into_iter().flatten().collect();

    let mut ratios = ConstantReport::new("dyadic-block");
    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    let mut pooled = Vec::new();
    let mut max_se = 0.0f64;
    for b in &blocks {
        ratios.push(b.value, b.bound_coarse.min(b.bound_fine));
        if b.value > 0.0 {
            max_se = max_se.max(b.std_error / b.value);
        }
        if b.value <= 0.0 || b.k < MIN_FIT_LEVEL {
            continue;
        }
        let y = (b.value / (2f64.powf(b.j as f64 * (s - t)) * b.band_norm)).log2();
        let offset = b.k as f64 - b.j as f64 - DIAGONAL_SHIFT;
        let key = (b.trial, b.j);
        pooled.push((offset.abs(), key, y));
        if offset >= 0.0 {
            fine.push((offset, key, y));
        } else {
            coarse.push((-offset, key, y));
        }
    }
    ratios.fit(false);
    let rate = -pooled_slope(&pooled);
    let rate_fine = -pooled_slope(&fine);
    let rate_coarse = -pooled_slope(&coarse);

    let consistency_ratio = consistency(spec, s, t, p)?;
    Ok(DyadicReport {
        s,
        t,
        p,
        n,
        blocks,
        ratios,
        rate,
        rate_fine,
        rate_coarse,
        expected_rate: s.min(t - s),
        consistency_ratio,
        max_relative_se: max_se,
    })
}

/// Common slope of `y` against `x` with a separate intercept per
/// `(trial, band)` group.
fn pooled_slope(points: &[(f64, (usize, i32), f64)]) -> f64 {
    let mut groups: BTreeMap<(usize, i32), Vec<(f64, f64)>> = BTreeMap::new();
    for &(x, key, y) in points {
        groups.entry(key).or_default().push((x, y));
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for g in groups.values().filter(|g| g.len() >= 2) {
        let mx = g.iter().map(|p| p.0).sum::<f64>() / g.len() as f64;
        let my = g.iter().map(|p| p.1).sum::<f64>() / g.len() as f64;
        for (x, y) in g {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
    }
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::NAN
    }
}

/// Exact comparison of the full double integral with the block sums on the
/// small torus.
fn consistency(spec: &SampleSpec, s: f64, t: f64, p: f64) -> Result<f64> {
    let n = CONSISTENCY_N;
    let torus = Torus::new(n, t);
    let mut rng = trial_rng(spec.seed, u64::MAX);
    let h = periodic_sample(&mut rng, spec, n)?;
    let dec = lp_decompose(&h);
    let bands: Vec<Vec<f64>> = dec.bands.iter().map(|b| b.channel(0).to_vec()).collect();
    let whole = vec![h.channel(0).to_vec()];
    let exact = usize::MAX;
    let blocks = block_values(&torus, &bands, s, p, &mut rng, exact);
    let full = block_values(&torus, &whole, s, p, &mut rng, exact);
    let full_p: f64 = full.iter().map(|(_, e)| e[0].mean.powf(p)).sum();
    let blocks_p: f64 = blocks.iter().map(|(_, e)| e.iter().map(|x| x.mean).sum::<f64>().powf(p)).sum();
    Ok(if blocks_p == 0.0 { 0.0 } else { (full_p / blocks_p).powf(1.0 / p) })
}
