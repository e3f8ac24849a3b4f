use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::report::ConstantReport;
use super::sample::trial_rng;

/// Half-width of the sampling box.
pub const KERNEL_BOX: f64 = 2.0;
/// Minimum pairwise distance of a sampled triple.
pub const KERNEL_MIN_SEPARATION: f64 = 1e-6;
/// Exponent lattice for `t`, `t₁`, `t₂`.
pub const T_LATTICE: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

const BLOCK: u64 = 10_000;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Both sides of `||x−z|^{−1} − |y−z|^{−1}| ≲ |x−y|^{1−t₁} ||x−z|^{t₁−2} − |y−z|^{t₁−2}|
/// + |x−y|^{1−t₂} min(|x−z|^{t₂−2}, |y−z|^{t₂−2})` in the plane.
pub fn xyz1_sides(x: [f64; 2], y: [f64; 2], z: [f64; 2], t1: f64, t2: f64) -> (f64, f64) {
    let (a, b, c) = (dist(x, z), dist(y, z), dist(x, y));
    let lhs = (1.0 / a - 1.0 / b).abs();
    let rhs = c.powf(1.0 - t1) * (a.powf(t1 - 2.0) - b.powf(t1 - 2.0)).abs()
        + c.powf(1.0 - t2) * a.powf(t2 - 2.0).min(b.powf(t2 - 2.0));
    (lhs, rhs)
}

/// Left side `|(x−z)/|x−z|² − (y−z)/|y−z|²|` of the vector-kernel bound.
fn kxyz3_lhs(x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> f64 {
    let (a, b) = (dist(x, z), dist(y, z));
    let u = [(x[0] - z[0]) / (a * a), (x[1] - z[1]) / (a * a)];
    let v = [(y[0] - z[0]) / (b * b), (y[1] - z[1]) / (b * b)];
    (u[0] - v[0]).hypot(u[1] - v[1])
}

/// Vector-kernel bound with both terms of homogeneity `−1`:
/// `||x−z|^{−1} − |y−z|^{−1}| + |x−y|^t min(|x−z|^{−1−t}, |y−z|^{−1−t})`.
pub fn kxyz3_sides(x: [f64; 2], y: [f64; 2], z: [f64; 2], t: f64) -> (f64, f64) {
    let (a, b, c) = (dist(x, z), dist(y, z), dist(x, y));
    let rhs = (1.0 / a - 1.0 / b).abs() + c.powf(t) * a.powf(-1.0 - t).min(b.powf(-1.0 - t));
    (kxyz3_lhs(x, y, z), rhs)
}

/// Vector-kernel bound exactly as stated, with terms of homogeneity `−1−t`
/// and `t−1`: `||x−z|^{−1−t} − |y−z|^{−1−t}| + |x−y|^t min(|x−z|^{−1}, |y−z|^{−1})`.
pub fn kxyz3_stated_sides(x: [f64; 2], y: [f64; 2], z: [f64; 2], t: f64) -> (f64, f64) {
    let (a, b, c) = (dist(x, z), dist(y, z), dist(x, y));
    let rhs = (a.powf(-1.0 - t) - b.powf(-1.0 - t)).abs() + c.powf(t) * (1.0 / a).min(1.0 / b);
    (kxyz3_lhs(x, y, z), rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub trials: u64,
    pub xyz1: ConstantReport,
    pub kxyz3: ConstantReport,
    /// The literal, non-homogeneous form; reported, not expected to hold
    /// with a uniform constant.
    pub kxyz3_stated: ConstantReport,
}

fn sample_triple(rng: &mut impl Rng) -> ([f64; 2], [f64; 2], [f64; 2]) {
    loop {
        let mut p = || [rng.random_range(-KERNEL_BOX..KERNEL_BOX), rng.random_range(-KERNEL_BOX..KERNEL_BOX)];
        let (x, y, z) = (p(), p(), p());
        if dist(x, y) > KERNEL_MIN_SEPARATION
            && dist(x, z) > KERNEL_MIN_SEPARATION
            && dist(y, z) > KERNEL_MIN_SEPARATION
        {
            return (x, y, z);
        }
    }
}

/// Samples `trials` triples uniformly from the box and evaluates both kernel
/// lemmas; trial `i` uses exponents from [`T_LATTICE`] indexed by `i`.
pub fn check_kernel_lemmas(seed: u64, trials: u64) -> Result<KernelReport> {
    if trials < 2 {
        return Err(Error::invalid("need at least two trials"));
    }
    let blocks = trials.div_ceil(BLOCK);
    let rows: Vec<Vec<[(f64, f64); 3]>> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = trial_rng(seed, blk);
            let end = ((blk + 1) * BLOCK).min(trials);
            (blk * BLOCK..end)
                .map(|i| {
                    let (x, y, z) = sample_triple(&mut rng);
                    let m = T_LATTICE.len() as u64;
                    let t1 = T_LATTICE[(i % m) as usize];
                    let t2 = T_LATTICE[((i / m) % m) as usize];
                    [xyz1_sides(x, y, z, t1, t2), kxyz3_sides(x, y, z, t1), kxyz3_stated_sides(x, y, z, t1)]
                })
                .collect()
        })
        .collect();
    let mut reports = [
        ConstantReport::new("kernel-xyz1"),
        ConstantReport::new("kernel-kxyz3"),
        ConstantReport::new("kernel-kxyz3-stated"),
    ];
    for sides in rows.iter().flatten() {
        for (r, &(l, rhs)) in reports.iter_mut().zip(sides) {
            r.push(l, rhs);
        }
    }
    for r in &mut reports {
        r.fit(false);
        r.metric("box_half_width", KERNEL_BOX);
        r.metric("min_separation", KERNEL_MIN_SEPARATION);
        r.summarize();
    }
    let [xyz1, kxyz3, kxyz3_stated] = reports;
    Ok(KernelReport { trials, xyz1, kxyz3, kxyz3_stated })
}
