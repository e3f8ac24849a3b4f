use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{norm3, Field, Grid, ScalarField, VecField3};
use crate::error::{Error, Result};
use crate::frames::Frame;

/// Parameters of a random sample stream.
///
/// The stream for trial `i` is a ChaCha8 generator seeded with `seed` on
/// stream `i`, so trials can be generated in any order or in parallel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    /// Fourier coefficients decay like `|k|^{−smoothness}`.
    pub smoothness: f64,
    pub amplitude: f64,
    pub count: usize,
    /// Largest wavenumber `max(|k₁|, |k₂|)` in the random series.
    pub modes: usize,
    /// Nodes per axis of the sampling grid.
    pub n: usize,
}

impl SampleSpec {
    pub fn new(seed: u64, smoothness: f64, amplitude: f64, count: usize) -> Self {
        SampleSpec { seed, smoothness, amplitude, count, modes: 4, n: 32 }
    }

    pub fn with_grid(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_modes(mut self, modes: usize) -> Self {
        self.modes = modes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.smoothness > 1.0 && self.smoothness.is_finite()) {
            return Err(Error::invalid(format!("smoothness must exceed 1, got {}", self.smoothness)));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::invalid("amplitude must be finite"));
        }
        if self.modes == 0 || self.modes > 64 {
            return Err(Error::invalid(format!("modes must lie in 1..=64, got {}", self.modes)));
        }
        if self.n < 8 || self.n > 1024 {
            return Err(Error::invalid(format!("grid size must lie in 8..=1024, got {}", self.n)));
        }
        Ok(())
    }

    /// Unit disk grid with `n` nodes per axis.
    pub fn disk(&self) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::disk(1.0, self.n)?))
    }
}

/// Generator for trial `trial` of the stream seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Random Fourier series `Σ_k (a_k cos πk·x/R + b_k sin πk·x/R) |k|^{−σ}` over
/// a half plane of wavenumbers, scaled to root-mean-square `amplitude`.
pub(crate) fn scalar_from_rng(rng: &mut ChaCha8Rng, spec: &SampleSpec, grid: &Arc<Grid>) -> ScalarField {
    let m = spec.modes as i64;
    let mut terms = Vec::new();
    let mut norm = 0.0;
    for k1 in 0..=m {
        for k2 in -m..=m {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let w = ((k1 * k1 + k2 * k2) as f64).powf(-spec.smoothness / 2.0);
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            norm += w * w;
            terms.push((k1 as f64, k2 as f64, a * w, b * w));
        }
    }
    let scale = spec.amplitude / norm.sqrt();
    let c = grid.center();
    let freq = PI / grid.radius();
    Field::from_fn(Arc::clone(grid), |x| {
        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
        let v: f64 = terms
            .iter()
            .map(|&(k1, k2, a, b)| {
                let ph = freq * (k1 * dx + k2 * dy);
                a * ph.cos() + b * ph.sin()
            })
            .sum();
        scale * v
    })
    .expect("finite series")
}

/// Random smooth scalar field for trial `trial`.
pub fn gen_scalar(spec: &SampleSpec, grid: &Arc<Grid>, trial: u64) -> Result<ScalarField> {
    spec.validate()?;
    Ok(scalar_from_rng(&mut trial_rng(spec.seed, trial), spec, grid))
}

pub(crate) fn unit_from_rng(rng: &mut ChaCha8Rng, spec: &SampleSpec, grid: &Arc<Grid>) -> VecField3 {
    let g: Vec<ScalarField> = (0..3).map(|_| scalar_from_rng(rng, spec, grid)).collect();
    let values = (0..grid.len())
        .map(|k| {
            let v = [g[0].values()[k], g[1].values()[k], 1.0 + g[2].values()[k]];
            let r = norm3(&v);
            // The perturbation is bounded, so r = 0 would need an amplitude
            // large enough to cancel the constant; fall back to the pole.
            if r < 1e-12 {
                [0.0, 0.0, 1.0]
            } else {
                [v[0] / r, v[1] / r, v[2] / r]
            }
        })
        .collect();
    Field::new(Arc::clone(grid), values).expect("finite unit field")
}

/// `(ẑ + g) / |ẑ + g|` for a random smooth vector field `g` of size `amplitude`.
pub fn gen_unit_field(spec: &SampleSpec, grid: &Arc<Grid>, trial: u64) -> Result<VecField3> {
    spec.validate()?;
    Ok(unit_from_rng(&mut trial_rng(spec.seed, trial), spec, grid))
}

fn rot_x(a: f64) -> [[f64; 3]; 3] {
    let (s, c) = a.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

fn rot_y(a: f64) -> [[f64; 3]; 3] {
    let (s, c) = a.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn mat_col(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3], col: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (r, slot) in out.iter_mut().enumerate() {
        *slot = (0..3).map(|k| a[r][k] * b[k][col]).sum();
    }
    out
}

pub(crate) fn frame_from_rng(rng: &mut ChaCha8Rng, spec: &SampleSpec, grid: &Arc<Grid>) -> Result<Frame> {
    let alpha = scalar_from_rng(rng, spec, grid);
    let beta = scalar_from_rng(rng, spec, grid);
    let mut e1 = Vec::with_capacity(grid.len());
    let mut e2 = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let (rx, ry) = (rot_x(alpha.values()[k]), rot_y(beta.values()[k]));
        let a = mat_col(&rx, &ry, 0);
        let b = mat_col(&rx, &ry, 1);
        // Gram–Schmidt against rounding drift.
        let na = norm3(&a);
        let a = [a[0] / na, a[1] / na, a[2] / na];
        let d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let b = [b[0] - d * a[0], b[1] - d * a[1], b[2] - d * a[2]];
        let nb = norm3(&b);
        e1.push(a);
        e2.push([b[0] / nb, b[1] / nb, b[2] / nb]);
    }
    Frame::from_pair(Field::new(Arc::clone(grid), e1)?, Field::new(Arc::clone(grid), e2)?)
}

/// The standard frame rotated at each node by `R_x(α) R_y(β)` for two random
/// smooth angle fields `α, β` of size `amplitude`.
pub fn gen_frame(spec: &SampleSpec, grid: &Arc<Grid>, trial: u64) -> Result<Frame> {
    spec.validate()?;
    frame_from_rng(&mut trial_rng(spec.seed, trial), spec, grid)
}
