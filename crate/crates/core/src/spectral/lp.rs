use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

use super::field::{freq, spectrum, synthesize, PeriodicField};

/// `exp(1 − 1/(1 − ℓ²))` on `|ℓ| < 1`, zero elsewhere.
fn bump(l: f64) -> f64 {
    if l.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - l * l)).exp()
    }
}

/// Partition profile in log₂ scale: `b(ℓ) = g(ℓ) / Σ_k g(ℓ − k)`.
fn log_profile(l: f64) -> f64 {
    let g = bump(l);
    if g == 0.0 {
        return 0.0;
    }
    let k0 = l.floor();
    // At most two neighbors of ℓ are within distance one.
    let total: f64 = [k0 - 1.0, k0, k0 + 1.0, k0 + 2.0].iter().map(|&k| bump(l - k)).sum();
    g / total
}

/// Annulus profile `ψ(r) = b(log₂ r)`, supported in `(1/2, 2)`, with
/// `Σ_j ψ(2^{−j} r) = 1` for all `r > 0`. Radii are in cycles per unit length.
pub fn lp_profile(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        log_profile(r.log2())
    }
}

/// Levels whose annulus `(2^{j−1}, 2^{j+1})` meets the frequencies present on
/// the lattice, `1/side ≤ |k|/side ≤ √2 (n/2)/side`.
pub fn representable_levels(f: &PeriodicField) -> (i32, i32) {
    let rmin = 1.0 / f.side();
    let rmax = std::f64::consts::SQRT_2 * (f.n() / 2) as f64 / f.side();
    let j_min = (rmin.log2() - 1.0).floor() as i32 + 1;
    let j_max = (rmax.log2() + 1.0).ceil() as i32 - 1;
    (j_min, j_max)
}

fn project_spectrum(spec: &[Complex<f64>], f: &PeriodicField, j: i32) -> Vec<Complex<f64>> {
    let n = f.n();
    let scale = 2f64.powi(-j) / f.side();
    let mut out = spec.to_vec();
    for jj in 0..n {
        for ii in 0..n {
            let (k1, k2) = (freq(ii, n) as f64, freq(jj, n) as f64);
            out[jj * n + ii] *= lp_profile(k1.hypot(k2) * scale);
        }
    }
    out
}

/// Littlewood–Paley piece `f_j`: the transform multiplied by `ψ(2^{−j}|ξ|)`.
pub fn lp_project(f: &PeriodicField, j: i32) -> Result<PeriodicField> {
    let (lo, hi) = representable_levels(f);
    if j < lo || j > hi {
        return Err(Error::invalid(format!("level {j} outside representable range [{lo}, {hi}]")));
    }
    let n = f.n();
    let channels =
        (0..f.channels()).map(|c| synthesize(project_spectrum(&spectrum(f.channel(c), n), f, j), n)).collect();
    PeriodicField::new(f.side(), n, channels)
}

/// All representable pieces; they sum to the zero-mean part of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpDecomposition {
    pub j_min: i32,
    pub j_max: i32,
    pub bands: Vec<PeriodicField>,
}

impl LpDecomposition {
    pub fn band(&self, j: i32) -> Option<&PeriodicField> {
        (j >= self.j_min && j <= self.j_max).then(|| &self.bands[(j - self.j_min) as usize])
    }

    /// `Σ_j f_j`.
    pub fn reconstruct(&self) -> PeriodicField {
        let mut acc = PeriodicField::zeros(self.bands[0].side(), self.bands[0].n(), self.bands[0].channels())
            .expect("valid lattice");
        for b in &self.bands {
            acc = acc.combine(1.0, b, 1.0).expect("same lattice");
        }
        acc
    }
}

pub fn lp_decompose(f: &PeriodicField) -> LpDecomposition {
    let (j_min, j_max) = representable_levels(f);
    let n = f.n();
    let specs: Vec<Vec<Complex<f64>>> = (0..f.channels()).map(|c| spectrum(f.channel(c), n)).collect();
    let bands = (j_min..=j_max)
        .map(|j| {
            let channels = specs.iter().map(|s| synthesize(project_spectrum(s, f, j), n)).collect();
            PeriodicField::new(f.side(), n, channels).expect("finite band")
        })
        .collect();
    LpDecomposition { j_min, j_max, bands }
}

/// Spectral energy fraction above which [`triebel_seminorm`] warns.
pub const TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriebelReport {
    pub value: f64,
    pub s: f64,
    pub p: f64,
    pub j_min: i32,
    pub j_max: i32,
    /// Fraction of the zero-mean spectral energy at `max(|k₁|, |k₂|) ≥ n/4`.
    pub tail_fraction: f64,
    pub warning: Option<String>,
}

/// Fraction of spectral energy (excluding the mean) in the upper half of
/// the resolvable frequencies.
pub fn spectral_tail(f: &PeriodicField) -> f64 {
    let n = f.n();
    let (mut total, mut tail) = (0.0, 0.0);
    for c in 0..f.channels() {
        let spec = spectrum(f.channel(c), n);
        for jj in 0..n {
            for ii in 0..n {
                let (k1, k2) = (freq(ii, n), freq(jj, n));
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                let e = spec[jj * n + ii].norm_sqr();
                total += e;
                if k1.unsigned_abs().max(k2.unsigned_abs()) as usize >= n / 4 {
                    tail += e;
                }
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Homogeneous Triebel seminorm `(Σ_j 2^{jsp} ‖f_j‖_p^p)^{1/p}` over the
/// representable levels, with `2^j` in cycles per unit length. Any real `s`
/// is accepted.
pub fn triebel_seminorm(f: &PeriodicField, s: f64, p: f64) -> Result<TriebelReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("exponent p must lie in (1, inf), got {p}")));
    }
    if !s.is_finite() {
        return Err(Error::invalid("order must be finite"));
    }
    let dec = lp_decompose(f);
    let terms: Vec<f64> = (dec.j_min..=dec.j_max)
        .zip(&dec.bands)
        .map(|(j, b)| 2f64.powf(j as f64 * s * p) * b.lp_norm(p).powf(p))
        .collect();
    let tail_fraction = spectral_tail(f);
    let warning = (tail_fraction > TAIL_TOL)
        .then(|| format!("spectral tail fraction {tail_fraction:e} exceeds {TAIL_TOL:e}; field is under-resolved"));
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    Ok(TriebelReport {
        value: pairwise_sum(&terms).powf(1.0 / p),
        s,
        p,
        j_min: dec.j_min,
        j_max: dec.j_max,
        tail_fraction,
        warning,
    })
}
