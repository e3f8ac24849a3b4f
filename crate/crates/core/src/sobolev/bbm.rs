use serde::{Deserialize, Serialize};

use crate::domain::{cross, partials, VecField3};
use crate::error::{Error, Result};
use crate::special::lattice_zeta;
use crate::sum::pairwise_sum;

use super::seminorm::wedge_energy_p2;

/// One sample order of the `s → 1` study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BbmSample {
    pub s: f64,
    /// `(1 − s) W_{s,2}(u)` including the near-diagonal correction.
    pub weighted: f64,
    /// `(1 − s)` times the bare off-diagonal double sum.
    pub weighted_raw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BbmReport {
    pub samples: Vec<BbmSample>,
    /// `W_{1,2}(u) = ‖u ∧ ∇u‖²_{L²}`.
    pub gradient_energy: f64,
    /// Intercept at `s = 1` of the linear fit of `weighted` against `1 − s`.
    pub limit: f64,
    pub slope: f64,
    /// `limit / gradient_energy`; absent when the gradient energy vanishes.
    pub constant: Option<f64>,
}

/// Weighted energies `(1 − s) W_{s,2}(u)` for `s` approaching one and their
/// linear extrapolation to `s = 1`.
///
/// At fixed spacing the off-diagonal lattice sum misses the near-diagonal
/// mass, which carries all of the limit. Each sample therefore adds the
/// first-order correction `Σ_x h² ½(|u ∧ ∂₁u|² + |u ∧ ∂₂u|²) · h^{2−2s} Z(s)`
/// with `Z` from [`lattice_zeta`]; the bare sums are reported alongside.
pub fn bbm_limit(u: &VecField3, s_list: &[f64]) -> Result<BbmReport> {
    if s_list.len() < 4 {
        return Err(Error::invalid(format!("need at least 4 orders, got {}", s_list.len())));
    }
    if let Some(bad) = s_list.iter().find(|&&s| !(s > 0.5 && s < 1.0)) {
        return Err(Error::invalid(format!("orders must lie in (1/2, 1), got {bad}")));
    }
    let mut sorted = s_list.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("orders must be distinct"));
    }
    let grid = u.grid();
    let h = grid.h();
    let (d1, d2) = partials(u);
    let density: Vec<f64> = (0..u.len())
        .map(|k| {
            let v = &u.values()[k];
            let a = cross(v, &d1.values()[k]);
            let b = cross(v, &d2.values()[k]);
            (a.iter().map(|x| x * x).sum::<f64>() + b.iter().map(|x| x * x).sum::<f64>()) * h * h
        })
        .collect();
    let gradient_energy = pairwise_sum(&density);

    let samples: Vec<BbmSample> = s_list
        .iter()
        .map(|&s| {
            let raw = wedge_energy_p2(u, s);
            let correction = 0.5 * gradient_energy * h.powf(2.0 - 2.0 * s) * lattice_zeta(s);
            BbmSample { s, weighted: (1.0 - s) * (raw + correction), weighted_raw: (1.0 - s) * raw }
        })
        .collect();

    let xs: Vec<f64> = samples.iter().map(|q| 1.0 - q.s).collect();
    let ys: Vec<f64> = samples.iter().map(|q| q.weighted).collect();
    let (limit, slope) = linear_fit(&xs, &ys);
    let constant = (gradient_energy > 1e-14).then(|| limit / gradient_energy);
    Ok(BbmReport { samples, gradient_energy, limit, slope, constant })
}

/// Least-squares `y ≈ a + b x`; returns `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mx, b)
}
