use std::f64::consts::PI;

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};

use super::field::{freq, spectrum, synthesize, PeriodicField};

/// Applies `m(ξ₁, ξ₂)` (angular frequencies `ξ = 2π k / side`) to every
/// channel; the zero mode always maps to zero.
pub(crate) fn apply_multiplier(f: &PeriodicField, m: impl Fn(f64, f64, bool) -> Complex<f64>) -> Vec<Vec<f64>> {
    let n = f.n();
    let w = 2.0 * PI / f.side();
    (0..f.channels())
        .map(|c| {
            let mut spec = spectrum(f.channel(c), n);
            for j in 0..n {
                for i in 0..n {
                    let (k1, k2) = (freq(i, n), freq(j, n));
                    let nyquist = i == n / 2 || j == n / 2;
                    let factor = if k1 == 0 && k2 == 0 {
                        Complex::new(0.0, 0.0)
                    } else {
                        m(w * k1 as f64, w * k2 as f64, nyquist)
                    };
                    spec[j * n + i] *= factor;
                }
            }
            synthesize(spec, n)
        })
        .collect()
}

fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::invalid(format!("order must lie in (0, 2), got {s}")));
    }
    Ok(())
}

/// `(−Δ)^{s/2}`: multiplier `|ξ|^s`, mean discarded.
pub fn frac_laplacian(f: &PeriodicField, s: f64) -> Result<PeriodicField> {
    check_order(s)?;
    let out = apply_multiplier(f, |a, b, _| Complex::new(a.hypot(b).powf(s), 0.0));
    PeriodicField::new(f.side(), f.n(), out)
}

/// Riesz potential `I_s = (−Δ)^{−s/2}`: multiplier `|ξ|^{−s}`, zero mode zeroed.
pub fn riesz_potential(f: &PeriodicField, s: f64) -> Result<PeriodicField> {
    check_order(s)?;
    let out = apply_multiplier(f, |a, b, _| Complex::new(a.hypot(b).powf(-s), 0.0));
    PeriodicField::new(f.side(), f.n(), out)
}

/// Vectorial Riesz transform `R = (R₁, R₂)`, multiplier `−iξ/|ξ|`, of a
/// scalar field.
///
/// The odd multiplier has no real-valued extension to the Nyquist row and
/// column, so those modes are zeroed; `R₁² + R₂² = −I` holds on fields
/// without zero-mean or Nyquist content.
pub fn riesz_transform(f: &PeriodicField) -> Result<PeriodicField> {
    if f.channels() != 1 {
        return Err(Error::invalid("Riesz transform takes a scalar field"));
    }
    let comp = |axis: usize| {
        apply_multiplier(f, move |a, b, nyq| {
            if nyq {
                return Complex::new(0.0, 0.0);
            }
            let xi = if axis == 0 { a } else { b };
            Complex::new(0.0, -xi / a.hypot(b))
        })
        .remove(0)
    };
    PeriodicField::new(f.side(), f.n(), vec![comp(0), comp(1)])
}
