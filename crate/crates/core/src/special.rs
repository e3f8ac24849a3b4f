//! Zeta-type constants for near-diagonal lattice corrections.

use std::f64::consts::PI;

/// `Σ_{k≥0} (-1)^k a(k)` for completely monotone `a`, by the
/// Cohen–Rodriguez Villegas–Zagier acceleration.
fn alternating_sum(a: impl Fn(f64) -> f64) -> f64 {
    const TERMS: i32 = 40;
    let n = TERMS as f64;
    let mut d = (3.0 + 8f64.sqrt()).powi(TERMS);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut c = -d;
    let mut acc = 0.0;
    for k in 0..TERMS {
        let kf = k as f64;
        c = b - c;
        acc += c * a(kf);
        b *= (kf + n) * (kf - n) / ((kf + 0.5) * (kf + 1.0));
    }
    acc / d
}

/// Riemann zeta for real `s > 0`, `s ≠ 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    let eta = alternating_sum(|k| (k + 1.0).powf(-s));
    eta / (1.0 - 2f64.powf(1.0 - s))
}

/// Dirichlet beta `Σ (-1)^k (2k+1)^{-s}` for real `s > 0`.
pub fn dirichlet_beta(s: f64) -> f64 {
    alternating_sum(|k| (2.0 * k + 1.0).powf(-s))
}

/// `Z(σ) = lim_M ( ∫_{|w|<M} |w|^{-2σ} dw − Σ_{0<|k|<M, k∈ℤ²} |k|^{-2σ} )` for `σ ∈ (0, 1)`.
///
/// The limit is taken in the smoothed sense and equals minus the Epstein zeta
/// function of the square lattice, `-4 ζ(σ) β(σ)`. Multiplied by
/// `h^{2-2σ}` it is the mass a lattice sum misses near the diagonal when
/// integrating `|z|^{-2σ}`.
pub fn lattice_zeta(sigma: f64) -> f64 {
    assert!(sigma > 0.0 && sigma < 1.0, "lattice_zeta needs sigma in (0, 1)");
    -4.0 * riemann_zeta(sigma) * dirichlet_beta(sigma)
}

/// Limit of `(1 − σ) Z(σ)` as `σ → 1`.
pub const LATTICE_ZETA_RESIDUE: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        assert_relative_eq!(riemann_zeta(2.0), PI * PI / 6.0, max_relative = 1e-13);
        assert_relative_eq!(riemann_zeta(0.5), -1.4603545088095868, max_relative = 1e-12);
        assert_relative_eq!(dirichlet_beta(1.0), PI / 4.0, max_relative = 1e-13);
        // Catalan's constant.
        assert_relative_eq!(dirichlet_beta(2.0), 0.915_965_594_177_219, max_relative = 1e-13);
    }

    #[test]
    fn residue_near_one() {
        let s = 1.0 - 1e-6;
        assert_relative_eq!((1.0 - s) * lattice_zeta(s), LATTICE_ZETA_RESIDUE, max_relative = 1e-5);
    }

    // Direct smoothed lattice sum: Σ_k |k|^{-2σ} χ(|k|/M) against the
    // integral of the same, with a C^∞ radial cutoff χ.
    fn smoothed_difference(sigma: f64, m: f64) -> f64 {
        let chi = |r: f64| {
            let t = r / m;
            if t <= 0.5 {
                1.0
            } else if t >= 1.0 {
                0.0
            } else {
                let u = 2.0 * t - 1.0;
                let g = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
                g(1.0 - u) / (g(1.0 - u) + g(u))
            }
        };
        let kmax = m.ceil() as i64;
        let mut sum = 0.0;
        for i in -kmax..=kmax {
            for j in -kmax..=kmax {
                if i == 0 && j == 0 {
                    continue;
                }
                let r = ((i * i + j * j) as f64).sqrt();
                sum += r.powf(-2.0 * sigma) * chi(r);
            }
        }
        // Exact on the plateau, midpoint rule on the transition shell.
        let half = m / 2.0;
        let mut integral = 2.0 * PI * half.powf(2.0 - 2.0 * sigma) / (2.0 - 2.0 * sigma);
        let steps = 200_000;
        let dr = half / steps as f64;
        for q in 0..steps {
            let r = half + (q as f64 + 0.5) * dr;
            integral += 2.0 * PI * r.powf(1.0 - 2.0 * sigma) * chi(r) * dr;
        }
        integral - sum
    }

    #[test]
    fn matches_smoothed_lattice_sum() {
        for sigma in [0.25, 0.6, 0.8] {
            let direct = smoothed_difference(sigma, 120.0);
            assert_relative_eq!(direct, lattice_zeta(sigma), max_relative = 2e-3);
        }
    }
}
