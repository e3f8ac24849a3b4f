use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use statrs::function::gamma::gamma;

use crate::domain::{laplacian_interior, Field, GridKind, ScalarField};
use crate::error::{Error, Result};
use crate::special::lattice_zeta;

use super::field::fft2;

/// `c_{2,s} = 2^s Γ(1 + s/2) / (π |Γ(−s/2)|)`, the constant making the
/// singular integral agree with the `|ξ|^s` multiplier in the plane.
pub fn frac_laplacian_constant(s: f64) -> f64 {
    2f64.powf(s) * gamma(1.0 + s / 2.0) / (PI * gamma(-s / 2.0).abs())
}

/// Panels per quarter turn in the exterior angular integral.
const ANGULAR_PANELS: usize = 64;

/// `∫₀^{2π} ρ(θ)^{−s} dθ` where `ρ(θ)` is the distance from `x` to the
/// boundary of the square `[a₀, b₀] × [a₁, b₁]` along direction `θ`.
fn exit_distance_integral(x: [f64; 2], lo: [f64; 2], hi: [f64; 2], s: f64) -> f64 {
    // Break the circle at the four corner directions so the integrand is
    // smooth on each arc, then use the composite midpoint rule.
    let corners = [[hi[0], hi[1]], [lo[0], hi[1]], [lo[0], lo[1]], [hi[0], lo[1]]];
    let mut breaks: Vec<f64> = corners.iter().map(|c| (c[1] - x[1]).atan2(c[0] - x[0]).rem_euclid(2.0 * PI)).collect();
    breaks.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in 0..4 {
        let a = breaks[w];
        let b = if w == 3 { breaks[0] + 2.0 * PI } else { breaks[w + 1] };
        let step = (b - a) / ANGULAR_PANELS as f64;
        for q in 0..ANGULAR_PANELS {
            let t = a + (q as f64 + 0.5) * step;
            let (dx, dy) = (t.cos(), t.sin());
            let tx = if dx > 0.0 {
                (hi[0] - x[0]) / dx
            } else if dx < 0.0 {
                (lo[0] - x[0]) / dx
            } else {
                f64::INFINITY
            };
            let ty = if dy > 0.0 {
                (hi[1] - x[1]) / dy
            } else if dy < 0.0 {
                (lo[1] - x[1]) / dy
            } else {
                f64::INFINITY
            };
            total += tx.min(ty).powf(-s) * step;
        }
    }
    total
}

/// Linear convolution of two `n × n` arrays, `(a ⋆ b)(x) = Σ_y a(x − y) b(y)`,
/// where `a` is given on offsets `−(n−1)..=n−1` stored in a `2n × 2n`
/// wrap-around table.
fn convolve_offsets(kernel_hat: &[Complex<f64>], b: &[f64], n: usize) -> Vec<f64> {
    let m = 2 * n;
    let mut buf = vec![Complex::new(0.0, 0.0); m * m];
    for j in 0..n {
        for i in 0..n {
            buf[j * m + i] = Complex::new(b[j * n + i], 0.0);
        }
    }
    fft2(&mut buf, m, false);
    for (x, k) in buf.iter_mut().zip(kernel_hat) {
        *x *= k;
    }
    fft2(&mut buf, m, true);
    let norm = (m * m) as f64;
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            out[j * n + i] = buf[j * m + i].re / norm;
        }
    }
    out
}

/// Direct quadrature of `c_{2,s} p.v.∫ (f(x) − f(y)) / |x − y|^{2+s} dy` on a
/// square grid, with `f` taken to vanish outside the square.
///
/// The lattice sum excludes the diagonal; the mass it misses near the
/// diagonal is restored from the five-point Laplacian and the lattice zeta
/// constant, and the exterior of the square contributes
/// `f(x) ∫_{ext} |x − y|^{−2−s} dy` exactly up to angular quadrature.
pub fn singular_integral_frac_laplacian(f: &ScalarField, s: f64) -> Result<ScalarField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!("order must lie in (0, 1), got {s}")));
    }
    let g = f.grid();
    if g.kind() != GridKind::Square || g.len() != g.n() * g.n() {
        return Err(Error::invalid("singular integral needs a full square grid"));
    }
    let (n, h) = (g.n(), g.h());
    let m = 2 * n;
    let mut kernel = vec![Complex::new(0.0, 0.0); m * m];
    for dj in -(n as isize - 1)..n as isize {
        for di in -(n as isize - 1)..n as isize {
            if di == 0 && dj == 0 {
                continue;
            }
            let r = h * ((di * di + dj * dj) as f64).sqrt();
            let slot = (dj.rem_euclid(m as isize) as usize) * m + di.rem_euclid(m as isize) as usize;
            kernel[slot] = Complex::new(h * h * r.powf(-2.0 - s), 0.0);
        }
    }
    fft2(&mut kernel, m, false);
    let values = f.values();
    let smoothed = convolve_offsets(&kernel, values, n);
    let mass = convolve_offsets(&kernel, &vec![1.0; n * n], n);

    let c = frac_laplacian_constant(s);
    let near = h.powf(2.0 - s) * lattice_zeta(s / 2.0);
    let lap = laplacian_interior(f);
    let [cx, cy] = g.center();
    let (lo, hi) = ([cx - g.radius(), cy - g.radius()], [cx + g.radius(), cy + g.radius()]);
    let out = (0..n * n)
        .map(|k| {
            let v = values[k];
            let exterior = if v == 0.0 { 0.0 } else { v * exit_distance_integral(g.point(k), lo, hi, s) / s };
            let diag = -0.25 * lap[k].unwrap_or(0.0) * near;
            c * (v * mass[k] - smoothed[k] + diag + exterior)
        })
        .collect();
    Field::new(Arc::clone(f.grid_arc()), out)
}
