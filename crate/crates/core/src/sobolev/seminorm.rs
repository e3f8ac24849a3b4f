use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{cross, partials, Field, FieldValue, Grid, GridDescriptor, VecField3};
use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// Which functional an [`EnergyReport`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Gagliardo,
    FracNormal,
}

/// How the value was computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    /// `"double-sum"` or `"gradient"` (the `s = 1` convention).
    pub formula: String,
    pub diagonal_excluded: bool,
    /// Ordered node pairs entering the double sum.
    pub pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub functional: Functional,
    pub value: f64,
    pub s: f64,
    pub p: f64,
    pub domain: GridDescriptor,
    pub quadrature: Quadrature,
}

/// Default integrability exponent `p = 2/s`.
pub fn default_p(s: f64) -> f64 {
    2.0 / s
}

fn check_order(s: f64, p: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::invalid(format!("order s must lie in (0, 1], got {s}")));
    }
    if p <= 1.0 || !p.is_finite() {
        return Err(Error::invalid(format!("exponent p must lie in (1, inf), got {p}")));
    }
    Ok(())
}

/// `(|i - i'|, |j - j'|) ↦ |x - y|^{-exponent}` on the lattice; zero at the origin.
fn kernel_table(grid: &Grid, exponent: f64) -> Vec<f64> {
    let n = grid.n();
    let h = grid.h();
    let mut table = vec![0.0; n * n];
    for di in 0..n {
        for dj in 0..n {
            if di + dj > 0 {
                let r = h * ((di * di + dj * dj) as f64).sqrt();
                table[di * n + dj] = r.powf(-exponent);
            }
        }
    }
    table
}

/// `Σ_{x ≠ y} term(f(x), f(y)) |x - y|^{-exponent} h⁴` over ordered pairs of
/// masked nodes, for a symmetric `term`.
pub(crate) fn pair_sum<T, F>(f: &Field<T>, exponent: f64, term: F) -> f64
where
    T: FieldValue,
    F: Fn(&T, &T) -> f64 + Sync,
{
    let grid = f.grid();
    let n = grid.n();
    let h = grid.h();
    let table = kernel_table(grid, exponent);
    let coords: Vec<(i32, i32)> = (0..grid.len()).map(|k| grid.ij(k)).map(|(i, j)| (i as i32, j as i32)).collect();
    let vals = f.values();
    let rows: Vec<f64> = (0..vals.len())
        .into_par_iter()
        .map(|a| {
            let (ia, ja) = coords[a];
            let va = &vals[a];
            let mut chunks = Vec::with_capacity((vals.len() - a) / 32 + 1);
            let mut acc = 0.0;
            let mut count = 0;
            for b in a + 1..vals.len() {
                let (ib, jb) = coords[b];
                let idx = (ia - ib).unsigned_abs() as usize * n + (ja - jb).unsigned_abs() as usize;
                acc += term(va, &vals[b]) * table[idx];
                count += 1;
                if count == 32 {
                    chunks.push(acc);
                    acc = 0.0;
                    count = 0;
                }
            }
            chunks.push(acc);
            pairwise_sum(&chunks)
        })
        .collect();
    2.0 * pairwise_sum(&rows) * h.powi(4)
}

fn pair_count(grid: &Grid) -> u64 {
    let m = grid.len() as u64;
    m * m.saturating_sub(1)
}

/// `(Σ_x |∇f(x)|^p h²)^{1/p}` with `|∇f|` the Frobenius norm over components.
pub fn gradient_lp_norm<T: FieldValue>(f: &Field<T>, p: f64) -> f64 {
    let (d1, d2) = partials(f);
    let h2 = f.grid().h().powi(2);
    let terms: Vec<f64> = d1
        .values()
        .iter()
        .zip(d2.values())
        .map(|(a, b)| {
            let sq = a.dist_sq(&T::zero()) + b.dist_sq(&T::zero());
            sq.powf(p / 2.0) * h2
        })
        .collect();
    pairwise_sum(&terms).powf(1.0 / p)
}

/// Gagliardo seminorm `[f]_{W^{s,p}(Ω)}` over the grid's mask `Ω`.
///
/// For `s < 1` the value is `(Σ_{x≠y} |f(x) − f(y)|^p / |x − y|^{2+sp} h⁴)^{1/p}`;
/// for `s = 1` it is `‖∇f‖_{L^p}`. Restrict the field first to evaluate on a
/// smaller domain.
pub fn gagliardo_seminorm<T: FieldValue>(f: &Field<T>, s: f64, p: f64) -> Result<EnergyReport> {
    check_order(s, p)?;
    let grid = f.grid();
    let (value, quadrature) = if s == 1.0 {
        let q = Quadrature { formula: "gradient".into(), diagonal_excluded: false, pairs: 0 };
        (gradient_lp_norm(f, p), q)
    } else {
        let half = p / 2.0;
        let sum = if half == 1.0 {
            pair_sum(f, 2.0 + s * p, |a: &T, b: &T| a.dist_sq(b))
        } else {
            pair_sum(f, 2.0 + s * p, |a: &T, b: &T| a.dist_sq(b).powf(half))
        };
        let q = Quadrature { formula: "double-sum".into(), diagonal_excluded: true, pairs: pair_count(grid) };
        (sum.powf(1.0 / p), q)
    };
    Ok(EnergyReport { functional: Functional::Gagliardo, value, s, p, domain: grid.descriptor(), quadrature })
}

/// Largest deviation of `|u|` from one.
pub fn unit_defect(u: &VecField3) -> f64 {
    u.values().iter().fold(0.0, |m, v| m.max((crate::domain::norm3(v) - 1.0).abs()))
}

/// Fractional normal-curvature energy
/// `W_{s,p}(u) = Σ_{x≠y} |u(x) ∧ u(y)|^p / |x − y|^{2+sp} h⁴` for a unit field `u`.
pub fn frac_normal_energy(u: &VecField3, s: f64, p: f64) -> Result<EnergyReport> {
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::invalid(format!("frac-normal energy needs s in (1/2, 1), got {s}")));
    }
    check_order(s, p)?;
    let defect = unit_defect(u);
    if defect > 1e-8 {
        return Err(Error::invalid(format!("field is not unit length (max defect {defect:e})")));
    }
    let half = p / 2.0;
    let wedge_sq = |a: &[f64; 3], b: &[f64; 3]| {
        let c = cross(a, b);
        c[0] * c[0] + c[1] * c[1] + c[2] * c[2]
    };
    let value = if half == 1.0 {
        pair_sum(u, 2.0 + s * p, wedge_sq)
    } else {
        pair_sum(u, 2.0 + s * p, |a: &[f64; 3], b: &[f64; 3]| wedge_sq(a, b).powf(half))
    };
    Ok(EnergyReport {
        functional: Functional::FracNormal,
        value,
        s,
        p,
        domain: u.grid().descriptor(),
        quadrature: Quadrature { formula: "double-sum".into(), diagonal_excluded: true, pairs: pair_count(u.grid()) },
    })
}

/// Raw `Σ_{x≠y} |u(x) ∧ u(y)|² / |x − y|^{2+2s} h⁴` without the unit check.
pub(crate) fn wedge_energy_p2(u: &VecField3, s: f64) -> f64 {
    pair_sum(u, 2.0 + 2.0 * s, |a: &[f64; 3], b: &[f64; 3]| {
        let c = cross(a, b);
        c[0] * c[0] + c[1] * c[1] + c[2] * c[2]
    })
}
