use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{dot, jacobian, laplacian_interior, norm3, partials, Field, Grid, ScalarField, VecField3};
use crate::elliptic::{dirichlet_norm, harmonic_extension, harmonic_sup_bound_check, HarmonicBound, SolverOptions};
use crate::error::{Error, Result};
use crate::sobolev::{default_p, gagliardo_seminorm};
use crate::sum::pairwise_sum;

use super::frame::Frame;

/// Smallest admissible `|∂₁Φ|`.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// An immersion with its conformal factor and frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalData {
    pub phi: VecField3,
    /// `λ = log |∂₁Φ|`.
    pub lambda: ScalarField,
    pub frame: Frame,
    /// `max_x (| |∂₁Φ| − |∂₂Φ| | + |∂₁Φ·∂₂Φ| / |∂₁Φ|) / |∂₁Φ|`.
    pub conformality_residual: f64,
}

/// Orthonormal pair closest to `(a, b)`: `J (JᵀJ)^{-1/2}` with `J = [a, b]`.
fn polar_pair(a: &[f64; 3], b: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let (g11, g12, g22) = (dot(a, a), dot(a, b), dot(b, b));
    let det = (g11 * g22 - g12 * g12).sqrt();
    let t = (g11 + g22 + 2.0 * det).sqrt();
    // S = (G + √det I) / t is the square root of G.
    let (s11, s12, s22) = ((g11 + det) / t, g12 / t, (g22 + det) / t);
    let sdet = s11 * s22 - s12 * s12;
    let (i11, i12, i22) = (s22 / sdet, -s12 / sdet, s11 / sdet);
    let e1 = [0, 1, 2].map(|c| a[c] * i11 + b[c] * i12);
    let e2 = [0, 1, 2].map(|c| a[c] * i12 + b[c] * i22);
    // One Gram–Schmidt pass removes the rounding left by the closed form.
    let n1 = norm3(&e1);
    let e1 = e1.map(|x| x / n1);
    let p = dot(&e1, &e2);
    let e2 = [0, 1, 2].map(|c| e2[c] - p * e1[c]);
    let n2 = norm3(&e2);
    (e1, e2.map(|x| x / n2))
}

/// Conformal factor and frame of an immersion `Φ`.
///
/// `e₁, e₂` is the orthonormal polar factor of `[∂₁Φ, ∂₂Φ]`, which equals
/// `∂_αΦ / |∂_αΦ|` for an exactly conformal map and is rotation-equivariant
/// otherwise; `u = e₁ ∧ e₂` and `λ = log |∂₁Φ|`.
pub fn frame_from_immersion(phi: &VecField3) -> Result<ConformalData> {
    let (d1, d2) = partials(phi);
    let n = phi.len();
    let mut e1 = Vec::with_capacity(n);
    let mut e2 = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let (a, b) = (&d1.values()[k], &d2.values()[k]);
        let (na, nb) = (norm3(a), norm3(b));
        if na < DEGENERATE_TOL || nb < DEGENERATE_TOL {
            return Err(Error::invalid(format!("degenerate immersion at node {k}")));
        }
        let (x, y) = polar_pair(a, b);
        if !(x.iter().chain(&y).all(|v| v.is_finite())) {
            return Err(Error::invalid(format!("degenerate immersion at node {k}")));
        }
        residual = residual.max(((na - nb).abs() + dot(a, b).abs() / na) / na);
        e1.push(x);
        e2.push(y);
        lambda.push(na.ln());
    }
    let grid = phi.grid_arc().clone();
    let frame = Frame::from_pair(Field::new(grid.clone(), e1)?, Field::new(grid.clone(), e2)?)?;
    Ok(ConformalData { phi: phi.clone(), lambda: Field::new(grid, lambda)?, frame, conformality_residual: residual })
}

/// Inverse stereographic projection `Φ(x) = (2x, |x|² − 1) / (1 + |x|²)`.
pub fn stereographic_map(grid: Arc<Grid>) -> VecField3 {
    VecField3::from_fn(grid, |[x, y]| {
        let q = 1.0 + x * x + y * y;
        [2.0 * x / q, 2.0 * y / q, (x * x + y * y - 1.0) / q]
    })
    .expect("finite map")
}

/// Conformal data of the inverse stereographic projection; `e^λ = 2 / (1 + |x|²)`.
pub fn stereographic_immersion(grid: Arc<Grid>) -> Result<ConformalData> {
    frame_from_immersion(&stereographic_map(grid))
}

/// Diagnostics of the split `λ = λ⁰ + λ^h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaDiagnostics {
    /// `‖∇λ⁰‖_{L²}` (zero-Dirichlet edge norm).
    pub grad_lambda0: f64,
    pub s: f64,
    /// `[e₁]_{W^{s,2/s}} [e₂]_{W^{s,2/s}}`, the Wente-type bound for `‖∇λ⁰‖`.
    pub wente_rhs: f64,
    /// `max |Δλ⁰ + ⟨∇⊥e₁, ∇e₂⟩|` over nodes at lattice depth ≥ 3.
    pub identity_residual: f64,
    /// `∫_B e^{2|λ⁰|}`.
    pub moser_trudinger: f64,
    /// Interior sup bound data for `λ^h` on `B(0, r)`.
    pub harmonic: HarmonicBound,
    pub harmonic_residual: f64,
}

/// `λ⁰`, `λ^h` and their diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaDecomposition {
    pub lambda0: ScalarField,
    pub lambda_h: ScalarField,
    pub diagnostics: LambdaDiagnostics,
}

/// Splits `λ` into the harmonic extension `λ^h` of its trace and the
/// remainder `λ⁰ = λ − λ^h`, which vanishes on the mask edge and satisfies
/// `Δλ⁰ = −⟨∇⊥e₁, ∇e₂⟩` for a conformal frame.
pub fn lambda_decomposition(
    data: &ConformalData,
    s: f64,
    k_radius: f64,
    opts: &SolverOptions,
) -> Result<LambdaDecomposition> {
    let ext = harmonic_extension(&data.lambda, opts)?;
    let lambda_h = ext.solution;
    let lambda0 = data.lambda.sub(&lambda_h)?;
    let grid = data.lambda.grid();

    let jac = jacobian(data.frame.e1(), data.frame.e2())?;
    let lap = laplacian_interior(&lambda0);
    let identity_residual = (0..grid.len())
        .filter(|&k| grid.is_interior(k, 3))
        .filter_map(|k| lap[k].map(|l| (l + jac.values()[k]).abs()))
        .fold(0.0, f64::max);

    let p = default_p(s);
    let wente_rhs = gagliardo_seminorm(data.frame.e1(), s, p)?.value * gagliardo_seminorm(data.frame.e2(), s, p)?.value;
    let h2 = grid.h() * grid.h();
    let mt: Vec<f64> = lambda0.values().iter().map(|v| (2.0 * v.abs()).exp() * h2).collect();
    let harmonic = harmonic_sup_bound_check(&lambda_h, k_radius)?;
    Ok(LambdaDecomposition {
        diagnostics: LambdaDiagnostics {
            grad_lambda0: interior_dirichlet_norm(&lambda0),
            s,
            wente_rhs,
            identity_residual,
            moser_trudinger: pairwise_sum(&mt),
            harmonic,
            harmonic_residual: ext.residual,
        },
        lambda0,
        lambda_h,
    })
}

/// `‖∇λ⁰‖` for a field vanishing on the mask edge: the Dirichlet norm of its
/// restriction to the non-edge nodes.
fn interior_dirichlet_norm(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let inner = Arc::new(grid.submask(|l| grid.index_of_lattice(l).is_some_and(|k| !grid.is_edge(k))));
    if inner.is_empty() {
        return 0.0;
    }
    dirichlet_norm(&f.restrict_to(&inner).expect("subgrid"))
}
