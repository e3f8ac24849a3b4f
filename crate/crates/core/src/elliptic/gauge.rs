use std::sync::Arc;

use crate::domain::{Field, Grid, VecField2};
use crate::error::Result;

use super::cg::conjugate_gradient;
use super::poisson::{BoundaryKind, SolveReport, SolverOptions};

/// Lattice edges `(a, b)` between masked nodes, `b` one step right of or
/// above `a`, with the axis of the step.
pub fn lattice_edges(grid: &Grid) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for a in 0..grid.len() {
        if let Some(b) = grid.neighbor(a, 1, 0) {
            out.push((a, b, 0));
        }
        if let Some(b) = grid.neighbor(a, 0, 1) {
            out.push((a, b, 1));
        }
    }
    out
}

/// Edge circulation `ω_e = h (g(a) + g(b))·e / 2` of a vector field.
fn circulation(g: &VecField2, edges: &[(usize, usize, usize)]) -> Vec<f64> {
    let h = g.grid().h();
    let v = g.values();
    edges.iter().map(|&(a, b, ax)| 0.5 * h * (v[a][ax] + v[b][ax])).collect()
}

/// `Bᵀw`: net edge flow into each node.
fn edge_divergence(n: usize, edges: &[(usize, usize, usize)], w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (&(a, b, _), &x) in edges.iter().zip(w) {
        out[b] += x;
        out[a] -= x;
    }
    out
}

/// Result of the discrete gauge minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannReport {
    /// `θ` with zero mean, plus solver statistics.
    pub solve: SolveReport,
    /// `min_θ ‖∇θ + g‖_{L²}` in the edge discretization.
    pub min_value: f64,
    /// `‖∇θ + g‖` at `θ = 0` in the same discretization.
    pub competitor: f64,
    /// `‖Bᵀ(Bθ + ω)‖_∞ / ‖Bᵀω‖_∞`: discrete divergence of the corrected field.
    pub div_residual: f64,
}

/// Minimizes `‖∇θ + g‖²_{L²}` over `θ` with `∫θ = 0`.
///
/// Discretized on lattice edges: `Σ_e (θ_b − θ_a + ω_e)²` with `ω_e` the
/// edge circulation of `g`. The normal equations are a graph Laplacian,
/// solved by conjugate gradients on mean-zero vectors; their solution is the
/// discrete form of `Δθ = −div g`, `∂_ν θ = −g·ν`. The minimum is monotone
/// under shrinking the mask because the edge set shrinks and `ω` is fixed.
pub fn neumann_poisson(g: &VecField2, opts: &SolverOptions) -> Result<NeumannReport> {
    let edges = lattice_edges(g.grid());
    let omega = circulation(g, &edges);
    edge_gauge(g.grid_arc(), &omega, opts)
}

/// Minimizes `Σ_e (θ_b − θ_a + ω_e)²` over mean-zero `θ` for edge data `ω`
/// given in [`lattice_edges`] order.
pub fn edge_gauge(grid: &Arc<Grid>, omega: &[f64], opts: &SolverOptions) -> Result<NeumannReport> {
    opts.validate()?;
    let n = grid.len();
    let edges = lattice_edges(grid);
    if edges.len() != omega.len() {
        return Err(crate::Error::invalid("edge data does not match the grid"));
    }
    let div_omega = edge_divergence(n, &edges, omega);
    let b: Vec<f64> = div_omega.iter().map(|v| -v).collect();
    let apply = |v: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(a, b, _) in &edges {
            let d = v[b] - v[a];
            out[b] += d;
            out[a] -= d;
        }
    };
    let out = conjugate_gradient(apply, &b, opts.tol, opts.cap(grid), true)?;
    let corrected: Vec<f64> = edges.iter().zip(omega).map(|(&(a, b, _), w)| out.x[b] - out.x[a] + w).collect();
    let min_value = corrected.iter().map(|x| x * x).sum::<f64>().sqrt();
    let competitor = omega.iter().map(|x| x * x).sum::<f64>().sqrt();
    let base = div_omega.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let div_residual = if base == 0.0 {
        0.0
    } else {
        edge_divergence(n, &edges, &corrected).iter().fold(0.0f64, |m, v| m.max(v.abs())) / base
    };
    Ok(NeumannReport {
        solve: SolveReport {
            solution: Field::new(grid.clone(), out.x)?,
            residual: out.residual,
            iterations: out.iterations,
            boundary: BoundaryKind::NeumannMeanZero,
        },
        min_value,
        competitor,
        div_residual,
    })
}
