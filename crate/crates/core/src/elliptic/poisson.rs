use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{jacobian, Field, FieldValue, Grid, ScalarField};
use crate::error::{Error, Result};

use super::cg::conjugate_gradient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Dirichlet,
    NeumannMeanZero,
}

/// Iteration controls shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative tolerance on the max-norm residual.
    pub tol: f64,
    /// Iteration cap; `None` means `20 n²`.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iter: None }
    }
}

impl SolverOptions {
    pub(crate) fn cap(&self, grid: &Grid) -> usize {
        self.max_iter.unwrap_or(20 * grid.n() * grid.n())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::invalid(format!("tolerance must lie in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: ScalarField,
    /// Max-norm residual of the discrete equation relative to its right-hand side.
    pub residual: f64,
    pub iterations: usize,
    pub boundary: BoundaryKind,
}

/// `(4 v_k − Σ_{masked neighbors} v_m)`, the negated five-point Laplacian
/// times `h²` with zero ghost values off the mask.
pub(crate) fn neg_laplacian_scaled(grid: &Grid, v: &[f64], out: &mut [f64]) {
    for k in 0..grid.len() {
        let mut acc = 4.0 * v[k];
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if let Some(m) = grid.neighbor(k, di, dj) {
                acc -= v[m];
            }
        }
        out[k] = acc;
    }
}

/// Solves `Δλ = rhs` on the mask with `λ = 0` on the surrounding ghost nodes.
///
/// Five-point Laplacian, conjugate gradients to `‖r‖_∞ ≤ tol ‖rhs‖_∞`.
/// Works on any mask; on a disk grid the ghost layer is the staircase
/// approximation of `∂B`.
pub fn poisson_dirichlet(rhs: &ScalarField, opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let grid = rhs.grid();
    let h2 = grid.h() * grid.h();
    let b: Vec<f64> = rhs.values().iter().map(|v| -v * h2).collect();
    let out = conjugate_gradient(|v, o| neg_laplacian_scaled(grid, v, o), &b, opts.tol, opts.cap(grid), false)?;
    Ok(SolveReport {
        solution: Field::new(rhs.grid_arc().clone(), out.x)?,
        residual: out.residual,
        iterations: out.iterations,
        boundary: BoundaryKind::Dirichlet,
    })
}

/// `Δλ₀ = ⟨∇⊥a, ∇b⟩` with zero boundary values; the right-hand side is
/// [`jacobian`], summed over components for vector-valued `a`, `b`.
pub fn wente_solve<T: FieldValue>(a: &Field<T>, b: &Field<T>, opts: &SolverOptions) -> Result<SolveReport> {
    poisson_dirichlet(&jacobian(a, b)?, opts)
}

/// Discrete Dirichlet norm `‖∇λ‖_{L²}` consistent with the solver: squared
/// differences over lattice edges, with zero ghost values off the mask.
pub fn dirichlet_norm(lambda: &ScalarField) -> f64 {
    let grid = lambda.grid();
    let v = lambda.values();
    let mut acc = 0.0;
    for k in 0..grid.len() {
        for (di, dj) in [(1, 0), (0, 1)] {
            acc += match grid.neighbor(k, di, dj) {
                Some(m) => (v[m] - v[k]).powi(2),
                None => v[k] * v[k],
            };
        }
        for (di, dj) in [(-1, 0), (0, -1)] {
            if grid.neighbor(k, di, dj).is_none() {
                acc += v[k] * v[k];
            }
        }
    }
    acc.sqrt()
}

/// Harmonic function with prescribed values on the mask-edge nodes.
///
/// Edge nodes (some 4-neighbor unmasked) keep the values of `boundary`; the
/// remaining nodes solve the five-point Laplace equation.
pub fn harmonic_extension(boundary: &ScalarField, opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let grid = boundary.grid();
    let inner = Arc::new(grid.submask(|l| grid.index_of_lattice(l).is_some_and(|k| !grid.is_edge(k))));
    let trace = boundary.values();
    let mut values = trace.to_vec();
    let mut iterations = 0;
    let mut residual = 0.0;
    if !inner.is_empty() {
        // Interior unknowns, edge contributions moved to the right-hand side.
        let map: Vec<usize> = (0..inner.len()).map(|q| grid.index_of_lattice(inner.lattice_id(q)).unwrap()).collect();
        let b: Vec<f64> = map
            .iter()
            .map(|&k| {
                let mut acc = 0.0;
                for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let m = grid.neighbor(k, di, dj).expect("interior node");
                    if grid.is_edge(m) {
                        acc += trace[m];
                    }
                }
                acc
            })
            .collect();
        let out = conjugate_gradient(|v, o| neg_laplacian_scaled(&inner, v, o), &b, opts.tol, opts.cap(grid), false)?;
        for (q, &k) in map.iter().enumerate() {
            values[k] = out.x[q];
        }
        iterations = out.iterations;
        residual = out.residual;
    }
    Ok(SolveReport {
        solution: Field::new(boundary.grid_arc().clone(), values)?,
        residual,
        iterations,
        boundary: BoundaryKind::Dirichlet,
    })
}
