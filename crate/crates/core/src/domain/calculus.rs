//! Second-order finite differences on masked lattices.
//!
//! Central differences where both axis neighbors are masked, the three-point
//! one-sided stencil where only one side has two masked nodes, and a
//! first-order difference as the last resort on one-node-thick slivers.

use crate::error::Result;

use super::field::{Field, FieldValue, ScalarField, VecField2};
use super::grid::Grid;

#[derive(Debug, Clone, Copy)]
enum Stencil {
    Central(usize, usize),
    Forward(usize, usize),
    Backward(usize, usize),
    ForwardFirst(usize),
    BackwardFirst(usize),
    Flat,
}

fn stencil(grid: &Grid, k: usize, axis: usize) -> Stencil {
    let step = |d: isize| {
        if axis == 0 {
            grid.neighbor(k, d, 0)
        } else {
            grid.neighbor(k, 0, d)
        }
    };
    match (step(-1), step(1)) {
        (Some(m), Some(p)) => Stencil::Central(m, p),
        (None, Some(p)) => match step(2) {
            Some(p2) => Stencil::Forward(p, p2),
            None => Stencil::ForwardFirst(p),
        },
        (Some(m), None) => match step(-2) {
            Some(m2) => Stencil::Backward(m, m2),
            None => Stencil::BackwardFirst(m),
        },
        (None, None) => Stencil::Flat,
    }
}

fn apply(st: Stencil, k: usize, h: f64, v: impl Fn(usize) -> f64) -> f64 {
    match st {
        Stencil::Central(m, p) => (v(p) - v(m)) / (2.0 * h),
        Stencil::Forward(p, p2) => (-3.0 * v(k) + 4.0 * v(p) - v(p2)) / (2.0 * h),
        Stencil::Backward(m, m2) => (3.0 * v(k) - 4.0 * v(m) + v(m2)) / (2.0 * h),
        Stencil::ForwardFirst(p) => (v(p) - v(k)) / h,
        Stencil::BackwardFirst(m) => (v(k) - v(m)) / h,
        Stencil::Flat => 0.0,
    }
}

/// Componentwise partial derivatives `(∂₁f, ∂₂f)`.
pub fn partials<T: FieldValue>(f: &Field<T>) -> (Field<T>, Field<T>) {
    let grid = f.grid();
    let h = grid.h();
    let vals = f.values();
    let mut dx = Vec::with_capacity(vals.len());
    let mut dy = Vec::with_capacity(vals.len());
    for k in 0..vals.len() {
        let sx = stencil(grid, k, 0);
        let sy = stencil(grid, k, 1);
        dx.push(vals[k].map_components(|c, _| apply(sx, k, h, |m| vals[m].component(c))));
        dy.push(vals[k].map_components(|c, _| apply(sy, k, h, |m| vals[m].component(c))));
    }
    (Field::new_unchecked(f.grid_arc().clone(), dx), Field::new_unchecked(f.grid_arc().clone(), dy))
}

/// `∇f = (∂₁f, ∂₂f)`.
pub fn gradient(f: &ScalarField) -> VecField2 {
    let (dx, dy) = partials(f);
    dx.zip_map(&dy, |a, b| [*a, *b]).expect("same grid")
}

/// `∇⊥f = (-∂₂f, ∂₁f)`.
pub fn perp_gradient(f: &ScalarField) -> VecField2 {
    gradient(f).map(|g| [-g[1], g[0]])
}

/// `div v = ∂₁v₁ + ∂₂v₂` with the same stencils as [`gradient`].
pub fn divergence(v: &VecField2) -> ScalarField {
    let (dx, dy) = partials(v);
    dx.zip_map(&dy, |a, b| a[0] + b[1]).expect("same grid")
}

/// Five-point Laplacian at nodes whose four neighbors are masked; `None` elsewhere.
pub fn laplacian_interior(f: &ScalarField) -> Vec<Option<f64>> {
    let grid = f.grid();
    let h2 = grid.h() * grid.h();
    let v = f.values();
    (0..v.len())
        .map(|k| {
            let e = grid.neighbor(k, 1, 0)?;
            let w = grid.neighbor(k, -1, 0)?;
            let n = grid.neighbor(k, 0, 1)?;
            let s = grid.neighbor(k, 0, -1)?;
            Some((v[e] + v[w] + v[n] + v[s] - 4.0 * v[k]) / h2)
        })
        .collect()
}

/// Pointwise `⟨∇⊥a, ∇b⟩ = ∂₁a ∂₂b − ∂₂a ∂₁b`, summed over components.
pub fn jacobian<T: FieldValue>(a: &Field<T>, b: &Field<T>) -> Result<ScalarField> {
    a.check_same_grid(b.grid())?;
    let (a1, a2) = partials(a);
    let (b1, b2) = partials(b);
    let values = (0..a.len())
        .map(|k| {
            (0..T::COMPONENTS)
                .map(|c| {
                    a1.values()[k].component(c) * b2.values()[k].component(c)
                        - a2.values()[k].component(c) * b1.values()[k].component(c)
                })
                .sum()
        })
        .collect();
    Ok(Field::new_unchecked(a.grid_arc().clone(), values))
}
