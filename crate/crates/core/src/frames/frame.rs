use std::sync::Arc;

use crate::domain::{cross, dot, norm3, partials, Field, Grid, ScalarField, VecField2, VecField3};
use crate::elliptic::lattice_edges;
use crate::error::{Error, Result};

/// Tolerance for the pointwise orthonormality of a frame.
pub const FRAME_TOL: f64 = 1e-8;

/// Pointwise positively oriented orthonormal triple `(e₁, e₂, u = e₁ ∧ e₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    e1: VecField3,
    e2: VecField3,
    u: VecField3,
}

/// Largest violation of the frame conditions at one node.
fn frame_defect(e1: &[f64; 3], e2: &[f64; 3], u: &[f64; 3]) -> f64 {
    let c = cross(e1, e2);
    let wedge = ((c[0] - u[0]).powi(2) + (c[1] - u[1]).powi(2) + (c[2] - u[2]).powi(2)).sqrt();
    [
        (norm3(e1) - 1.0).abs(),
        (norm3(e2) - 1.0).abs(),
        (norm3(u) - 1.0).abs(),
        dot(e1, e2).abs(),
        dot(e1, u).abs(),
        dot(e2, u).abs(),
        wedge,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

impl Frame {
    /// Validates the frame conditions to [`FRAME_TOL`].
    pub fn new(e1: VecField3, e2: VecField3, u: VecField3) -> Result<Self> {
        e1.check_same_grid(e2.grid())?;
        e1.check_same_grid(u.grid())?;
        let worst =
            (0..e1.len()).map(|k| frame_defect(&e1.values()[k], &e2.values()[k], &u.values()[k])).fold(0.0, f64::max);
        if worst > FRAME_TOL {
            return Err(Error::invalid(format!("not an orthonormal frame (defect {worst:e})")));
        }
        Ok(Frame { e1, e2, u })
    }

    /// Frame from `e₁, e₂` with `u = e₁ ∧ e₂`.
    pub fn from_pair(e1: VecField3, e2: VecField3) -> Result<Self> {
        let u = e1.zip_map(&e2, cross)?;
        Self::new(e1, e2, u)
    }

    /// The same constant frame at every node.
    pub fn constant(grid: Arc<Grid>, e1: [f64; 3], e2: [f64; 3]) -> Result<Self> {
        Self::from_pair(VecField3::constant(grid.clone(), e1)?, VecField3::constant(grid, e2)?)
    }

    pub fn e1(&self) -> &VecField3 {
        &self.e1
    }

    pub fn e2(&self) -> &VecField3 {
        &self.e2
    }

    pub fn u(&self) -> &VecField3 {
        &self.u
    }

    pub fn grid(&self) -> &Grid {
        self.e1.grid()
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        self.e1.grid_arc()
    }

    /// Largest deviation from the frame conditions.
    pub fn defect(&self) -> f64 {
        (0..self.e1.len())
            .map(|k| frame_defect(&self.e1.values()[k], &self.e2.values()[k], &self.u.values()[k]))
            .fold(0.0, f64::max)
    }

    pub fn restrict(&self, r: f64) -> Result<Frame> {
        Ok(Frame { e1: self.e1.restrict(r)?, e2: self.e2.restrict(r)?, u: self.u.restrict(r)? })
    }

    pub fn restrict_to(&self, grid: &Arc<Grid>) -> Result<Frame> {
        Ok(Frame { e1: self.e1.restrict_to(grid)?, e2: self.e2.restrict_to(grid)?, u: self.u.restrict_to(grid)? })
    }

    /// Applies a fixed rotation of R³ to all three fields.
    pub fn rotate_ambient(&self, q: &[[f64; 3]; 3]) -> Frame {
        let apply = |v: &[f64; 3]| [dot(&q[0], v), dot(&q[1], v), dot(&q[2], v)];
        Frame { e1: self.e1.map(apply), e2: self.e2.map(apply), u: self.u.map(apply) }
    }
}

/// `ẽ₁ = cos θ e₁ − sin θ e₂`, `ẽ₂ = sin θ e₁ + cos θ e₂`, `u` unchanged.
///
/// With this convention `⟨ẽ₁, ∇ẽ₂⟩ = ⟨e₁, ∇e₂⟩ + ∇θ`.
pub fn rotate_frame(frame: &Frame, theta: &ScalarField) -> Result<Frame> {
    frame.e1.check_same_grid(theta.grid())?;
    let n = frame.e1.len();
    let mut e1 = Vec::with_capacity(n);
    let mut e2 = Vec::with_capacity(n);
    for k in 0..n {
        let (s, c) = theta.values()[k].sin_cos();
        let a = frame.e1.values()[k];
        let b = frame.e2.values()[k];
        e1.push([c * a[0] - s * b[0], c * a[1] - s * b[1], c * a[2] - s * b[2]]);
        e2.push([s * a[0] + c * b[0], s * a[1] + c * b[1], s * a[2] + c * b[2]]);
    }
    let grid = frame.grid_arc().clone();
    Ok(Frame { e1: Field::new(grid.clone(), e1)?, e2: Field::new(grid, e2)?, u: frame.u.clone() })
}

/// Connection form `⟨e₁, ∇e₂⟩` with the finite-difference gradient.
pub fn connection_form(frame: &Frame) -> VecField2 {
    let (d1, d2) = partials(&frame.e2);
    let values = (0..frame.e1.len())
        .map(|k| {
            let e = &frame.e1.values()[k];
            [dot(e, &d1.values()[k]), dot(e, &d2.values()[k])]
        })
        .collect();
    Field::new(frame.grid_arc().clone(), values).expect("finite connection")
}

/// Edge connection `ω_ab = arg z`, `z = (M₁₁ + M₂₂) + i (M₁₂ − M₂₁)`,
/// `M_{αβ} = ⟨e_α(a), e_β(b)⟩`, on the edges of
/// [`lattice_edges`](crate::elliptic::lattice_edges).
///
/// `ω_ab ≈ h ⟨e₁, ∂e₂⟩` at the edge midpoint, and rotating the frame by `θ`
/// changes it by exactly `θ_b − θ_a` (modulo 2π).
pub fn edge_connection(frame: &Frame) -> Vec<f64> {
    let e1 = frame.e1.values();
    let e2 = frame.e2.values();
    lattice_edges(frame.grid())
        .into_iter()
        .map(|(a, b, _)| {
            let re = dot(&e1[a], &e1[b]) + dot(&e2[a], &e2[b]);
            let im = dot(&e1[a], &e2[b]) - dot(&e2[a], &e1[b]);
            im.atan2(re)
        })
        .collect()
}
