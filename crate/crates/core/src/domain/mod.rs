//! Grids on disks and squares, grid-attached fields and discrete calculus.

mod calculus;
mod field;
mod grid;
pub mod io;

pub use calculus::{divergence, gradient, jacobian, laplacian_interior, partials, perp_gradient};
pub use field::{cross, dot, norm3, Field, FieldValue, ScalarField, VecField2, VecField3};
pub use grid::{Grid, GridDescriptor, GridKind};
