//! Poisson problems on masked disks: zero-Dirichlet and Wente solves, the
//! mean-zero gauge minimization, harmonic extension, and the interior sup
//! bound for harmonic functions.

mod cg;
mod gauge;
mod harmonic;
mod poisson;

pub use gauge::{edge_gauge, lattice_edges, neumann_poisson, NeumannReport};
pub use harmonic::{harmonic_defect, harmonic_sup_bound_check, HarmonicBound, HARMONIC_TOL};
pub use poisson::{
    dirichlet_norm, harmonic_extension, poisson_dirichlet, wente_solve, BoundaryKind, SolveReport, SolverOptions,
};
