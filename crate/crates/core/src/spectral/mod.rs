//! Fourier multipliers on periodic squares: fractional Laplacian, Riesz
//! potential and transform, Littlewood–Paley pieces and Triebel seminorms.
//!
//! Frequencies are `ξ = 2π k / side`. Littlewood–Paley levels are counted in
//! cycles per unit length, `|k| / side ∈ (2^{j−1}, 2^{j+1})`, and the profile
//! is the fixed bump described at [`lp_profile`].

mod embed;
mod field;
mod lp;
mod multiplier;
mod singular;

pub use embed::{embed, embed_cutoff};
pub use field::PeriodicField;
pub use lp::{
    lp_decompose, lp_profile, lp_project, representable_levels, spectral_tail, triebel_seminorm, LpDecomposition,
    TriebelReport, TAIL_TOL,
};
pub use multiplier::{frac_laplacian, riesz_potential, riesz_transform};
pub use singular::{frac_laplacian_constant, singular_integral_frac_laplacian};
