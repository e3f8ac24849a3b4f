use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracframe::elliptic::SolverOptions;
use fracframe::harness::Suite;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "fracframe",
    version,
    about = "Fractional Sobolev energies, Coulomb frames and Wente estimates on the disk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a sample field document.
    Gen(GenArgs),
    /// Evaluate a discrete energy of a field.
    Energy(EnergyArgs),
    /// Coulomb gauge values f(r) of the frame of an immersion.
    Gauge(GaugeArgs),
    /// Run the continuity argument on the frame of an immersion.
    Lift(LiftArgs),
    /// Solve Δλ = ⟨∇⊥a, ∇b⟩ with zero boundary values.
    Wente(WenteArgs),
    /// Apply a Fourier multiplier or Littlewood-Paley operator.
    Spectral(SpectralArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
    /// Conformal-factor collapse experiment on the unit disk.
    Collapse(CollapseArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Relative residual tolerance.
    #[arg(long, default_value_t = SolverOptions::default().tol)]
    pub tol: f64,
    /// Iteration cap (defaults to 20 n²).
    #[arg(long)]
    pub max_iter: Option<usize>,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iter: self.max_iter }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Random scalar series.
    Scalar,
    /// Normalized random vector series with values in S².
    Unit,
    /// Inverse stereographic projection.
    Stereographic,
    /// Flat immersion (x, y, 0); its frame is constant.
    Flat,
    /// Stereographic immersion plus a random vector series.
    Perturbed,
    /// Random scalar series on the periodic square.
    Periodic,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Nodes per axis.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Use the full square instead of the disk mask.
    #[arg(long)]
    pub square: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[arg(long, default_value_t = 3.0)]
    pub smoothness: f64,
    #[arg(long, default_value_t = 0.1)]
    pub amplitude: f64,
    /// Largest wavenumber of the random series.
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyOp {
    Gagliardo,
    FracNormal,
    Gradient,
    Bbm,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnergyArgs {
    #[arg(long, value_enum)]
    pub op: EnergyOp,
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub s: Option<f64>,
    /// Integrability exponent (defaults to 2/s, or 2 for the gradient).
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated orders for bbm.
    #[arg(long, default_value = "0.9,0.925,0.95,0.975")]
    pub orders: String,
    /// CSV table (s, value) for bbm.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GaugeArgs {
    /// Immersion with three components.
    #[arg(long)]
    pub field: PathBuf,
    /// `a:b:k` or a comma-separated list.
    #[arg(long, default_value = "0.1:1.0:10")]
    pub radii: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// CSV table (r, f, competitor, div_residual).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LiftArgs {
    /// Immersion with three components.
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, default_value_t = 0.75)]
    pub s: f64,
    #[arg(long, default_value = "0.1:1.0:10")]
    pub radii: String,
    /// JSON object with `frpol` and optional `branch_margin`.
    #[arg(long)]
    pub constant_file: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// CSV table (r, f, F1, F2).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WenteArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralOp {
    FracLaplacian,
    RieszPotential,
    RieszTransform,
    LpProject,
    Triebel,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectralArgs {
    #[arg(long, value_enum)]
    pub op: SpectralOp,
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Littlewood-Paley level for lp-project.
    #[arg(long, allow_negative_numbers = true)]
    pub level: Option<i32>,
    /// Padding factor when the input is not periodic.
    #[arg(long, default_value_t = 2)]
    pub embed: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub smoothness: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: fracframe::Error| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CollapseArgs {
    /// Number of halvings; c runs over 2^-1, ..., 2^-steps.
    #[arg(long, default_value_t = 10)]
    pub steps: i32,
    #[arg(long, default_value_t = 0.75)]
    pub s: f64,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// CSV table (c, energy, grad_l2, lambda_h_max, lambda_h_negative).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
