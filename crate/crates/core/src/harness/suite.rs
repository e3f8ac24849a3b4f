use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elliptic::SolverOptions;
use crate::error::{Error, Result};

use super::sample::SampleSpec;
use super::{
    check_dyadic_blocks, check_frame_estimate, check_harmonic_bound, check_kernel_lemmas, check_lifting,
    check_operator_bounds, check_uwu_equivalence, check_wente_constant, collapse_experiment,
};

/// Named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Uwu,
    Frame,
    Wente,
    Kernel,
    Operators,
    Dyadic,
    Harmonic,
    Lift,
    Collapse,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Uwu,
        Suite::Frame,
        Suite::Wente,
        Suite::Kernel,
        Suite::Operators,
        Suite::Dyadic,
        Suite::Harmonic,
        Suite::Lift,
        Suite::Collapse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Uwu => "uwu",
            Suite::Frame => "frame",
            Suite::Wente => "wente",
            Suite::Kernel => "kernel",
            Suite::Operators => "operators",
            Suite::Dyadic => "dyadic",
            Suite::Harmonic => "harmonic",
            Suite::Lift => "lift",
            Suite::Collapse => "collapse",
        }
    }

    /// Defaults `(trials, n, s, smoothness, amplitude)`.
    fn defaults(self) -> (usize, usize, f64, f64, f64) {
        match self {
            Suite::Uwu => (50, 32, 0.75, 3.0, 0.1),
            Suite::Frame => (50, 32, 0.75, 3.0, 0.3),
            Suite::Wente => (100, 32, 0.75, 3.0, 1.0),
            Suite::Kernel => (1_000_000, 0, 0.0, 0.0, 0.0),
            Suite::Operators => (20, 32, 0.6, 3.0, 1.0),
            Suite::Dyadic => (3, 64, 0.6, 2.0, 1.0),
            Suite::Harmonic => (1000, 32, 0.0, 2.0, 1.0),
            Suite::Lift => (50, 64, 0.75, 3.0, 0.1),
            Suite::Collapse => (10, 64, 0.75, 0.0, 0.0),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::invalid(format!("unknown suite {s:?}")))
    }
}

/// Fully resolved suite parameters; echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    /// Trials, sampled triples for `kernel`, halving steps for `collapse`.
    pub trials: usize,
    pub n: usize,
    pub s: f64,
    pub smoothness: f64,
    pub amplitude: f64,
    pub tol: f64,
}

/// Second order of the operator and dyadic suites.
pub const SUITE_T: f64 = 0.75;
/// Orders of the Wente suite.
pub const WENTE_ORDERS: [f64; 3] = [0.6, 0.75, 0.9];
/// `[u]` threshold of the simplified frame bound.
pub const FRAME_SMALL_U: f64 = 3.0;
/// Compact set of the harmonic suite.
pub const HARMONIC_RADIUS: f64 = 0.5;

impl SuiteConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        let (trials, n, s, smoothness, amplitude) = suite.defaults();
        SuiteConfig { suite, seed, trials, n, s, smoothness, amplitude, tol: SolverOptions::default().tol }
    }

    fn spec(&self) -> SampleSpec {
        let spec = SampleSpec::new(self.seed, self.smoothness, self.amplitude, self.trials).with_grid(self.n);
        match self.suite {
            Suite::Dyadic => spec.with_modes(16),
            _ => spec,
        }
    }
}

/// Output of `run_suite`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub suite: Suite,
    pub config: SuiteConfig,
    pub results: serde_json::Value,
}

/// Radii of the lifting suite: `0.1, 0.2, …, 1.0`.
pub fn default_lift_radii() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// Runs one suite. Per-sample ratio lists are dropped from the report.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let opts = SolverOptions { tol: config.tol, max_iter: None };
    opts.validate()?;
    let spec = config.spec();
    let results = match config.suite {
        Suite::Uwu => {
            let mut r = check_uwu_equivalence(&spec, config.s)?;
            r.summarize();
            serde_json::to_value(r)?
        }
        Suite::Frame => {
            let mut r = check_frame_estimate(&spec, config.s, FRAME_SMALL_U)?;
            r.summarize();
            serde_json::to_value(r)?
        }
        Suite::Wente => {
            let mut r = check_wente_constant(&spec, &WENTE_ORDERS, &opts)?;
            r.reports.iter_mut().for_each(|c| c.summarize());
            serde_json::to_value(r)?
        }
        Suite::Kernel => {
            let mut r = check_kernel_lemmas(config.seed, config.trials as u64)?;
            for c in [&mut r.xyz1, &mut r.kxyz3, &mut r.kxyz3_stated] {
                c.summarize();
            }
            serde_json::to_value(r)?
        }
        Suite::Operators => {
            let mut r = check_operator_bounds(&spec, config.s, SUITE_T)?;
            r.reports.iter_mut().for_each(|c| c.summarize());
            serde_json::to_value(r)?
        }
        Suite::Dyadic => {
            let mut r = check_dyadic_blocks(&spec, config.s, SUITE_T)?;
            r.ratios.summarize();
            serde_json::to_value(r)?
        }
        Suite::Harmonic => serde_json::to_value(check_harmonic_bound(&spec, HARMONIC_RADIUS, &opts)?)?,
        Suite::Lift => {
            let mut r = check_lifting(&spec, config.s, &default_lift_radii(), &opts)?;
            r.c_prime.summarize();
            r.c_prime_alt.summarize();
            serde_json::to_value(r)?
        }
        Suite::Collapse => {
            let c: Vec<f64> = (1..=config.trials as i32).map(|k| 2f64.powi(-k)).collect();
            serde_json::to_value(collapse_experiment(&c, config.s, config.n, &opts)?)?
        }
    };
    Ok(SuiteReport { version: crate::VERSION.to_string(), suite: config.suite, config: config.clone(), results })
}
