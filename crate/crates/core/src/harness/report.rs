use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Denominators below this are never divided by.
pub const RATIO_FLOOR: f64 = 1e-14;

/// Factor applied to the calibration maximum when fitting a constant.
pub const FIT_MARGIN: f64 = 1.5;

/// Empirical constant fitted on the first half of the ratios and checked on
/// the second half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantFit {
    pub margin: f64,
    /// Ratios are folded to `max(r, 1/r)` before fitting.
    pub two_sided: bool,
    pub calibration_trials: usize,
    pub calibration_max: f64,
    pub constant: f64,
    pub validation_trials: usize,
    pub validation_max: f64,
    pub validation_violations: usize,
}

/// Per-trial ratios `LHS / RHS` of one inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub inequality: String,
    pub trials: usize,
    /// Ratios of the trials with `RHS ≥ RATIO_FLOOR`, in trial order. Empty
    /// when only a summary is kept (see `metrics`).
    pub ratios: Vec<f64>,
    pub max_ratio: Option<f64>,
    /// Trials with both sides below the floor.
    pub degenerate: usize,
    /// Trials with `RHS` below the floor but `LHS` above it.
    pub violations: usize,
    pub fit: Option<ConstantFit>,
    pub metrics: BTreeMap<String, f64>,
}

impl ConstantReport {
    pub fn new(inequality: impl Into<String>) -> Self {
        ConstantReport {
            inequality: inequality.into(),
            trials: 0,
            ratios: Vec::new(),
            max_ratio: None,
            degenerate: 0,
            violations: 0,
            fit: None,
            metrics: BTreeMap::new(),
        }
    }

    /// Records one trial.
    pub fn push(&mut self, lhs: f64, rhs: f64) {
        self.trials += 1;
        if rhs.abs() < RATIO_FLOOR {
            if lhs.abs() < RATIO_FLOOR {
                self.degenerate += 1;
            } else {
                self.violations += 1;
            }
            return;
        }
        let r = lhs / rhs;
        self.max_ratio = Some(self.max_ratio.map_or(r, |m| m.max(r)));
        self.ratios.push(r);
    }

    /// Fits a constant on the first half of the ratios and validates it on
    /// the second half.
    pub fn fit(&mut self, two_sided: bool) -> &ConstantFit {
        let fold = |r: f64| if two_sided { r.max(1.0 / r) } else { r };
        let half = self.ratios.len() / 2;
        let (cal, val) = self.ratios.split_at(half);
        let calibration_max = cal.iter().map(|&r| fold(r)).fold(0.0, f64::max);
        let constant = calibration_max * FIT_MARGIN;
        let validation_max = val.iter().map(|&r| fold(r)).fold(0.0, f64::max);
        let validation_violations = val.iter().filter(|&&r| fold(r) > constant).count();
        self.fit = Some(ConstantFit {
            margin: FIT_MARGIN,
            two_sided,
            calibration_trials: cal.len(),
            calibration_max,
            constant,
            validation_trials: val.len(),
            validation_max,
            validation_violations,
        });
        self.fit.as_ref().expect("just set")
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// Drops the per-trial ratios, keeping count, maximum and fit.
    pub fn summarize(&mut self) {
        self.metric("stored_ratios", 0.0);
        self.ratios = Vec::new();
    }
}

/// Mean and standard error of a Monte-Carlo sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = crate::sum::pairwise_sum(xs) / n;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
        let var = if xs.len() > 1 { crate::sum::pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
        McEstimate { mean, std_error: (var / n).sqrt(), samples: xs.len() }
    }

    pub fn relative_error(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            self.std_error / self.mean.abs()
        }
    }
}
