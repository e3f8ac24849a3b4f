use serde::{Deserialize, Serialize};

use crate::domain::{divergence, ScalarField};
use crate::elliptic::{dirichlet_norm, edge_gauge, wente_solve, SolverOptions};
use crate::error::{Error, Result};
use crate::sobolev::{default_p, gagliardo_seminorm};

use super::frame::{connection_form, edge_connection, rotate_frame, Frame};

/// Coulomb gauge on `B(0, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResult {
    pub r: f64,
    /// Mean-zero rotation angle on `B(0, r)`.
    pub theta: ScalarField,
    /// Frame rotated by `theta`, on `B(0, r)`.
    pub rotated: Frame,
    /// `f(r) = min_θ ‖∇θ + ⟨e₁, ∇e₂⟩‖_{L²(B_r)}`.
    pub f_r: f64,
    /// Value of the functional at `θ = 0`, the discrete `‖⟨e₁, ∇e₂⟩‖_{L²(B_r)}`.
    pub competitor: f64,
    /// Relative discrete divergence of the gauged edge connection.
    pub div_residual: f64,
    /// `max |div ⟨ẽ₁, ∇ẽ₂⟩|` of the finite-difference connection at nodes of
    /// lattice depth ≥ 3; informational, carries discretization error.
    pub div_fd: f64,
    pub iterations: usize,
}

/// Minimizes `E_r(θ) = ∫_{B_r} |∇θ + ⟨e₁, ∇e₂⟩|²` over mean-zero `θ`.
///
/// The connection is discretized by [`edge_connection`], which shifts by
/// exactly `θ_b − θ_a` under rotation, so the minimal value does not depend
/// on a pre-rotation of the frame and the gauged edge connection is the
/// minimizing residual.
pub fn coulomb_gauge(frame: &Frame, r: f64, opts: &SolverOptions) -> Result<GaugeResult> {
    let local = frame.restrict(r)?;
    let omega = edge_connection(&local);
    let rep = edge_gauge(local.grid_arc(), &omega, opts)?;
    let rotated = rotate_frame(&local, &rep.solve.solution)?;
    let div = divergence(&connection_form(&rotated));
    let grid = rotated.grid();
    let div_fd = (0..grid.len()).filter(|&k| grid.is_interior(k, 3)).map(|k| div.values()[k].abs()).fold(0.0, f64::max);
    Ok(GaugeResult {
        r,
        theta: rep.solve.solution,
        rotated,
        f_r: rep.min_value,
        competitor: rep.competitor,
        div_residual: rep.div_residual,
        div_fd,
        iterations: rep.solve.iterations,
    })
}

fn check_radii(frame: &Frame, radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::invalid("need at least one radius"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    let max = frame.grid().radius();
    if radii[0] <= 0.0 || radii[radii.len() - 1] > max {
        return Err(Error::invalid(format!("radii must lie in (0, {max}]")));
    }
    Ok(())
}

/// Per-radius gauge values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeCurve {
    pub radii: Vec<f64>,
    pub f_values: Vec<f64>,
    pub competitors: Vec<f64>,
    pub div_residuals: Vec<f64>,
}

/// `f(r)` for each radius.
pub fn gauge_curve(frame: &Frame, radii: &[f64], opts: &SolverOptions) -> Result<GaugeCurve> {
    check_radii(frame, radii)?;
    let mut curve =
        GaugeCurve { radii: radii.to_vec(), f_values: Vec::new(), competitors: Vec::new(), div_residuals: Vec::new() };
    for &r in radii {
        let g = coulomb_gauge(frame, r, opts)?;
        curve.f_values.push(g.f_r);
        curve.competitors.push(g.competitor);
        curve.div_residuals.push(g.div_residual);
    }
    Ok(curve)
}

/// Constants entering the continuity argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftConstants {
    /// `C` in `f(r) ≤ C (f(r)² + [u]²)`.
    pub frpol: f64,
    /// Relative slack allowed above `F₁` for the lower branch.
    #[serde(default = "default_margin")]
    pub branch_margin: f64,
}

fn default_margin() -> f64 {
    0.1
}

impl LiftConstants {
    pub fn new(frpol: f64) -> Self {
        LiftConstants { frpol, branch_margin: default_margin() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frpol > 0.0 && self.frpol.is_finite()) {
            return Err(Error::invalid(format!("constant C must be positive, got {}", self.frpol)));
        }
        if !(self.branch_margin >= 0.0 && self.branch_margin.is_finite()) {
            return Err(Error::invalid("branch margin must be non-negative"));
        }
        Ok(())
    }

    /// Largest `[u]` for which the roots are real: `1 / (2C)`.
    pub fn epsilon_threshold(&self) -> f64 {
        0.5 / self.frpol
    }

    /// Reads `{"frpol": C, "branch_margin": m}`; the margin is optional and
    /// other keys are ignored.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("constants file: {e}")))?;
        if !value.is_object() {
            return Err(Error::parse("constants file must hold a JSON object"));
        }
        let c: LiftConstants =
            serde_json::from_value(value).map_err(|e| Error::parse(format!("constants file: {e}")))?;
        c.validate()?;
        Ok(c)
    }
}

/// Largest number of radii accepted from a radii specification.
pub const MAX_RADII: usize = 10_000;

/// Parses `a:b:k` (`k` equally spaced radii from `a` to `b` inclusive) or a
/// comma-separated list. The result is positive and strictly increasing.
pub fn parse_radii(spec: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t.trim().parse().map_err(|_| Error::parse(format!("bad radius {t:?}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::parse(format!("radius {t:?} is not finite")))
        }
    };
    let radii = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, k] = parts[..] else {
            return Err(Error::parse(format!("expected a:b:k, got {spec:?}")));
        };
        let (a, b) = (num(a)?, num(b)?);
        let k: usize = k.trim().parse().map_err(|_| Error::parse(format!("bad radius count {k:?}")))?;
        if k == 0 || k > MAX_RADII {
            return Err(Error::parse(format!("radius count must lie in 1..={MAX_RADII}, got {k}")));
        }
        if k == 1 {
            if a != b {
                return Err(Error::parse("a single radius needs a = b"));
            }
            vec![a]
        } else {
            (0..k)
                .map(|i| {
                    let tau = i as f64 / (k - 1) as f64;
                    a * (1.0 - tau) + b * tau
                })
                .collect()
        }
    } else {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() > MAX_RADII {
            return Err(Error::parse(format!("at most {MAX_RADII} radii")));
        }
        parts.into_iter().map(num).collect::<Result<Vec<f64>>>()?
    };
    if radii[0] <= 0.0 {
        return Err(Error::parse("radii must be positive"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::parse("radii must be strictly increasing"));
    }
    Ok(radii)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Lower,
    Upper,
    Indeterminate,
}

/// Per-radius data of the continuity argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftDiagnostics {
    pub s: f64,
    /// `ε = [u]_{W^{s,2/s}(B)}`.
    pub epsilon: f64,
    pub c_used: f64,
    pub branch_margin: f64,
    /// `1 / (2C)`, the largest `ε` with real roots.
    pub epsilon_threshold: f64,
    pub radii: Vec<f64>,
    pub f_values: Vec<f64>,
    pub competitors: Vec<f64>,
    #[serde(rename = "F1")]
    pub f1: Vec<f64>,
    #[serde(rename = "F2")]
    pub f2: Vec<f64>,
    /// `‖∇λ_r‖_{L²(B_r)}` with `Δλ_r = ⟨∇⊥ẽ₁, ∇ẽ₂⟩`, `λ_r = 0` on `∂B_r`.
    pub wente_norms: Vec<f64>,
    pub div_residuals: Vec<f64>,
    pub branch: Branch,
    /// `‖⟨ẽ₁, ∇ẽ₂⟩‖_{L²(B)}` at the largest radius.
    pub connection_norm: f64,
    /// `connection_norm / ε²`.
    pub c_prime: Option<f64>,
    /// `connection_norm / ε^{2/s}`, the exponent at the end of the Wente proof.
    pub c_prime_alt: Option<f64>,
    /// `[ẽ₁]_{W^{s,2/s}}`, `[ẽ₂]_{W^{s,2/s}}` at the largest radius.
    pub e1_seminorm: f64,
    pub e2_seminorm: f64,
}

/// Raised when `[u]` is too large for the configured constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessViolation {
    pub s: f64,
    pub epsilon: f64,
    pub c_used: f64,
    pub epsilon_threshold: f64,
    /// `1 − 4C²ε² < 0`.
    pub discriminant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum LiftOutcome {
    Lifted(LiftDiagnostics),
    SmallnessViolated(SmallnessViolation),
}

/// Roots `F₁ ≤ F₂` of `C x² − x + C ε²`, or `None` when they are complex.
pub fn frpol_roots(c: f64, epsilon: f64) -> Option<(f64, f64)> {
    let disc = 1.0 - 4.0 * c * c * epsilon * epsilon;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    // F₁ = (1 − √disc)/(2C) written without cancellation.
    let f1 = 2.0 * c * epsilon * epsilon / (1.0 + root);
    Some((f1, (1.0 + root) / (2.0 * c)))
}

/// Continuity-argument pipeline for a frame on the unit-scale disk.
///
/// Computes `ε = [u]_{W^{s,2/s}}` on the whole grid, the roots of
/// `C x² − x + C ε²` and, for each radius, the Coulomb gauge value `f(r)`
/// and the Wente potential `λ_r` of the gauged frame. The branch is
/// `lower` when `f(r) ≤ (1 + margin) F₁` for every radius, `upper` when
/// some `f(r) ≥ F₂`, and `indeterminate` otherwise.
pub fn lifting_pipeline(
    frame: &Frame,
    s: f64,
    radii: &[f64],
    constants: &LiftConstants,
    opts: &SolverOptions,
) -> Result<LiftOutcome> {
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::invalid(format!("lifting needs s in (1/2, 1), got {s}")));
    }
    constants.validate()?;
    check_radii(frame, radii)?;
    let c = constants.frpol;
    let p = default_p(s);
    let epsilon = gagliardo_seminorm(frame.u(), s, p)?.value;
    let Some((f1, f2)) = frpol_roots(c, epsilon) else {
        return Ok(LiftOutcome::SmallnessViolated(SmallnessViolation {
            s,
            epsilon,
            c_used: c,
            epsilon_threshold: constants.epsilon_threshold(),
            discriminant: 1.0 - 4.0 * c * c * epsilon * epsilon,
        }));
    };
    let mut f_values = Vec::new();
    let mut competitors = Vec::new();
    let mut wente_norms = Vec::new();
    let mut div_residuals = Vec::new();
    let mut last = None;
    for &r in radii {
        let g = coulomb_gauge(frame, r, opts)?;
        let lam = wente_solve(g.rotated.e1(), g.rotated.e2(), opts)?;
        f_values.push(g.f_r);
        competitors.push(g.competitor);
        wente_norms.push(dirichlet_norm(&lam.solution));
        div_residuals.push(g.div_residual);
        last = Some(g);
    }
    let last = last.expect("nonempty radii");
    let branch = if f_values.iter().all(|&f| f <= f1 * (1.0 + constants.branch_margin)) {
        Branch::Lower
    } else if f_values.iter().any(|&f| f >= f2) {
        Branch::Upper
    } else {
        Branch::Indeterminate
    };
    let connection_norm = last.f_r;
    let e1_seminorm = gagliardo_seminorm(last.rotated.e1(), s, p)?.value;
    let e2_seminorm = gagliardo_seminorm(last.rotated.e2(), s, p)?.value;
    let positive = epsilon > 1e-14;
    Ok(LiftOutcome::Lifted(LiftDiagnostics {
        s,
        epsilon,
        c_used: c,
        branch_margin: constants.branch_margin,
        epsilon_threshold: constants.epsilon_threshold(),
        f1: vec![f1; radii.len()],
        f2: vec![f2; radii.len()],
        radii: radii.to_vec(),
        f_values,
        competitors,
        wente_norms,
        div_residuals,
        branch,
        connection_norm,
        c_prime: positive.then(|| connection_norm / (epsilon * epsilon)),
        c_prime_alt: positive.then(|| connection_norm / epsilon.powf(2.0 / s)),
        e1_seminorm,
        e2_seminorm,
    }))
}
