//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stderr,
//! bypassing output capture, and then asserts the same condition.

use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use fracframe::domain::{gradient, perp_gradient, Grid, ScalarField};
use fracframe::elliptic::SolverOptions;
use fracframe::frames::{connection_form, gauge_curve, rotate_frame, stereographic_immersion, Frame};
use fracframe::harness::{
    check_dyadic_blocks, check_harmonic_bound, check_kernel_lemmas, check_lifting, check_uwu_equivalence,
    check_wente_constant, collapse_experiment, default_lift_radii, gen_frame, gen_scalar, gen_unit_field, run_suite,
    SampleSpec, Suite, SuiteConfig, FIT_MARGIN,
};
use fracframe::sobolev::bbm_limit;
use fracframe::spectral::{
    frac_laplacian, lp_decompose, riesz_potential, singular_integral_frac_laplacian, PeriodicField,
};

const CONFORMAL_MIN_ORDER: f64 = 1.8;
const CONFORMAL_MAX_SECONDS: f64 = 10.0;
const ROTATION_FIELDS: usize = 20;
const GAUGE_DIV_FACTOR: f64 = 10.0;
const GAUGE_MONOTONE_FACTOR: f64 = 2.0;
const LIFT_LOWER_FRACTION: f64 = 0.95;
const LIFT_MAX_SECONDS: f64 = 300.0;
const WENTE_ORDERS: [f64; 3] = [0.6, 0.75, 0.9];
const BBM_SPREAD: f64 = 0.15;
const LP_RECONSTRUCTION_TOL: f64 = 1e-6;
const SINGULAR_TOL: f64 = 0.01;
const INVERSE_TOL: f64 = 1e-9;
const KERNEL_TRIPLES: u64 = 1_000_000;
const HARMONIC_FIELDS: usize = 1000;
const DYADIC_RATE_SLACK: f64 = 0.1;
const COLLAPSE_STEPS: i32 = 10;
const COLLAPSE_EXACT_TOL: f64 = 1e-10;
const COLLAPSE_SLOPE_TOL: f64 = 0.05;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance] {status} {id:>2} {name}: {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn disk(n: usize) -> Arc<Grid> {
    Arc::new(Grid::disk(1.0, n).unwrap())
}

fn deep_max(grid: &Grid, f: impl Fn(usize) -> f64) -> f64 {
    (0..grid.len()).filter(|&k| grid.is_interior(k, 3)).map(f).fold(0.0, f64::max)
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn centered(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - m).collect()
}

#[test]
fn c01_conformal_identity() {
    let start = Instant::now();
    let mut errs = Vec::new();
    let mut scaled = Vec::new();
    for n in [32, 64, 128] {
        let data = stereographic_immersion(disk(n)).unwrap();
        let lhs = perp_gradient(&data.lambda);
        let rhs = connection_form(&data.frame);
        let e = deep_max(data.lambda.grid(), |k| {
            let (a, b) = (lhs.values()[k], rhs.values()[k]);
            (a[0] + b[0]).abs().max((a[1] + b[1]).abs())
        });
        scaled.push(e / data.lambda.grid().h().powi(2));
        errs.push(e);
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let secs = start.elapsed().as_secs_f64();
    let pass = orders.iter().all(|&o| o >= CONFORMAL_MIN_ORDER) && secs < CONFORMAL_MAX_SECONDS;
    report(
        1,
        "conformal identity",
        pass,
        format!(
            "max errors {:?}, err/h² {scaled:.3?}, orders {orders:.3?}, {secs:.2} s",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn c02_frame_rotation_identity() {
    // −∇⊥λ = ⟨ẽ₁, ∇ẽ₂⟩ − ∇θ for ẽ = P(θ) e.
    let spec = SampleSpec::new(2024, 3.0, 1.0, ROTATION_FIELDS);
    let resolutions = [32, 64];
    let mut scaled = vec![Vec::new(); resolutions.len()];
    for (slot, &n) in resolutions.iter().enumerate() {
        let grid = disk(n);
        let data = stereographic_immersion(grid.clone()).unwrap();
        let lhs = perp_gradient(&data.lambda);
        for trial in 0..ROTATION_FIELDS as u64 {
            let theta = gen_scalar(&spec, &grid, trial).unwrap();
            let rotated = rotate_frame(&data.frame, &theta).unwrap();
            let conn = connection_form(&rotated);
            let grad = gradient(&theta);
            let e = deep_max(&grid, |k| {
                (0..2)
                    .map(|c| (lhs.values()[k][c] + conn.values()[k][c] - grad.values()[k][c]).abs())
                    .fold(0.0, f64::max)
            });
            scaled[slot].push(e / grid.h().powi(2));
        }
    }
    let half = ROTATION_FIELDS / 2;
    let c = FIT_MARGIN * scaled.iter().flat_map(|v| v[..half].iter()).cloned().fold(0.0, f64::max);
    let worst = scaled.iter().flat_map(|v| v.iter()).cloned().fold(0.0, f64::max);
    let violations = scaled.iter().flat_map(|v| v[half..].iter()).filter(|&&x| x > c).count();
    report(
        2,
        "frame-rotation identity",
        violations == 0,
        format!("{ROTATION_FIELDS} fields at n = {resolutions:?}: C = {c:.3}, max err/h² {worst:.3}, {violations} violations"),
    );
}

#[test]
fn c03_gauge() {
    let o = opts();
    let n = 48;
    let grid = disk(n);
    let radii: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let stereo = stereographic_immersion(grid.clone()).unwrap().frame;
    let theta = ScalarField::from_fn(grid.clone(), |[x, y]| x * x - y + 0.3 * (3.0 * y).cos()).unwrap();
    let mut fixtures: Vec<(String, Frame)> = vec![
        ("constant".into(), Frame::constant(grid.clone(), [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap()),
        ("stereographic".into(), stereo.clone()),
        ("rotated stereographic".into(), rotate_frame(&stereo, &theta).unwrap()),
    ];
    let spec = SampleSpec::new(31, 3.0, 0.3, 3).with_grid(n);
    for t in 0..3 {
        fixtures.push((format!("random {t}"), gen_frame(&spec, &grid, t).unwrap()));
    }
    let mut max_div: f64 = 0.0;
    let mut worst_drop: f64 = 0.0;
    let mut competitor_ok = true;
    let mut pass = true;
    for (name, frame) in &fixtures {
        let curve = gauge_curve(frame, &radii, &o).unwrap();
        for d in &curve.div_residuals {
            max_div = max_div.max(*d);
            pass &= *d <= GAUGE_DIV_FACTOR * o.tol;
        }
        for w in curve.f_values.windows(2) {
            let drop = (w[0] - w[1]) / w[0].max(f64::MIN_POSITIVE);
            worst_drop = worst_drop.max(drop);
            pass &= w[1] >= w[0] * (1.0 - GAUGE_MONOTONE_FACTOR * o.tol);
        }
        let ok = curve.f_values.iter().zip(&curve.competitors).all(|(f, c)| f <= c);
        if !ok {
            eprintln!("competitor bound fails on {name}");
        }
        competitor_ok &= ok;
    }
    report(
        3,
        "Coulomb gauge",
        pass && competitor_ok,
        format!(
            "{} fixtures x 10 radii: max div residual {max_div:.2e} (limit {:.0e}), largest relative drop of f {worst_drop:.2e}, f ≤ competitor: {competitor_ok}",
            fixtures.len(),
            GAUGE_DIV_FACTOR * o.tol
        ),
    );
}

#[test]
fn c04_lifting_pipeline() {
    let start = Instant::now();
    let spec = SampleSpec::new(404, 3.0, 0.1, 50).with_grid(64);
    let r = check_lifting(&spec, 0.75, &default_lift_radii(), &opts()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let fit = r.c_prime.fit.clone().unwrap();
    let single = fit.validation_violations == 0 && r.c_prime.violations == 0;
    let pass = r.lower_fraction >= LIFT_LOWER_FRACTION && single && secs < LIFT_MAX_SECONDS;
    report(
        4,
        "lifting pipeline",
        pass,
        format!(
            "lower {}/{} ({:.2}), upper {}, violated {}, C = {:.4}, C' = {:.4} (max ratio {:.4}, {} violations), {secs:.1} s",
            r.lower,
            r.trials,
            r.lower_fraction,
            r.upper,
            r.smallness_violated,
            r.constants.frpol,
            fit.constant,
            r.c_prime.max_ratio.unwrap_or(0.0),
            fit.validation_violations
        ),
    );
}

#[test]
fn c05_wente() {
    let spec = SampleSpec::new(7, 3.0, 1.0, 100).with_grid(32);
    let r = check_wente_constant(&spec, &WENTE_ORDERS, &opts()).unwrap();
    let maxima: Vec<f64> = r.reports.iter().map(|c| c.max_ratio.unwrap_or(f64::INFINITY)).collect();
    let finite = maxima.iter().all(|m| m.is_finite()) && r.reports.iter().all(|c| c.violations == 0);
    let pass = finite && r.sweep_nonincreasing && r.equal_pair_max <= r.noise_threshold;
    report(
        5,
        "Wente constant",
        pass,
        format!(
            "max ratios {maxima:.4?} at s = {WENTE_ORDERS:?}, sweep slopes {:.3?}, non-increasing {}, a = b max {:.2e} (threshold {:.0e})",
            r.sweep_slopes, r.sweep_nonincreasing, r.equal_pair_max, r.noise_threshold
        ),
    );
}

#[test]
fn c06_equivalence() {
    let spec = SampleSpec::new(606, 3.0, 0.1, 50).with_grid(32);
    let r = check_uwu_equivalence(&spec, 0.75).unwrap();
    let fit = r.fit.clone().unwrap();
    let trivial = r.metrics["trivial_direction_failures"];
    let pass = fit.two_sided && fit.validation_violations == 0 && trivial == 0.0;
    report(
        6,
        "[u] vs [u∧∇u] equivalence",
        pass,
        format!(
            "C = {:.4} (ratios in [1/C, C]), validation violations {}, trivial-direction failures {trivial}",
            fit.constant, fit.validation_violations
        ),
    );
}

#[test]
fn c07_bbm_limit() {
    let orders = [0.6, 0.7, 0.8, 0.9];
    let spec = SampleSpec::new(77, 3.0, 0.5, 5);
    let mut constants = Vec::new();
    for n in [32, 64] {
        let grid = disk(n);
        for t in 0..5 {
            let u = gen_unit_field(&spec, &grid, t).unwrap();
            constants.push(bbm_limit(&u, &orders).unwrap().constant.unwrap());
        }
    }
    let lo = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = constants.iter().cloned().fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    report(
        7,
        "BBM limit",
        spread <= BBM_SPREAD,
        format!("constants {constants:.4?}, spread {spread:.4} (limit {BBM_SPREAD})"),
    );
}

#[test]
fn c08_spectral() {
    // Band-limited field: a few plane waves.
    let side = 4.0;
    let w = 2.0 * PI / side;
    let f = PeriodicField::from_fn(side, 64, |x| {
        (w * (3.0 * x[0] + x[1])).cos() + 0.5 * (w * (7.0 * x[1])).sin() - 0.3 * (w * (12.0 * x[0] - 5.0 * x[1])).cos()
    })
    .unwrap();
    let rec = lp_decompose(&f).reconstruct();
    let lp_err = rel_l2(rec.channel(0), &centered(f.channel(0)));

    let (side, n, s) = (8.0, 128, 0.5);
    let bump = PeriodicField::from_fn(side, n, |x| (-(x[0] * x[0] + x[1] * x[1]) / 0.5).exp()).unwrap();
    let spectral = frac_laplacian(&bump, s).unwrap();
    let direct = singular_integral_frac_laplacian(&bump.to_square_field(0).unwrap(), s).unwrap();
    let singular_err = rel_l2(&centered(direct.values()), &centered(spectral.channel(0)));

    let inv = riesz_potential(&frac_laplacian(&bump, s).unwrap(), s).unwrap();
    let inv_err = rel_l2(inv.channel(0), &centered(bump.channel(0)));

    let pass = lp_err < LP_RECONSTRUCTION_TOL && singular_err < SINGULAR_TOL && inv_err < INVERSE_TOL;
    report(
        8,
        "spectral operators",
        pass,
        format!("LP reconstruction {lp_err:.2e}, singular vs multiplier (modulo constants) {singular_err:.4}, I_s ∘ (−Δ)^(s/2) − (id − mean) {inv_err:.2e}"),
    );
}

#[test]
fn c09_kernel_lemmas() {
    let r = check_kernel_lemmas(9, KERNEL_TRIPLES).unwrap();
    let xyz1 = r.xyz1.fit.clone().unwrap();
    let kxyz3 = r.kxyz3.fit.clone().unwrap();
    let stated = r.kxyz3_stated.fit.clone().unwrap();
    let pass = xyz1.validation_violations == 0 && kxyz3.validation_violations == 0 && r.trials == KERNEL_TRIPLES;
    report(
        9,
        "kernel lemmas",
        pass,
        format!(
            "{} triples each: xyz1 C = {:.4} ({} violations), kxyz3 C = {:.4} ({} violations); stated kxyz3 form C = {:.4} ({} violations)",
            r.trials,
            xyz1.constant,
            xyz1.validation_violations,
            kxyz3.constant,
            kxyz3.validation_violations,
            stated.constant,
            stated.validation_violations
        ),
    );
}

#[test]
fn c10_harmonic_bound() {
    let spec = SampleSpec::new(10, 2.0, 1.0, HARMONIC_FIELDS).with_grid(32);
    let r = check_harmonic_bound(&spec, 0.5, &opts()).unwrap();
    report(
        10,
        "harmonic sup bound",
        r.validation_violations == 0 && r.trials == HARMONIC_FIELDS,
        format!(
            "{} fields: C1 = {:.4}, C2 = {:.4}, {} validation violations, {} non-positive fields",
            r.trials, r.c1, r.c2, r.validation_violations, r.nonpositive_samples
        ),
    );
}

#[test]
fn c11_dyadic_blocks() {
    let (s, t) = (0.6, 0.75);
    let spec = SampleSpec::new(11, 2.0, 1.0, 3).with_grid(64).with_modes(16);
    let r = check_dyadic_blocks(&spec, s, t).unwrap();
    let target = s.min(t - s) - DYADIC_RATE_SLACK;
    let pass = r.rate >= target;
    report(
        11,
        "dyadic blocks",
        pass,
        format!(
            "decay rate {:.3} (target ≥ {target:.3}); distances below wavelength {:.3}, above {:.3}; block-sum consistency {:.4}; {} blocks, max ratio {:.3}",
            r.rate,
            r.rate_fine,
            r.rate_coarse,
            r.consistency_ratio,
            r.blocks.len(),
            r.ratios.max_ratio.unwrap_or(0.0)
        ),
    );
}

#[test]
fn c12_collapse() {
    let c: Vec<f64> = (1..=COLLAPSE_STEPS).map(|k| 2f64.powi(-k)).collect();
    let r = collapse_experiment(&c, 0.75, 64, &opts()).unwrap();
    let slope = r.slope.unwrap_or(f64::NAN);
    let err = (slope / (PI * LN_2) - 1.0).abs();
    let pass = r.energy_deviation <= COLLAPSE_EXACT_TOL
        && r.grad_scaling_error <= COLLAPSE_EXACT_TOL
        && err <= COLLAPSE_SLOPE_TOL
        && r.fitted_steps >= 2;
    report(
        12,
        "collapse experiment",
        pass,
        format!(
            "W deviation {:.1e}, ∇Φ halving error {:.1e}, λ shift error {:.1e}, slope {slope:.4} vs π log 2 = {:.4} (rel. {err:.4}) over {} steps",
            r.energy_deviation,
            r.grad_scaling_error,
            r.lambda_shift_error,
            PI * LN_2,
            r.fitted_steps
        ),
    );
}

#[test]
fn c13_determinism() {
    let mut identical = Vec::new();
    for suite in Suite::ALL {
        let mut cfg = SuiteConfig::new(suite, 13);
        cfg.trials = match suite {
            Suite::Kernel => 20_000,
            Suite::Collapse => 4,
            Suite::Dyadic => 1,
            _ => 6,
        };
        cfg.n = match suite {
            Suite::Dyadic => 16,
            Suite::Kernel => cfg.n,
            _ => 16,
        };
        let a = serde_json::to_vec(&run_suite(&cfg).unwrap()).unwrap();
        let b = serde_json::to_vec(&run_suite(&cfg).unwrap()).unwrap();
        identical.push((suite.name(), a == b));
    }
    let pass = identical.iter().all(|(_, same)| *same);
    report(13, "determinism", pass, format!("byte-identical reruns: {identical:?}"));
}
