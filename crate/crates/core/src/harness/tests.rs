use std::sync::Arc;

use approx::assert_relative_eq;

use super::*;
use crate::domain::Grid;
use crate::elliptic::SolverOptions;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn trial_streams_are_reproducible_and_distinct() {
    let spec = SampleSpec::new(3, 3.0, 1.0, 4);
    let g = spec.disk().unwrap();
    let a = gen_scalar(&spec, &g, 1).unwrap();
    assert_eq!(a, gen_scalar(&spec, &g, 1).unwrap());
    assert_ne!(a, gen_scalar(&spec, &g, 2).unwrap());
}

#[test]
fn scalar_samples_have_the_requested_mean_square() {
    let spec = SampleSpec::new(8, 3.0, 0.5, 400).with_grid(16);
    let g = spec.disk().unwrap();
    let area = g.len() as f64 * g.h() * g.h();
    let ms: f64 = (0..400).map(|t| gen_scalar(&spec, &g, t).unwrap().lp_norm(2.0).powi(2) / area).sum::<f64>() / 400.0;
    assert_relative_eq!(ms, 0.25, max_relative = 0.15);
}

#[test]
fn zero_amplitude_gives_constant_samples() {
    let spec = SampleSpec::new(1, 3.0, 0.0, 2).with_grid(16);
    let g = spec.disk().unwrap();
    assert_eq!(gen_scalar(&spec, &g, 0).unwrap().lp_norm(2.0), 0.0);
    let u = gen_unit_field(&spec, &g, 0).unwrap();
    assert!(u.values().iter().all(|v| v == &u.values()[0]));
    let f = gen_frame(&spec, &g, 0).unwrap();
    assert!(f.e1().values().iter().all(|v| v == &f.e1().values()[0]));
}

#[test]
fn sample_spec_validation() {
    assert!(SampleSpec::new(0, 1.0, 1.0, 1).validate().is_err());
    assert!(SampleSpec::new(0, 3.0, f64::NAN, 1).validate().is_err());
    assert!(SampleSpec::new(0, 3.0, 1.0, 1).with_modes(0).validate().is_err());
    assert!(SampleSpec::new(0, 3.0, 1.0, 1).with_grid(4).validate().is_err());
}

#[test]
fn constant_report_bookkeeping() {
    let mut r = ConstantReport::new("x");
    for (l, rhs) in [(1.0, 2.0), (3.0, 0.0), (1.0, 1.0), (0.5, 1.0), (0.2, 1.0)] {
        r.push(l, rhs);
    }
    assert_eq!(r.trials, 5);
    assert_eq!(r.degenerate, 0);
    assert_eq!(r.violations, 1);
    r.push(0.0, 0.0);
    assert_eq!(r.degenerate, 1);
    assert_eq!(r.max_ratio, Some(1.0));
    let fit = r.fit(false).clone();
    assert_eq!(fit.calibration_trials, 2);
    assert_relative_eq!(fit.constant, FIT_MARGIN);
    assert_eq!(fit.validation_violations, 0);
    r.summarize();
    assert!(r.ratios.is_empty());
}

#[test]
fn mc_estimate_of_constant_samples() {
    let e = McEstimate::from_samples(&[2.0; 10]);
    assert_eq!(e.mean, 2.0);
    assert_eq!(e.std_error, 0.0);
    assert_eq!(e.relative_error(), 0.0);
}

#[test]
fn lagrange_inequality_edge_cases() {
    let a = [1.0, 0.0, 0.0];
    assert_eq!(lagrange_excess(&a, &a), 0.0);
    // Antipodal: |a − b| = 2, |a ∧ b| = 0, ½|a − b|² = 2.
    assert!(lagrange_excess(&a, &[-1.0, 0.0, 0.0]) <= 0.0);
    let b = [0.0, 1.0, 0.0];
    assert!(lagrange_excess(&a, &b) < 0.0);
}

#[test]
fn uwu_equivalence_on_small_fields() {
    let r = check_uwu_equivalence(&SampleSpec::new(2, 3.0, 0.1, 12).with_grid(16), 0.75).unwrap();
    assert_eq!(r.metrics["trivial_direction_failures"], 0.0);
    assert_eq!(r.metrics["lagrange_violations"], 0.0);
    assert!(r.max_ratio.unwrap().is_finite());
}

#[test]
fn constant_frame_has_vanishing_sides() {
    let r = check_frame_estimate(&SampleSpec::new(2, 3.0, 0.0, 4).with_grid(16), 0.75, 1.0).unwrap();
    assert_eq!(r.degenerate, 4);
    assert_eq!(r.violations, 0);
}

#[test]
fn kernel_sides_degenerate_configurations() {
    // |x − z| = |y − z| kills the left side of the first lemma.
    let (lhs, _) = xyz1_sides([1.0, 0.0], [-1.0, 0.0], [0.0, 0.5], 0.3, 0.6);
    assert!(lhs.abs() < 1e-15);
    // The homogeneous form scales like |·|^{−1}; the stated one does not.
    let (x, y, z) = ([0.3, 0.1], [0.5, -0.2], [-0.4, 0.7]);
    let ratio = |f: &dyn Fn([f64; 2], [f64; 2], [f64; 2]) -> (f64, f64), lam: f64| {
        let sc = |p: [f64; 2]| [lam * p[0], lam * p[1]];
        let (l, r) = f(sc(x), sc(y), sc(z));
        l / r
    };
    let hom = |x, y, z| kxyz3_sides(x, y, z, 0.5);
    let stated = |x, y, z| kxyz3_stated_sides(x, y, z, 0.5);
    assert_relative_eq!(ratio(&hom, 1.0), ratio(&hom, 1e3), max_relative = 1e-9);
    assert!((ratio(&stated, 1e3) / ratio(&stated, 1.0)).ln().abs() > 1.0);
}

#[test]
fn kernel_lemmas_small_run() {
    let r = check_kernel_lemmas(5, 20_000).unwrap();
    assert_eq!(r.xyz1.fit.as_ref().unwrap().validation_violations, 0);
    assert_eq!(r.kxyz3.degenerate, 0);
    assert!(check_kernel_lemmas(5, 1).is_err());
}

#[test]
fn cell_singularity_matches_quadrature() {
    // Midpoint rule on a refined cell, excluding the innermost subcell analytically small for a < 1.
    let a = 0.5;
    let m = 400;
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            let x = -0.5 + (i as f64 + 0.5) / m as f64;
            let y = -0.5 + (j as f64 + 0.5) / m as f64;
            acc += x.hypot(y).powf(-a);
        }
    }
    acc /= (m * m) as f64;
    assert_relative_eq!(cell_singularity(a), acc, max_relative = 2e-3);
}

#[test]
fn riesz_constant_against_gaussian_quadrature() {
    assert_relative_eq!(riesz_potential_constant(1.0), 1.0 / (2.0 * std::f64::consts::PI), max_relative = 1e-12);
    // (−Δ)^{−t/2} of exp(−|x|²/2) at the origin, in physical and in Fourier
    // variables, by radial midpoint quadrature.
    let radial = |f: &dyn Fn(f64) -> f64| {
        let m = 400_000;
        let dr = 40.0 / m as f64;
        (0..m).map(|i| f((i as f64 + 0.5) * dr) * dr).sum::<f64>()
    };
    for t in [0.3, 0.6, 0.9] {
        // r = u^{1/t} removes the singularity of r^{t−1}.
        let physical: f64 = 2.0 * std::f64::consts::PI / t * radial(&|u: f64| (-u.powf(2.0 / t) / 2.0).exp());
        let fourier: f64 = radial(&|r: f64| r.powf(1.0 - t) * (-r * r / 2.0).exp());
        assert_relative_eq!(riesz_potential_constant(t) * physical, fourier, max_relative = 1e-6);
    }
}

#[test]
fn signed_kernel_matches_riesz_potential_difference() {
    let r = check_operator_bounds(&SampleSpec::new(6, 3.0, 1.0, 2).with_grid(32), 0.6, 0.75).unwrap();
    assert!(r.signed_oracle_error < 0.05, "{}", r.signed_oracle_error);
}

#[test]
fn zero_density_gives_zero_operators() {
    let r = check_operator_bounds(&SampleSpec::new(1, 3.0, 0.0, 2).with_grid(16), 0.6, 0.75).unwrap();
    for rep in &r.reports {
        assert_eq!(rep.degenerate, rep.trials, "{}", rep.inequality);
    }
    assert!(check_operator_bounds(&SampleSpec::new(1, 3.0, 1.0, 2).with_grid(16), 0.4, 0.75).is_err());
    assert!(check_operator_bounds(&SampleSpec::new(1, 3.0, 1.0, 2).with_grid(64), 0.6, 0.75).is_err());
}

#[test]
fn zero_field_gives_zero_blocks() {
    let r = check_dyadic_blocks(&SampleSpec::new(1, 2.0, 0.0, 1).with_grid(16), 0.6, 0.75).unwrap();
    assert!(!r.blocks.is_empty());
    assert!(r.blocks.iter().all(|b| b.value == 0.0));
    assert!(check_dyadic_blocks(&SampleSpec::new(1, 2.0, 1.0, 1).with_grid(24), 0.6, 0.75).is_err());
    assert!(check_dyadic_blocks(&SampleSpec::new(1, 2.0, 1.0, 1).with_grid(16), 0.8, 0.75).is_err());
}

#[test]
fn block_sums_dominate_the_full_integral() {
    let r = check_dyadic_blocks(&SampleSpec::new(4, 2.0, 1.0, 1).with_grid(16).with_modes(8), 0.6, 0.75).unwrap();
    assert!(r.consistency_ratio > 0.0 && r.consistency_ratio <= 1.0 + 1e-12);
}

#[test]
fn harmonic_samples_are_harmonic() {
    let spec = SampleSpec::new(3, 2.0, 1.0, 4).with_grid(24);
    let f = gen_harmonic(&spec, 0, &opts()).unwrap();
    assert!(crate::elliptic::harmonic_defect(&f) < 1e-8);
    let r = check_harmonic_bound(&SampleSpec::new(3, 2.0, 1.0, 400).with_grid(16), 0.5, &opts()).unwrap();
    assert_eq!(r.validation_violations, 0);
    assert!(r.c1 > 0.0 && r.c2 > 0.0);
}

#[test]
fn collapse_baseline_and_scaling() {
    let r = collapse_experiment(&[0.5, 0.25, 0.125], 0.75, 24, &opts()).unwrap();
    assert_eq!(r.baseline.c, 1.0);
    assert_eq!(r.baseline.lambda_h_negative, 0.0);
    assert!(r.energy_deviation < 1e-10);
    assert!(r.grad_scaling_error < 1e-10);
    assert!(r.lambda_shift_error < 1e-12);
    assert_relative_eq!(r.slope.unwrap(), r.expected_slope, max_relative = 1e-6);
    assert!(collapse_experiment(&[0.5, 0.5], 0.75, 16, &opts()).is_err());
    assert!(collapse_experiment(&[1.0, -0.5], 0.75, 16, &opts()).is_err());
    assert!(collapse_experiment(&[], 0.75, 16, &opts()).is_err());
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        assert_eq!(serde_json::to_value(s).unwrap(), s.name());
    }
    assert!("bogus".parse::<Suite>().is_err());
}

#[test]
fn suite_reports_are_deterministic() {
    let mut cfg = SuiteConfig::new(Suite::Harmonic, 11);
    cfg.trials = 20;
    cfg.n = 16;
    let a = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let rep: SuiteReport = serde_json::from_str(&a).unwrap();
    assert_eq!(rep.version, crate::VERSION);
    assert_eq!(rep.config, cfg);
}

#[test]
fn disk_grid_area_is_close_to_pi() {
    let g = Arc::new(Grid::disk(1.0, 64).unwrap());
    assert_relative_eq!(g.len() as f64 * g.h() * g.h(), std::f64::consts::PI, max_relative = 0.01);
}
