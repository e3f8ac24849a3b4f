use std::sync::Arc;

use approx::assert_relative_eq;

use super::*;
use crate::domain::{gradient, perp_gradient, Grid, ScalarField, VecField3};
use crate::elliptic::SolverOptions;

fn disk(n: usize) -> Arc<Grid> {
    Arc::new(Grid::disk(1.0, n).unwrap())
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn deep_max(grid: &Grid, f: impl Fn(usize) -> f64) -> f64 {
    (0..grid.len()).filter(|&k| grid.is_interior(k, 3)).map(f).fold(0.0, f64::max)
}

#[test]
fn frame_validation() {
    let g = disk(8);
    assert!(Frame::constant(g.clone(), [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).is_ok());
    assert!(Frame::constant(g.clone(), [1.0, 0.0, 0.0], [0.6, 0.8, 0.0]).is_err());
    let e1 = VecField3::constant(g.clone(), [1.0, 0.0, 0.0]).unwrap();
    let e2 = VecField3::constant(g.clone(), [0.0, 1.0, 0.0]).unwrap();
    let wrong_u = VecField3::constant(g, [0.0, 0.0, -1.0]).unwrap();
    assert!(Frame::new(e1, e2, wrong_u).is_err());
}

#[test]
fn flat_and_scaled_immersions() {
    let g = disk(16);
    let flat = VecField3::from_fn(g.clone(), |[x, y]| [x, y, 0.0]).unwrap();
    let data = frame_from_immersion(&flat).unwrap();
    assert!(data.lambda.values().iter().all(|v| v.abs() < 1e-12));
    assert!(data.frame.u().values().iter().all(|u| (u[2] - 1.0).abs() < 1e-12));
    let scaled = flat.map(|v| [3.0 * v[0], 3.0 * v[1], 0.0]);
    let data = frame_from_immersion(&scaled).unwrap();
    assert!(data.lambda.values().iter().all(|v| (v - 3f64.ln()).abs() < 1e-12));
    let degenerate = VecField3::from_fn(g, |[x, _]| [x, 0.0, 0.0]).unwrap();
    assert!(frame_from_immersion(&degenerate).is_err());
}

#[test]
fn stereographic_factor_and_normal() {
    let g = disk(128);
    let data = stereographic_immersion(g.clone()).unwrap();
    let center = (0..g.len()).min_by(|&a, &b| g.dist_from_center(a).total_cmp(&g.dist_from_center(b))).unwrap();
    assert!((data.lambda.values()[center] - 2f64.ln()).abs() < 1e-3);
    // Sphere normal is −Φ; the deviation is second-order truncation error.
    let normal_err = |n: usize| {
        let data = stereographic_immersion(disk(n)).unwrap();
        data.frame
            .u()
            .values()
            .iter()
            .zip(data.phi.values())
            .map(|(u, p)| (0..3).map(|c| (u[c] + p[c]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (normal_err(64), normal_err(128));
    assert!(fine < 4.0 * (2.0 / 128.0f64).powi(2), "{fine}");
    assert!((coarse / fine).log2() > 1.8, "{coarse} {fine}");
}

#[test]
fn conformality_residual_is_second_order() {
    let r: Vec<f64> =
        [32, 64, 128].iter().map(|&n| stereographic_immersion(disk(n)).unwrap().conformality_residual).collect();
    assert!(r[0] / r[1] > 3.5 && r[1] / r[2] > 3.5, "{r:?}");
}

#[test]
fn conformal_connection_identity() {
    // −∇⊥λ = ⟨e₁, ∇e₂⟩ on deep-interior nodes.
    let errs: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let data = stereographic_immersion(disk(n)).unwrap();
            let lhs = perp_gradient(&data.lambda);
            let rhs = connection_form(&data.frame);
            deep_max(data.lambda.grid(), |k| {
                let (a, b) = (lhs.values()[k], rhs.values()[k]);
                (a[0] + b[0]).abs().max((a[1] + b[1]).abs())
            })
        })
        .collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.8, "{errs:?}");
    }
}

#[test]
fn rotation_preserves_frame() {
    let data = stereographic_immersion(disk(32)).unwrap();
    let zero = ScalarField::constant(disk(32), 0.0).unwrap();
    assert_eq!(rotate_frame(&data.frame, &zero).unwrap(), data.frame);
    let full = ScalarField::constant(disk(32), 2.0 * std::f64::consts::PI).unwrap();
    let back = rotate_frame(&data.frame, &full).unwrap();
    for (a, b) in back.e1().values().iter().zip(data.frame.e1().values()) {
        assert!((0..3).all(|c| (a[c] - b[c]).abs() < 1e-12));
    }
    let theta = ScalarField::from_fn(disk(32), |[x, y]| 3.0 * x * y + y.sin()).unwrap();
    let rotated = rotate_frame(&data.frame, &theta).unwrap();
    assert_eq!(rotated.u(), data.frame.u());
    assert!(rotated.defect() < 1e-12);
}

#[test]
fn rotation_shifts_connection_by_gradient() {
    let errs: Vec<f64> = [32, 64]
        .iter()
        .map(|&n| {
            let data = stereographic_immersion(disk(n)).unwrap();
            let theta = ScalarField::from_fn(disk(n), |[x, y]| (2.0 * x).sin() * y + 0.5 * x * x).unwrap();
            let rotated = rotate_frame(&data.frame, &theta).unwrap();
            let before = connection_form(&data.frame);
            let after = connection_form(&rotated);
            let grad = gradient(&theta);
            deep_max(theta.grid(), |k| {
                (0..2)
                    .map(|c| (after.values()[k][c] - before.values()[k][c] - grad.values()[k][c]).abs())
                    .fold(0.0, f64::max)
            })
        })
        .collect();
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn edge_connection_is_additive_under_rotation() {
    let data = stereographic_immersion(disk(24)).unwrap();
    let theta = ScalarField::from_fn(disk(24), |[x, y]| x - 2.0 * y * y).unwrap();
    let rotated = rotate_frame(&data.frame, &theta).unwrap();
    let before = edge_connection(&data.frame);
    let after = edge_connection(&rotated);
    let edges = crate::elliptic::lattice_edges(data.frame.grid());
    for ((&(a, b, _), w0), w1) in edges.iter().zip(&before).zip(&after) {
        let t = theta.values();
        assert!((w1 - w0 - (t[b] - t[a])).abs() < 1e-12);
    }
}

#[test]
fn gauge_of_constant_frame() {
    let frame = Frame::constant(disk(16), [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
    let g = coulomb_gauge(&frame, 0.8, &opts()).unwrap();
    assert_eq!(g.f_r, 0.0);
    assert!(g.theta.values().iter().all(|&t| t == 0.0));
}

#[test]
fn gauge_undoes_pre_rotation() {
    let grid = disk(48);
    let frame = Frame::constant(grid.clone(), [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
    let theta0 = ScalarField::from_fn(grid, |[x, y]| 0.8 * x * y + (1.5 * x).sin()).unwrap();
    let rotated = rotate_frame(&frame, &theta0).unwrap();
    let g = coulomb_gauge(&rotated, 1.0, &opts()).unwrap();
    assert!(g.f_r < 1e-8, "f = {}", g.f_r);
    let mean = theta0.mean();
    for (t, t0) in g.theta.values().iter().zip(theta0.values()) {
        assert!((t + t0 - mean).abs() < 1e-8);
    }
}

#[test]
fn gauge_invariance_and_monotonicity_on_stereographic_frame() {
    let grid = disk(48);
    let data = stereographic_immersion(grid.clone()).unwrap();
    let theta0 = ScalarField::from_fn(grid, |[x, y]| x * x - y + 0.3 * (3.0 * y).cos()).unwrap();
    let pre = rotate_frame(&data.frame, &theta0).unwrap();
    let radii = [0.2, 0.4, 0.6, 0.8, 1.0];
    let a = gauge_curve(&data.frame, &radii, &opts()).unwrap();
    let b = gauge_curve(&pre, &radii, &opts()).unwrap();
    for (x, y) in a.f_values.iter().zip(&b.f_values) {
        assert!((x - y).abs() <= 1e-8 * x.max(1e-300), "{x} vs {y}");
    }
    for w in a.f_values.windows(2) {
        assert!(w[1] >= w[0] * (1.0 - 2e-10));
    }
    for ((f, c), d) in a.f_values.iter().zip(&a.competitors).zip(&a.div_residuals) {
        assert!(f <= c);
        assert!(*d <= 1e-9);
    }
    assert!(gauge_curve(&data.frame, &[0.5, 0.4], &opts()).is_err());
    assert!(gauge_curve(&data.frame, &[0.5, 1.5], &opts()).is_err());
}

#[test]
fn frpol_roots_bracket() {
    let (f1, f2) = frpol_roots(2.0, 0.1).unwrap();
    for x in [f1, f2] {
        assert!((2.0 * x * x - x + 2.0 * 0.01).abs() < 1e-14);
    }
    assert!(f1 < f2);
    assert!(frpol_roots(2.0, 0.26).is_none());
    assert_eq!(frpol_roots(1.0, 0.0).unwrap().0, 0.0);
}

#[test]
fn lifting_constant_frame_is_lower() {
    let frame = Frame::constant(disk(24), [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
    let out = lifting_pipeline(&frame, 0.75, &[0.25, 0.5, 1.0], &LiftConstants::new(1.0), &opts()).unwrap();
    let LiftOutcome::Lifted(d) = out else { panic!("expected lifted") };
    assert_eq!(d.branch, Branch::Lower);
    assert_eq!(d.epsilon, 0.0);
    assert!(d.f_values.iter().all(|&f| f == 0.0));
    assert!(d.f1.iter().all(|&f| f == 0.0));
}

#[test]
fn lifting_reports_smallness_violation() {
    let data = stereographic_immersion(disk(24)).unwrap();
    let out = lifting_pipeline(&data.frame, 0.75, &[0.5, 1.0], &LiftConstants::new(50.0), &opts()).unwrap();
    assert!(matches!(out, LiftOutcome::SmallnessViolated(ref v) if v.discriminant < 0.0));
}

#[test]
fn lambda_decomposition_flat_and_stereographic() {
    let grid = disk(48);
    let flat = VecField3::from_fn(grid.clone(), |[x, y]| [x, y, 0.0]).unwrap();
    let data = frame_from_immersion(&flat).unwrap();
    let dec = lambda_decomposition(&data, 0.75, 0.5, &opts()).unwrap();
    assert!(dec.lambda0.values().iter().all(|v| v.abs() < 1e-12));
    assert!(dec.lambda_h.values().iter().all(|v| v.abs() < 1e-12));

    let mut res = Vec::new();
    for n in [32, 64] {
        let data = stereographic_immersion(disk(n)).unwrap();
        let dec = lambda_decomposition(&data, 0.75, 0.5, &opts()).unwrap();
        assert!(dec.diagnostics.moser_trudinger.is_finite());
        assert!(dec.diagnostics.grad_lambda0 > 0.0);
        res.push(dec.diagnostics.identity_residual);
    }
    assert!(res[1] < res[0], "{res:?}");
    assert_relative_eq!(res[1], 0.0, epsilon = 0.05);
}

#[test]
fn radii_specifications() {
    assert_eq!(parse_radii("0.25:1:4").unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
    assert_eq!(parse_radii("0.5").unwrap(), vec![0.5]);
    assert_eq!(parse_radii("0.2, 0.4,1").unwrap(), vec![0.2, 0.4, 1.0]);
    assert_eq!(parse_radii("0.3:0.3:1").unwrap(), vec![0.3]);
    let lin = parse_radii("0.1:1.0:10").unwrap();
    assert_eq!(lin.len(), 10);
    assert_eq!(lin[9], 1.0);
    for bad in ["", "0:1:3", "1:0.5:3", "0.1:1", "0.1:1:0", "0.1:1:x", "0.5,0.4", "inf", "0.1:nan:3", "0.1:1:100001"] {
        assert!(parse_radii(bad).is_err(), "{bad}");
    }
}

#[test]
fn constants_file() {
    let c = LiftConstants::from_json(r#"{"frpol": 2.5}"#).unwrap();
    assert_eq!(c, LiftConstants::new(2.5));
    let c = LiftConstants::from_json(r#"{"frpol": 1, "branch_margin": 0, "note": "x"}"#).unwrap();
    assert_eq!(c.branch_margin, 0.0);
    for bad in ["", "{}", r#"{"frpol": -1}"#, r#"{"frpol": 1, "branch_margin": -0.5}"#, "[1]", r#"{"frpol": "1"}"#] {
        assert!(LiftConstants::from_json(bad).is_err(), "{bad}");
    }
}
