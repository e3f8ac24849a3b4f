use std::sync::Arc;

use approx::assert_relative_eq;

use super::*;
use crate::domain::{Grid, ScalarField, VecField3};

fn disk(n: usize) -> Arc<Grid> {
    Arc::new(Grid::disk(1.0, n).unwrap())
}

fn tilt(g: Arc<Grid>, a: f64) -> VecField3 {
    VecField3::from_fn(g, |[x, y]| {
        let v = [a * x, a * y * y, 1.0];
        let r = (v[0] * v[0] + v[1] * v[1] + 1.0).sqrt();
        [v[0] / r, v[1] / r, v[2] / r]
    })
    .unwrap()
}

#[test]
fn constant_fields_have_zero_energy() {
    let g = disk(16);
    let f = ScalarField::constant(g.clone(), 3.0).unwrap();
    assert_eq!(gagliardo_seminorm(&f, 0.75, 8.0 / 3.0).unwrap().value, 0.0);
    assert_eq!(gagliardo_seminorm(&f, 1.0, 2.0).unwrap().value, 0.0);
    let u = VecField3::constant(g, [0.0, 0.6, 0.8]).unwrap();
    assert_eq!(frac_normal_energy(&u, 0.75, default_p(0.75)).unwrap().value, 0.0);
}

#[test]
fn rejects_out_of_range_parameters() {
    let g = disk(8);
    let f = ScalarField::constant(g.clone(), 0.0).unwrap();
    assert!(gagliardo_seminorm(&f, 0.0, 2.0).is_err());
    assert!(gagliardo_seminorm(&f, 1.2, 2.0).is_err());
    assert!(gagliardo_seminorm(&f, 0.5, 1.0).is_err());
    let u = VecField3::constant(g.clone(), [0.0, 0.0, 1.0]).unwrap();
    assert!(frac_normal_energy(&u, 0.5, 4.0).is_err());
    let long = VecField3::constant(g, [0.0, 0.0, 1.1]).unwrap();
    assert!(frac_normal_energy(&long, 0.75, 8.0 / 3.0).is_err());
}

#[test]
fn seminorm_matches_direct_double_loop() {
    let g = disk(8);
    let f = ScalarField::from_fn(g.clone(), |[x, y]| x * x - 0.3 * y).unwrap();
    let (s, p) = (0.6, 2.5);
    let mut direct = 0.0;
    for a in 0..g.len() {
        for b in 0..g.len() {
            if a != b {
                let (pa, pb) = (g.point(a), g.point(b));
                let r = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
                direct += (f.values()[a] - f.values()[b]).abs().powf(p) / r.powf(2.0 + s * p);
            }
        }
    }
    direct *= g.h().powi(4);
    let rep = gagliardo_seminorm(&f, s, p).unwrap();
    assert_relative_eq!(rep.value, direct.powf(1.0 / p), max_relative = 1e-12);
    assert_eq!(rep.quadrature.pairs, (g.len() * (g.len() - 1)) as u64);
}

#[test]
fn invariant_under_constant_shift_and_rotation() {
    let g = disk(16);
    let f = ScalarField::from_fn(g.clone(), |[x, y]| (2.0 * x).sin() * y).unwrap();
    let shifted = f.map(|v| v + 5.0);
    let a = gagliardo_seminorm(&f, 0.7, 3.0).unwrap().value;
    let b = gagliardo_seminorm(&shifted, 0.7, 3.0).unwrap().value;
    assert_relative_eq!(a, b, max_relative = 1e-12);

    let u = tilt(g, 0.8);
    let (c, s) = (0.6f64, 0.8f64);
    let rotated = u.map(|v| [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]);
    let e1 = frac_normal_energy(&u, 0.75, 8.0 / 3.0).unwrap().value;
    let e2 = frac_normal_energy(&rotated, 0.75, 8.0 / 3.0).unwrap().value;
    assert_relative_eq!(e1, e2, max_relative = 1e-12);
}

#[test]
fn trivial_estimate_and_domain_monotonicity() {
    let g = disk(16);
    let u = tilt(g, 1.5);
    let s = 0.75;
    let w = frac_normal_energy(&u, s, default_p(s)).unwrap().value;
    let semi = gagliardo_seminorm(&u, s, default_p(s)).unwrap().value;
    assert!(w <= semi.powf(2.0 / s) * (1.0 + 1e-12));
    let inner = frac_normal_energy(&u.restrict(0.6).unwrap(), s, default_p(s)).unwrap().value;
    assert!(inner < w);
}

#[test]
fn s_one_is_gradient_norm() {
    let g = Arc::new(Grid::square(1.0, 16).unwrap());
    let f = ScalarField::from_fn(g, |[x, y]| 3.0 * x - 4.0 * y).unwrap();
    let rep = gagliardo_seminorm(&f, 1.0, 2.0).unwrap();
    assert_eq!(rep.quadrature.formula, "gradient");
    // |∇f| = 5 on the square of area 4.
    assert_relative_eq!(rep.value, (25.0f64 * 4.0).sqrt(), max_relative = 1e-12);
}

#[test]
fn inversion_extension_basics() {
    let g = disk(32);
    let c = ScalarField::constant(g.clone(), 2.5).unwrap();
    let v = inversion_extension(&c, 2.0).unwrap();
    assert!(v.values().iter().all(|&x| x == 2.5));
    assert!(v.grid().radius() >= 2.0);
    assert_relative_eq!(v.grid().h(), g.h(), max_relative = 1e-14);

    // Inner nodes are copied exactly.
    let f = ScalarField::from_fn(g.clone(), |[x, y]| x + y * y).unwrap();
    let v = inversion_extension(&f, 1.5).unwrap();
    let back = v.restrict(1.0).unwrap();
    assert_eq!(back.values(), f.values());

    assert!(inversion_extension(&f, 1.0).is_err());
    assert!(inversion_extension(&f, 9.0).is_err());
    let sq = ScalarField::constant(Arc::new(Grid::square(1.0, 8).unwrap()), 0.0).unwrap();
    assert!(inversion_extension(&sq, 2.0).is_err());
}

#[test]
fn inversion_extension_of_radial_field() {
    // u(x) = |x|², so v(x) = 1/|x|² outside the unit disk.
    let g = disk(64);
    let f = ScalarField::from_fn(g, |[x, y]| x * x + y * y).unwrap();
    let v = inversion_extension(&f, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..v.len() {
        let r = v.grid().dist_from_center(k);
        if r > 1.05 {
            worst = worst.max((v.values()[k] - 1.0 / (r * r)).abs());
        }
    }
    assert!(worst < 2e-3, "max error {worst}");
}

#[test]
fn bbm_rejects_bad_orders() {
    let u = tilt(disk(8), 0.5);
    assert!(bbm_limit(&u, &[0.6, 0.7, 0.8]).is_err());
    assert!(bbm_limit(&u, &[0.4, 0.7, 0.8, 0.9]).is_err());
    assert!(bbm_limit(&u, &[0.6, 0.6, 0.8, 0.9]).is_err());
}

#[test]
fn bbm_constant_field_is_zero() {
    let u = VecField3::constant(disk(16), [1.0, 0.0, 0.0]).unwrap();
    let rep = bbm_limit(&u, &[0.6, 0.7, 0.8, 0.9]).unwrap();
    assert!(rep.samples.iter().all(|s| s.weighted == 0.0));
    assert_eq!(rep.limit, 0.0);
    assert!(rep.constant.is_none());
}

#[test]
fn bbm_constant_is_field_and_resolution_independent() {
    let orders = [0.6, 0.7, 0.8, 0.9];
    let mut constants = Vec::new();
    for n in [32, 64] {
        for a in [0.5, 2.0] {
            let rep = bbm_limit(&tilt(disk(n), a), &orders).unwrap();
            assert!(rep.samples.iter().all(|q| q.weighted > q.weighted_raw));
            constants.push(rep.constant.unwrap());
        }
    }
    let lo = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = constants.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo < 1.15, "{constants:?}");
}
