use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn remove_mean(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

pub(crate) struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖b − A x‖_∞ / ‖b‖_∞`, recomputed from the final iterate.
    pub residual: f64,
}

/// Conjugate gradients for a symmetric positive (semi)definite operator.
///
/// Stops when the true residual satisfies `‖b − Ax‖_∞ ≤ tol ‖b‖_∞`. With
/// `mean_zero` the iteration runs on the complement of the constants, which
/// must span the kernel of `A`.
pub(crate) fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_iter: usize,
    mean_zero: bool,
) -> Result<CgOutcome> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = max_abs(b);
    if bnorm == 0.0 {
        return Ok(CgOutcome { x, iterations: 0, residual: 0.0 });
    }
    let target = tol * bnorm;
    let mut r = b.to_vec();
    if mean_zero {
        remove_mean(&mut r);
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    loop {
        if max_abs(&r) <= target {
            // Confirm against the true residual; recurrences drift.
            apply(&x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            if mean_zero {
                remove_mean(&mut r);
            }
            let res = max_abs(&r);
            if res <= target {
                if mean_zero {
                    remove_mean(&mut x);
                }
                return Ok(CgOutcome { x, iterations, residual: res / bnorm });
            }
            p.copy_from_slice(&r);
            rr = dot(&r, &r);
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence { iterations, residual: max_abs(&r) / bnorm });
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NonConvergence { iterations, residual: max_abs(&r) / bnorm });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if mean_zero {
            remove_mean(&mut r);
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        iterations += 1;
    }
}
