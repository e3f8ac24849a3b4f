use std::fs;
use std::path::Path;
use std::sync::Arc;

use fracframe::domain::io::{field_to_json, FieldDocument, FileKind};
use fracframe::domain::{Grid, VecField3};
use fracframe::elliptic::{dirichlet_norm, wente_solve};
use fracframe::frames::{
    frame_from_immersion, gauge_curve, lifting_pipeline, parse_radii, stereographic_map, Frame, LiftConstants,
    LiftOutcome,
};
use fracframe::harness::{collapse_experiment, gen_scalar, gen_unit_field, run_suite, SampleSpec, SuiteConfig};
use fracframe::sobolev::{bbm_limit, default_p, frac_normal_energy, gagliardo_seminorm};
use fracframe::spectral::{
    embed, frac_laplacian, lp_project, riesz_potential, riesz_transform, triebel_seminorm, PeriodicField,
};
use fracframe::{Error, Result};
use serde_json::json;

use crate::args::*;
use crate::output::{emit, envelope, inline_field, with_provenance, write_csv};

/// Successful runs either finish normally or report a smallness violation.
pub enum Status {
    Done,
    SmallnessViolated,
}

pub fn dispatch(command: &Command) -> Result<Status> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Energy(a) => energy(a),
        Command::Gauge(a) => gauge(a),
        Command::Lift(a) => lift(a),
        Command::Wente(a) => wente(a),
        Command::Spectral(a) => spectral(a),
        Command::Verify(a) => verify(a),
        Command::Collapse(a) => collapse(a),
    }
}

fn document(path: &Path) -> Result<FieldDocument> {
    FieldDocument::parse(&fs::read_to_string(path)?)
}

fn immersion(path: &Path) -> Result<Frame> {
    let doc = document(path)?;
    if doc.components != 3 {
        return Err(Error::invalid(format!("an immersion has 3 components, got {}", doc.components)));
    }
    Ok(frame_from_immersion(&doc.into_field::<[f64; 3]>()?)?.frame)
}

fn require(v: Option<f64>, name: &str, op: &str) -> Result<f64> {
    v.ok_or_else(|| Error::invalid(format!("--{name} is required for {op}")))
}

fn gen(a: &GenArgs) -> Result<Status> {
    let spec =
        SampleSpec::new(a.seed, a.smoothness, a.amplitude, a.trial as usize + 1).with_grid(a.n).with_modes(a.modes);
    let grid = Arc::new(if a.square || matches!(a.kind, GenKind::Periodic) {
        Grid::square(a.radius, a.n)?
    } else {
        Grid::disk(a.radius, a.n)?
    });
    let doc = match a.kind {
        GenKind::Scalar => field_to_json(&gen_scalar(&spec, &grid, a.trial)?),
        GenKind::Unit => field_to_json(&gen_unit_field(&spec, &grid, a.trial)?),
        GenKind::Stereographic => field_to_json(&stereographic_map(grid)),
        GenKind::Flat => field_to_json(&VecField3::from_fn(grid, |x| [x[0], x[1], 0.0])?),
        GenKind::Perturbed => {
            // Three disjoint streams per trial.
            let g = (0..3).map(|i| gen_scalar(&spec, &grid, 3 * a.trial + i)).collect::<Result<Vec<_>>>()?;
            let base = stereographic_map(Arc::clone(&grid));
            let values = (0..grid.len())
                .map(|k| {
                    let b = base.values()[k];
                    [b[0] + g[0].values()[k], b[1] + g[1].values()[k], b[2] + g[2].values()[k]]
                })
                .collect();
            field_to_json(&VecField3::new(grid, values)?)
        }
        GenKind::Periodic => {
            let f = gen_scalar(&spec, &grid, a.trial)?;
            PeriodicField::new(2.0 * a.radius, a.n, vec![f.into_values()])?.to_json()
        }
    };
    emit(a.out.as_deref(), &with_provenance(doc, "gen", Some(a.seed), a)?)?;
    Ok(Status::Done)
}

fn gagliardo_any(doc: FieldDocument, s: f64, p: f64) -> Result<fracframe::sobolev::EnergyReport> {
    match doc.components {
        1 => gagliardo_seminorm(&doc.into_field::<f64>()?, s, p),
        2 => gagliardo_seminorm(&doc.into_field::<[f64; 2]>()?, s, p),
        _ => gagliardo_seminorm(&doc.into_field::<[f64; 3]>()?, s, p),
    }
}

fn energy(a: &EnergyArgs) -> Result<Status> {
    let doc = document(&a.field)?;
    let text = match a.op {
        EnergyOp::Gagliardo => {
            let s = require(a.s, "s", "gagliardo")?;
            envelope("energy", None, a, &gagliardo_any(doc, s, a.p.unwrap_or_else(|| default_p(s)))?)?
        }
        EnergyOp::Gradient => envelope("energy", None, a, &gagliardo_any(doc, 1.0, a.p.unwrap_or(2.0))?)?,
        EnergyOp::FracNormal => {
            let s = require(a.s, "s", "frac-normal")?;
            let u = unit_field(doc)?;
            envelope("energy", None, a, &frac_normal_energy(&u, s, a.p.unwrap_or_else(|| default_p(s)))?)?
        }
        EnergyOp::Bbm => {
            let orders = parse_radii(&a.orders)?;
            let report = bbm_limit(&unit_field(doc)?, &orders)?;
            if let Some(path) = &a.csv {
                write_csv(path, &["s", "value"], report.samples.iter().map(|x| vec![x.s, x.weighted]))?;
            }
            envelope("energy", None, a, &report)?
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Status::Done)
}

fn unit_field(doc: FieldDocument) -> Result<VecField3> {
    if doc.components != 3 {
        return Err(Error::invalid(format!("expected a field with 3 components, got {}", doc.components)));
    }
    doc.into_field()
}

fn gauge(a: &GaugeArgs) -> Result<Status> {
    let frame = immersion(&a.field)?;
    let radii = parse_radii(&a.radii)?;
    let curve = gauge_curve(&frame, &radii, &a.solver.options())?;
    if let Some(path) = &a.csv {
        let rows = (0..curve.radii.len())
            .map(|i| vec![curve.radii[i], curve.f_values[i], curve.competitors[i], curve.div_residuals[i]]);
        write_csv(path, &["r", "f", "competitor", "div_residual"], rows)?;
    }
    emit(a.out.as_deref(), &envelope("gauge", None, a, &curve)?)?;
    Ok(Status::Done)
}

fn lift(a: &LiftArgs) -> Result<Status> {
    let constants = LiftConstants::from_json(&fs::read_to_string(&a.constant_file)?)?;
    let frame = immersion(&a.field)?;
    let radii = parse_radii(&a.radii)?;
    let outcome = lifting_pipeline(&frame, a.s, &radii, &constants, &a.solver.options())?;
    if let (Some(path), LiftOutcome::Lifted(d)) = (&a.csv, &outcome) {
        let rows = (0..d.radii.len()).map(|i| vec![d.radii[i], d.f_values[i], d.f1[i], d.f2[i]]);
        write_csv(path, &["r", "f", "F1", "F2"], rows)?;
    }
    emit(a.out.as_deref(), &envelope("lift", None, a, &outcome)?)?;
    Ok(match outcome {
        LiftOutcome::Lifted(_) => Status::Done,
        LiftOutcome::SmallnessViolated(_) => Status::SmallnessViolated,
    })
}

fn wente(a: &WenteArgs) -> Result<Status> {
    let (da, db) = (document(&a.a)?, document(&a.b)?);
    if da.components != db.components {
        return Err(Error::invalid("a and b must have the same number of components"));
    }
    let opts = a.solver.options();
    let report = match da.components {
        1 => wente_solve(&da.into_field::<f64>()?, &db.into_field::<f64>()?, &opts)?,
        2 => wente_solve(&da.into_field::<[f64; 2]>()?, &db.into_field::<[f64; 2]>()?, &opts)?,
        _ => wente_solve(&da.into_field::<[f64; 3]>()?, &db.into_field::<[f64; 3]>()?, &opts)?,
    };
    let result = json!({
        "residual": report.residual,
        "iterations": report.iterations,
        "boundary": report.boundary,
        "dirichlet_norm": dirichlet_norm(&report.solution),
        "sup_norm": report.solution.values().iter().fold(0.0f64, |m, v| m.max(v.abs())),
        "solution": inline_field(&field_to_json(&report.solution))?,
    });
    emit(a.out.as_deref(), &envelope("wente", None, a, &result)?)?;
    Ok(Status::Done)
}

fn periodic_input(doc: FieldDocument, pad: usize) -> Result<PeriodicField> {
    if doc.kind == FileKind::SquarePeriodic {
        return PeriodicField::from_document(doc);
    }
    match doc.components {
        1 => embed(&doc.into_field::<f64>()?, pad),
        2 => embed(&doc.into_field::<[f64; 2]>()?, pad),
        _ => embed(&doc.into_field::<[f64; 3]>()?, pad),
    }
}

fn field_result(op: &str, s: Option<f64>, f: &PeriodicField) -> Result<serde_json::Value> {
    Ok(json!({
        "operator": op,
        "s": s,
        "n": f.n(),
        "side": f.side(),
        "field": inline_field(&f.to_json())?,
    }))
}

fn spectral(a: &SpectralArgs) -> Result<Status> {
    let f = periodic_input(document(&a.field)?, a.embed)?;
    let result = match a.op {
        SpectralOp::FracLaplacian => {
            let s = require(a.s, "s", "frac-laplacian")?;
            field_result("frac-laplacian", Some(s), &frac_laplacian(&f, s)?)?
        }
        SpectralOp::RieszPotential => {
            let s = require(a.s, "s", "riesz-potential")?;
            field_result("riesz-potential", Some(s), &riesz_potential(&f, s)?)?
        }
        SpectralOp::RieszTransform => field_result("riesz-transform", None, &riesz_transform(&f)?)?,
        SpectralOp::LpProject => {
            let j = a.level.ok_or_else(|| Error::invalid("--level is required for lp-project"))?;
            let mut r = field_result("lp-project", None, &lp_project(&f, j)?)?;
            r["level"] = json!(j);
            r
        }
        SpectralOp::Triebel => {
            let s = require(a.s, "s", "triebel")?;
            let report = triebel_seminorm(&f, s, a.p.unwrap_or(2.0))?;
            let mut r = serde_json::to_value(report)?;
            r["operator"] = json!("triebel");
            r["n"] = json!(f.n());
            r["side"] = json!(f.side());
            r
        }
    };
    emit(a.out.as_deref(), &envelope("spectral", None, a, &result)?)?;
    Ok(Status::Done)
}

fn verify(a: &VerifyArgs) -> Result<Status> {
    let mut config = SuiteConfig::new(a.suite, a.seed);
    config.trials = a.trials.unwrap_or(config.trials);
    config.n = a.n.unwrap_or(config.n);
    config.s = a.s.unwrap_or(config.s);
    config.smoothness = a.smoothness.unwrap_or(config.smoothness);
    config.amplitude = a.amplitude.unwrap_or(config.amplitude);
    config.tol = a.tol.unwrap_or(config.tol);
    let report = run_suite(&config)?;
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    Ok(Status::Done)
}

fn collapse(a: &CollapseArgs) -> Result<Status> {
    if !(1..=30).contains(&a.steps) {
        return Err(Error::invalid(format!("steps must lie in 1..=30, got {}", a.steps)));
    }
    let c: Vec<f64> = (1..=a.steps).map(|k| 2f64.powi(-k)).collect();
    let report = collapse_experiment(&c, a.s, a.n, &a.solver.options())?;
    if let Some(path) = &a.csv {
        let rows = report.steps.iter().map(|x| vec![x.c, x.energy, x.grad_l2, x.lambda_h_max, x.lambda_h_negative]);
        write_csv(path, &["c", "energy", "grad_l2", "lambda_h_max", "lambda_h_negative"], rows)?;
    }
    emit(a.out.as_deref(), &envelope("collapse", None, a, &report)?)?;
    Ok(Status::Done)
}
