//! build-metric: the metric manifest of a family spec — b-bounds by both
//! methods, pole smoothness, conformal-factor positivity, and the
//! curvature range. Exit 1 when the metric is degenerate.

use crate::output::{ensure_dir, fmt, write_csv, write_json};
use crate::{CmdError, CmdResult, FamilyArg, Outcome};
use s2cubic::metric::{self, Family, FamilySurface};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct BoundsOut {
    lower: f64,
    upper: f64,
    lower_via_phi: f64,
    upper_via_phi: f64,
}

#[derive(Serialize)]
struct Manifest {
    family: String,
    tau: f64,
    param_name: String,
    param_value: f64,
    b_bounds: Option<BoundsOut>,
    admissible: Option<bool>,
    lambda_min: f64,
    curvature_min: f64,
    curvature_max: f64,
    smoothness_ok: bool,
    smoothness_degenerate: bool,
    smoothness_worst_residual: f64,
    pass: bool,
}

fn cap(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        1e308
    }
}

pub fn run(tau: f64, family: FamilyArg, b: Option<f64>, c: Option<f64>, out: &Path) -> CmdResult {
    ensure_dir(out)?;
    if family == FamilyArg::Gc {
        return run_gc(out);
    }
    let profile = metric::build_psi(tau, (-12.0, 12.0))
        .map_err(|e| CmdError(format!("profile construction failed: {e}")))?;
    let (fam, param_name, param_value, bounds, admissible) = match family {
        FamilyArg::A => {
            if b.is_some() {
                return Err(CmdError("--b applies to family B only".into()));
            }
            let c = c.unwrap_or(1.0);
            (Family::A { c }, "c", c, None, None)
        }
        FamilyArg::B => {
            if c.is_some() {
                return Err(CmdError("--c applies to family A only".into()));
            }
            let pole = s2cubic::critical::PoleData::new(tau)?;
            let grid = metric::b_bounds(&profile, &pole)?;
            let phi = metric::b_bounds_via_phi(&pole);
            let b = b.unwrap_or(grid.upper + 1.0);
            let admissible = b > grid.upper || b < grid.lower;
            (
                Family::B { b },
                "b",
                b,
                Some(BoundsOut {
                    lower: grid.lower,
                    upper: grid.upper,
                    lower_via_phi: phi.lower,
                    upper_via_phi: phi.upper,
                }),
                Some(admissible),
            )
        }
        FamilyArg::Gc => unreachable!(),
    };

    // Conformal-factor and curvature scan.
    let surf = FamilySurface::new(&profile, fam);
    let mut lambda_min = f64::INFINITY;
    let (mut k_min, mut k_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=60 {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / 60.0;
        for k in 0..=60 {
            let y = -4.0 + 8.0 * k as f64 / 60.0;
            let lam = metric::conformal_factor(&surf, phi, y);
            lambda_min = lambda_min.min(lam);
            if let Ok(kg) = metric::gaussian_curvature(&surf, phi, y) {
                k_min = k_min.min(kg);
                k_max = k_max.max(kg);
            }
        }
    }

    let rep = metric::pole_smoothness_check(tau, &fam);
    let worst = rep
        .charts
        .iter()
        .map(|ch| ch.metric_residual.max(ch.potential_residual))
        .fold(0.0f64, f64::max);
    let smooth_ok = !rep.degenerate && rep.charts.iter().all(|ch| ch.ok);
    let pass = lambda_min > 0.0 && smooth_ok;
    let manifest = Manifest {
        family: format!("{family:?}"),
        tau,
        param_name: param_name.into(),
        param_value,
        b_bounds: bounds,
        admissible,
        lambda_min,
        curvature_min: cap(k_min),
        curvature_max: cap(k_max),
        smoothness_ok: smooth_ok,
        smoothness_degenerate: rep.degenerate,
        smoothness_worst_residual: cap(worst),
        pass,
    };
    write_json(out, "metric.json", &manifest)?;
    println!(
        "metric manifest for family {family:?} at tau = {tau}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { Outcome::Pass } else { Outcome::VerificationFailed })
}

#[derive(Serialize)]
struct GcManifest {
    family: String,
    lambda_equator: f64,
    y_span: f64,
    theta_min: f64,
    theta_max: f64,
    pass: bool,
}

fn run_gc(out: &Path) -> CmdResult {
    let map = s2cubic::gc::conformal_polar_coords(&s2cubic::gc::gc_profile(), 6.0)
        .map_err(|e| CmdError(format!("polar chart failed: {e}")))?;
    let mut rows = Vec::new();
    let n = 240;
    for k in 0..=n {
        let y = -6.0 + 12.0 * (k as f64) / (n as f64);
        rows.push(vec![fmt(y), fmt(map.lambda(y)), fmt(map.potential(y))]);
    }
    write_csv(out, "gc_profile.csv", "y,lambda,potential", &rows)?;
    let manifest = GcManifest {
        family: "Gc".into(),
        lambda_equator: map.lambda(0.0),
        y_span: 6.0,
        theta_min: map.theta(-6.0).min(map.theta(6.0)),
        theta_max: map.theta(-6.0).max(map.theta(6.0)),
        pass: true,
    };
    write_json(out, "metric.json", &manifest)?;
    println!("rigid-body conformal profile written to {}", out.display());
    Ok(Outcome::Pass)
}
