//! find-T: both methods for the critical parameter, comparison, fixture.

use crate::fixture::Fixture;
use crate::output::{ensure_dir, write_json};
use crate::{CmdError, CmdResult, Outcome};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct Report {
    t_bisection: f64,
    bisection_error: f64,
    t_separatrix: f64,
    separatrix_residual: f64,
    delta: f64,
    threshold: f64,
    pass: bool,
    fixture_hash: String,
}

pub fn run(tol: f64, qmax: f64, out: &Path, fixture: Option<&Path>) -> CmdResult {
    if !(tol > 0.0) {
        return Err(CmdError("--tol must be positive".into()));
    }
    if !(qmax >= 20.0) {
        return Err(CmdError("--qmax must be at least 20 for the separatrix limit".into()));
    }
    ensure_dir(out)?;
    let bis = s2cubic::critical::find_t_bisection(tol)?;
    let sep = s2cubic::phase::estimate_t_from_separatrix(qmax, None)?;
    let delta = (bis.t - sep.t).abs();
    let threshold = 1e-4f64.max(tol);
    let pass = delta <= threshold;
    let fx = Fixture::new(bis.t, sep.t, tol, qmax);
    let report = Report {
        t_bisection: bis.t,
        bisection_error: bis.error_estimate,
        t_separatrix: sep.t,
        separatrix_residual: sep.error_estimate,
        delta,
        threshold,
        pass,
        fixture_hash: fx.hash.clone(),
    };
    write_json(out, "find_t.json", &report)?;
    let default_path = out.join("fixture.json");
    let fixture_path = fixture.unwrap_or(&default_path);
    fx.save(fixture_path)?;
    println!("T (bisection)  = {:.12}  (bracket {:.3e})", bis.t, bis.error_estimate);
    println!("T (separatrix) = {:.12}  (fit residual {:.3e})", sep.t, sep.error_estimate);
    println!("|delta|        = {delta:.3e}  threshold {threshold:.1e}  -> {}",
        if pass { "PASS" } else { "FAIL" });
    println!("fixture: {} (hash {})", fixture_path.display(), fx.hash);
    Ok(if pass { Outcome::Pass } else { Outcome::VerificationFailed })
}
