//! gc-match: fit the Hamiltonian equivalence between the rigid-body
//! conformal profile and the limiting second family.

use crate::fixture::resolve_t;
use crate::output::{ensure_dir, fmt, write_csv, write_json};
use crate::{CmdError, CmdResult, Outcome};
use s2cubic::gc::{self, YProfile};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct Report {
    tau: f64,
    b: f64,
    c0: f64,
    c3: f64,
    y1: f64,
    sign: i32,
    residual_v: f64,
    residual_k: f64,
    residual: f64,
    tol: f64,
    fixture_hash: String,
    pass: bool,
}

pub fn run(
    tau: Option<f64>,
    b: Option<f64>,
    tol: f64,
    fixture: Option<&Path>,
    out: &Path,
) -> CmdResult {
    if !(tol > 0.0) {
        return Err(CmdError("--tol must be positive".into()));
    }
    ensure_dir(out)?;
    let (t_crit, hash) = resolve_t(fixture)?;
    let tau = tau.unwrap_or(t_crit);
    let b = match b {
        Some(b) => b,
        None => gc::gc_b_value(tau)
            .map_err(|e| CmdError(format!("matched b requires the limiting profile: {e}")))?,
    };
    let p_gc = YProfile::gc(6.0)?;
    let p_b = YProfile::family_b(tau, b, 10.0)?;
    let fit = gc::match_equivalence(&p_gc, &p_b, (-4.0, 4.0))?;

    // Matched-profile table over the overlap of both charts.
    let mut rows = Vec::new();
    for k in 0..=200 {
        let y = -6.0 + 12.0 * k as f64 / 200.0;
        let y2 = fit.sign as f64 * y + fit.y1;
        if let (Ok((qg, vg)), Ok((qb, vb))) = (p_gc.eval(y), p_b.eval(y2)) {
            rows.push(vec![
                fmt(y),
                fmt(qg),
                fmt(vg),
                fmt(fit.c3 * qb),
                fmt(fit.c0 * vb),
            ]);
        }
    }
    write_csv(out, "gc_match.csv", "y,q_gc,v_gc,q_family_scaled,v_family_scaled", &rows)?;

    let pass = fit.residual() <= tol;
    let report = Report {
        tau,
        b,
        c0: fit.c0,
        c3: fit.c3,
        y1: fit.y1,
        sign: fit.sign,
        residual_v: fit.residual_v,
        residual_k: fit.residual_k,
        residual: fit.residual(),
        tol,
        fixture_hash: hash,
        pass,
    };
    write_json(out, "gc_match.json", &report)?;
    println!(
        "equivalence fit: C0 = {:.8}, C3 = {:.8}, y1 = {:.8}, sign = {}, residual = {:.3e} -> {}",
        fit.c0,
        fit.c3,
        fit.y1,
        fit.sign,
        fit.residual(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { Outcome::Pass } else { Outcome::VerificationFailed })
}
