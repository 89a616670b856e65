//! solve-psi: the profile psi(y) on a grid, with the stationary point and
//! the range of m = psi^2 - psi'^2.

use crate::output::{ensure_dir, fmt, write_csv, write_json};
use crate::{CmdError, CmdResult, Outcome};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct Report {
    tau: f64,
    y_range: f64,
    step: f64,
    stationary_point: Option<(f64, f64)>,
    m_min: f64,
    m_max: f64,
}

pub fn run(tau: f64, y_range: f64, step: f64, out: &Path) -> CmdResult {
    if !(y_range > 0.0) {
        return Err(CmdError("--y-range must be positive".into()));
    }
    if !(step > 0.0 && step <= y_range) {
        return Err(CmdError("--step must be positive and at most the range".into()));
    }
    ensure_dir(out)?;
    let profile = s2cubic::metric::build_psi(tau, (-y_range, y_range))
        .map_err(|e| CmdError(format!("profile construction failed: {e}")))?;
    let n = (2.0 * y_range / step).round() as usize;
    let mut rows = Vec::with_capacity(n + 1);
    let (mut m_min, mut m_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=n {
        let y = -y_range + 2.0 * y_range * (k as f64) / (n as f64);
        let j = profile.jet(y);
        rows.push(vec![fmt(y), fmt(j[0]), fmt(j[1]), fmt(j[2])]);
        // m is roundoff-limited past |y| ~ 8; keep the reported range there.
        if y.abs() <= 8.0 {
            let m = profile.m(y);
            m_min = m_min.min(m);
            m_max = m_max.max(m);
        }
    }
    write_csv(out, "psi.csv", "y,psi,psi1,psi2", &rows)?;
    let report = Report {
        tau,
        y_range,
        step,
        stationary_point: profile.stationary_point(),
        m_min,
        m_max,
    };
    write_json(out, "psi.json", &report)?;
    println!("psi profile at tau = {tau} written to {}", out.display());
    Ok(Outcome::Pass)
}
