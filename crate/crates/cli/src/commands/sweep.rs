//! sweep: tabulate b-bounds, curvature range, and worst conservation
//! drift over a parameter grid. Rows are computed by a worker pool and
//! merged by index; a single serializer writes the CSV.

use crate::output::{ensure_dir, fmt, write_csv};
use crate::{CmdError, CmdResult, Outcome};
use s2cubic::cubic;
use s2cubic::metric::{self, CotangentState, Family, FamilySurface};
use std::path::Path;

const HEADER: &str =
    "tau_frac,tau,b_lower,b_upper,b_lower_phi,b_upper_phi,curv_min,curv_max,drift_max,status";

struct RowData {
    b_lower: f64,
    b_upper: f64,
    b_lower_phi: f64,
    b_upper_phi: f64,
    curv_min: f64,
    curv_max: f64,
    drift_max: f64,
}

fn compute_row(tau: f64) -> Result<RowData, String> {
    let profile =
        metric::build_psi(tau, (-12.0, 12.0)).map_err(|e| format!("profile: {e}"))?;
    let pole = s2cubic::critical::PoleData::new(tau).map_err(|e| format!("pole data: {e}"))?;
    let grid = metric::b_bounds(&profile, &pole).map_err(|e| format!("b bounds: {e}"))?;
    let phi_b = metric::b_bounds_via_phi(&pole);

    // Curvature range of the first family with c = 1.
    let surf = FamilySurface::new(&profile, Family::A { c: 1.0 });
    let (mut k_min, mut k_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=30 {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / 30.0;
        for k in 0..=30 {
            let y = -4.0 + 8.0 * k as f64 / 30.0;
            if let Ok(kg) = metric::gaussian_curvature(&surf, phi, y) {
                k_min = k_min.min(kg);
                k_max = k_max.max(kg);
            }
        }
    }

    // Worst conservation drift of the second family at the admissible
    // parameter b_* + 1, over a fixed set of states.
    let family = Family::B { b: grid.upper + 1.0 };
    let states = [
        CotangentState { phi: 0.9, y: -0.4, p_phi: 0.8, p_y: 0.3 },
        CotangentState { phi: 2.6, y: 0.8, p_phi: -0.5, p_y: 0.7 },
    ];
    let mut drift_max: f64 = 0.0;
    for st in &states {
        let d = cubic::conservation_drift(&profile, &family, st, 5.0, cubic::FlowMode::Conservative)
            .map_err(|e| format!("drift: {e}"))?;
        drift_max = drift_max.max(d);
    }
    Ok(RowData {
        b_lower: grid.lower,
        b_upper: grid.upper,
        b_lower_phi: phi_b.lower,
        b_upper_phi: phi_b.upper,
        curv_min: k_min,
        curv_max: k_max,
        drift_max,
    })
}

fn format_row(frac: f64, tau: f64, data: Result<RowData, String>) -> Vec<String> {
    match data {
        Ok(d) => vec![
            fmt(frac),
            fmt(tau),
            fmt(d.b_lower),
            fmt(d.b_upper),
            fmt(d.b_lower_phi),
            fmt(d.b_upper_phi),
            fmt(d.curv_min),
            fmt(d.curv_max),
            fmt(d.drift_max),
            "ok".into(),
        ],
        Err(e) => {
            let mut row: Vec<String> = vec![fmt(frac), fmt(tau)];
            row.extend(std::iter::repeat("nan".to_string()).take(7));
            row.push(format!("error: {}", e.replace(',', ";")));
            row
        }
    }
}

pub fn run(taus: &str, workers: usize, out: &Path) -> CmdResult {
    let fracs: Vec<f64> = taus
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CmdError(format!("invalid tau fraction '{s}' in --taus")))
        })
        .collect::<Result<_, _>>()?;
    if fracs.is_empty() {
        return Err(CmdError("--taus is empty: give a comma-separated list of fractions of T".into()));
    }
    if workers == 0 {
        return Err(CmdError("--workers must be positive".into()));
    }
    ensure_dir(out)?;
    // Pre-warm the shared fixture so workers do not race on it.
    let t_crit = s2cubic::critical::t_fixture();

    let n_workers = workers.min(fracs.len());
    let mut results: Vec<(usize, Vec<String>)> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..n_workers {
            let fracs = &fracs;
            handles.push(scope.spawn(move || {
                let mut rows = Vec::new();
                for (idx, frac) in fracs.iter().enumerate() {
                    if idx % n_workers != w {
                        continue;
                    }
                    let tau = frac * t_crit;
                    rows.push((idx, format_row(*frac, tau, compute_row(tau))));
                }
                rows
            }));
        }
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    results.sort_by_key(|(idx, _)| *idx);
    let rows: Vec<Vec<String>> = results.into_iter().map(|(_, row)| row).collect();
    write_csv(out, "sweep.csv", HEADER, &rows)?;
    println!("sweep table with {} rows written to {}", rows.len(), out.display());
    Ok(Outcome::Pass)
}
