//! phase-portrait: equilibria, separatrix branches, sample orbits, and
//! the refined T estimate from the separatrix limit.

use crate::output::{ensure_dir, fmt, write_csv, write_json};
use crate::{BranchArg, CmdError, CmdResult, Outcome};
use s2cubic::phase::{self, Branch, FpKind, PhasePoint};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct Report {
    qmax: f64,
    t_estimate: Option<f64>,
    fit_residual: Option<f64>,
    branches: Vec<String>,
}

/// The four traceable branches: the lower saddle's stable pair carries the
/// separatrix limit; the upper saddle's unstable pair connects to the
/// nodes. Negative-q branches come from the q -> -q mirror symmetry.
fn branch_specs(filter: BranchArg) -> Vec<(&'static str, PhasePoint, Branch, bool)> {
    let lower = PhasePoint::new(0.0, -0.5);
    let upper = PhasePoint::new(0.0, 1.0);
    let all = vec![
        ("lower_stable_pos", lower, Branch::StablePos, false),
        ("lower_stable_neg", lower, Branch::StablePos, true),
        ("upper_unstable_pos", upper, Branch::UnstablePos, false),
        ("upper_unstable_neg", upper, Branch::UnstablePos, true),
    ];
    all.into_iter()
        .filter(|(name, _, _, _)| match filter {
            BranchArg::All => true,
            BranchArg::LowerStable => name.starts_with("lower"),
            BranchArg::UpperUnstable => name.starts_with("upper"),
        })
        .collect()
}

pub fn run(qmax: f64, branch: BranchArg, out: &Path) -> CmdResult {
    if !(qmax > 1.0) {
        return Err(CmdError("--qmax must exceed 1".into()));
    }
    ensure_dir(out)?;

    // Equilibria table.
    let fps = phase::classify_fixed_points();
    let rows: Vec<Vec<String>> = fps
        .iter()
        .map(|f| {
            vec![
                fmt(f.location.q),
                fmt(f.location.p),
                format!("{:?}", f.kind).to_lowercase(),
                fmt(f.eigenvalues[0]),
                fmt(f.eigenvalues[1]),
            ]
        })
        .collect();
    write_csv(out, "equilibria.csv", "q,p,kind,eig1,eig2", &rows)?;

    // Separatrix branches.
    let mut written = Vec::new();
    for (name, loc, br, mirror) in branch_specs(branch) {
        let saddle = fps
            .iter()
            .find(|f| f.kind == FpKind::Saddle && f.location.q == loc.q && f.location.p == loc.p)
            .expect("saddle present");
        let curve = phase::trace_separatrix(saddle, br, qmax, phase::SEED_DELTA)?;
        let rows: Vec<Vec<String>> = curve
            .iter()
            .map(|pt| vec![fmt(if mirror { -pt.q } else { pt.q }), fmt(pt.p)])
            .collect();
        let file = format!("separatrix_{name}.csv");
        write_csv(out, &file, "q,p", &rows)?;
        written.push(file);
    }

    // Sample orbits: planar projections of subcritical trajectories.
    let t_crit = s2cubic::critical::t_fixture();
    let mut orbit_rows: Vec<Vec<String>> = Vec::new();
    for (i, frac) in [0.25, 0.5, 0.75].iter().enumerate() {
        let tau = frac * t_crit;
        let traj = s2cubic::ode::integrate_ivp(&s2cubic::ode::IvpSpec::new(tau, (-0.5, 5.0)))?;
        let (_, hi) = traj.t_range();
        for (_, q, p) in s2cubic::ode::log_reduction(&traj, 0.02, hi.min(5.0))? {
            orbit_rows.push(vec![format!("{i}"), fmt(tau), fmt(q), fmt(p)]);
        }
    }
    write_csv(out, "orbits.csv", "orbit,tau,q,p", &orbit_rows)?;

    // Refined T estimate when the extent allows the limit fit.
    let (t_estimate, fit_residual) = if qmax >= 20.0 {
        let est = phase::estimate_t_from_separatrix(qmax, None)?;
        (Some(est.t), Some(est.error_estimate))
    } else {
        (None, None)
    };
    let report = Report { qmax, t_estimate, fit_residual, branches: written };
    write_json(out, "portrait.json", &report)?;
    if let Some(t) = t_estimate {
        println!("separatrix T estimate at qmax {qmax}: {t:.10}");
    }
    println!("phase portrait written to {}", out.display());
    Ok(Outcome::Pass)
}
