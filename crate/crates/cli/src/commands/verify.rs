//! verify: the verification battery for one family spec. Every check is a
//! (value, threshold, pass) entry; exit 1 when any entry fails.

use crate::fixture::resolve_t;
use crate::output::{ensure_dir, write_json};
use crate::{CmdError, CmdResult, FamilyArg, Outcome};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use s2cubic::cubic;
use s2cubic::metric::{self, CotangentState, Family, FamilySurface};
use serde::Serialize;
use std::path::{Path, PathBuf};

pub struct Args {
    pub tau: Option<f64>,
    pub family: FamilyArg,
    pub b: Option<f64>,
    pub c: f64,
    pub seeds: usize,
    pub horizon: f64,
    pub tol: f64,
    pub fixture: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    op: String,
    threshold: f64,
    pass: bool,
}

impl Check {
    fn le(name: &str, value: f64, threshold: f64) -> Check {
        let value = if value.is_finite() { value } else { 1e308 };
        Check { name: name.into(), value, op: "<=".into(), threshold, pass: value <= threshold }
    }

    fn positive(name: &str, value: f64) -> Check {
        let value = if value.is_finite() { value } else { -1e308 };
        Check { name: name.into(), value, op: ">".into(), threshold: 0.0, pass: value > 0.0 }
    }
}

#[derive(Serialize)]
struct Report {
    family: String,
    tau: f64,
    param_name: String,
    param_value: f64,
    seeds: usize,
    horizon: f64,
    fixture_hash: String,
    checks: Vec<Check>,
    pass: bool,
}

/// Deterministic random cotangent states: phi in [0, 2pi), y in [-2, 2],
/// momenta in [-1, 1]^2 with norm at least 0.3.
fn random_states(n: usize) -> Vec<CotangentState> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let y = rng.gen_range(-2.0..2.0);
        let p_phi: f64 = rng.gen_range(-1.0..1.0);
        let p_y: f64 = rng.gen_range(-1.0..1.0);
        if (p_phi * p_phi + p_y * p_y).sqrt() >= 0.3 {
            out.push(CotangentState { phi, y, p_phi, p_y });
        }
    }
    out
}

pub fn run(args: Args) -> CmdResult {
    if args.seeds == 0 {
        return Err(CmdError("--seeds must be positive".into()));
    }
    if !(args.horizon > 0.0) {
        return Err(CmdError("--horizon must be positive".into()));
    }
    if !(args.tol > 0.0) {
        return Err(CmdError("--tol must be positive".into()));
    }
    ensure_dir(&args.out)?;
    let (t_crit, hash) = resolve_t(args.fixture.as_deref())?;
    match args.family {
        FamilyArg::Gc => run_gc(&args, t_crit, hash),
        _ => run_family(&args, t_crit, hash),
    }
}

fn run_family(args: &Args, t_crit: f64, hash: String) -> CmdResult {
    let tau = args.tau.unwrap_or(0.5 * t_crit);
    let profile = metric::build_psi(tau, (-12.0, 12.0))
        .map_err(|e| CmdError(format!("profile construction failed: {e}")))?;
    let mut checks: Vec<Check> = Vec::new();
    let (family, param_name, param_value) = match args.family {
        FamilyArg::A => (Family::A { c: args.c }, "c", args.c),
        FamilyArg::B => {
            let pole = s2cubic::critical::PoleData::new(tau)?;
            let grid = metric::b_bounds(&profile, &pole)?;
            let phi = metric::b_bounds_via_phi(&pole);
            let gap =
                (grid.lower - phi.lower).abs().max((grid.upper - phi.upper).abs());
            checks.push(Check::le("b_bound_methods_agree", gap, 1e-4));
            let b = args.b.unwrap_or(grid.upper + 1.0);
            (Family::B { b }, "b", b)
        }
        FamilyArg::Gc => unreachable!(),
    };

    // Conformal-factor positivity scan (criterion for admissibility).
    let surf = FamilySurface::new(&profile, family);
    let mut lambda_min = f64::INFINITY;
    for i in 0..=100 {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / 100.0;
        for k in 0..=100 {
            let y = -8.0 + 16.0 * k as f64 / 100.0;
            lambda_min = lambda_min.min(metric::conformal_factor(&surf, phi, y));
        }
    }
    checks.push(Check::positive("conformal_factor_min", lambda_min));

    // Bracket residuals at random states (conservative lift).
    let states = random_states(args.seeds);
    let mut bracket_max: f64 = 0.0;
    for st in &states {
        let r = (|| -> s2cubic::Result<f64> {
            let e = metric::hamiltonian_eval(&profile, &family, st)?;
            let lifted = FamilySurface::with_scale(&profile, family, e);
            let h = |s: &CotangentState| metric::hamiltonian_eval(&profile, &family, s);
            let f = |s: &CotangentState| cubic::cubic_integral_eval(&lifted, s);
            cubic::bracket_residual(&h, &f, st)
        })();
        bracket_max = bracket_max.max(r.unwrap_or(f64::INFINITY));
    }
    checks.push(Check::le("bracket_residual_max", bracket_max, args.tol));

    // Conservation drift along trajectories.
    let mut drift_max: f64 = 0.0;
    for st in states.iter().take(args.seeds.min(20)) {
        let d = cubic::conservation_drift(
            &profile,
            &family,
            st,
            args.horizon,
            cubic::FlowMode::Conservative,
        );
        drift_max = drift_max.max(d.unwrap_or(f64::INFINITY));
    }
    checks.push(Check::le("conservation_drift_max", drift_max, 1e-7));

    // Integrability PDE, real form (analytic).
    let mut eq_max: f64 = 0.0;
    for i in 0..20 {
        let phi = 0.1 + 2.0 * std::f64::consts::PI * i as f64 / 20.0;
        for k in 0..20 {
            let y = -4.0 + 8.0 * k as f64 / 19.0;
            eq_max = eq_max.max(cubic::eqpde_residual(&surf, phi, y).abs());
        }
    }
    checks.push(Check::le("eqpde_residual_max", eq_max, 1e-8));

    // Complex recurrence and endpoint holomorphicity.
    let phis: Vec<f64> = (0..8).map(|i| 0.2 + 6.0 * i as f64 / 8.0).collect();
    let ys: Vec<f64> = (0..8).map(|k| -3.0 + 6.0 * k as f64 / 7.0).collect();
    let (rows, hol) = cubic::systpde_check(&surf, &phis, &ys)?;
    let row_max = rows.iter().fold(0.0f64, |a, r| a.max(*r));
    checks.push(Check::le("systpde_row_max", row_max, 1e-6));
    checks.push(Check::le("holomorphicity_max", hol, 1e-8));

    // Pole smoothness in both polar charts.
    let rep = metric::pole_smoothness_check(tau, &family);
    let worst = rep
        .charts
        .iter()
        .map(|c| c.metric_residual.max(c.potential_residual))
        .fold(0.0f64, f64::max);
    let smooth = if rep.degenerate { f64::INFINITY } else { worst };
    checks.push(Check::le("pole_smoothness_residual", smooth, 1e-6));

    finish(args, tau, format!("{:?}", args.family), param_name, param_value, hash, checks)
}

fn run_gc(args: &Args, t_crit: f64, hash: String) -> CmdResult {
    let tau = args.tau.unwrap_or(t_crit);
    let mut checks = Vec::new();

    // Closed forms against the ambient pullback.
    let p = s2cubic::gc::gc_profile();
    let mut pull_max: f64 = 0.0;
    for i in 1..10 {
        let theta = std::f64::consts::PI * i as f64 / 10.0;
        for phi in [0.0, 1.1, 2.3] {
            let (a_fd, b_fd, v_fd) = s2cubic::gc::gc_pullback_fd(theta, phi, 1e-3);
            pull_max = pull_max
                .max(((p.a)(theta) - a_fd).abs())
                .max(((p.b)(theta) - b_fd).abs())
                .max(((p.v)(theta) * phi.cos() - v_fd).abs());
        }
    }
    checks.push(Check::le("pullback_residual_max", pull_max, 1e-9));

    // Self match must be the identity gauge.
    let p_gc = s2cubic::gc::YProfile::gc(6.0)?;
    let self_fit = s2cubic::gc::match_equivalence(&p_gc, &p_gc, (-1.0, 1.0))?;
    let self_dev = self_fit
        .residual()
        .max((self_fit.c0 - 1.0).abs())
        .max((self_fit.c3 - 1.0).abs())
        .max(self_fit.y1.abs());
    checks.push(Check::le("self_match_deviation", self_dev, 1e-12));

    // Equivalence with the limiting second family.
    let b = match args.b {
        Some(b) => b,
        None => s2cubic::gc::gc_b_value(tau)
            .map_err(|e| CmdError(format!("matched b requires the limiting profile: {e}")))?,
    };
    let p_b = s2cubic::gc::YProfile::family_b(tau, b, 10.0)?;
    let fit = s2cubic::gc::match_equivalence(&p_gc, &p_b, (-4.0, 4.0))?;
    checks.push(Check::le("gc_match_residual", fit.residual(), 1e-3));

    finish(args, tau, "Gc".into(), "b", b, hash, checks)
}

fn finish(
    args: &Args,
    tau: f64,
    family: String,
    param_name: &str,
    param_value: f64,
    fixture_hash: String,
    checks: Vec<Check>,
) -> CmdResult {
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!(
            "{:32} {:>14.6e}  {} {:>9.1e}  {}",
            c.name,
            c.value,
            c.op,
            c.threshold,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let report = Report {
        family,
        tau,
        param_name: param_name.into(),
        param_value,
        seeds: args.seeds,
        horizon: args.horizon,
        fixture_hash,
        checks,
        pass,
    };
    write_json(&args.out, "verify.json", &report)?;
    println!("verification: {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { Outcome::Pass } else { Outcome::VerificationFailed })
}

/// Write a verification report path helper used by tests.
pub fn report_path(out: &Path) -> PathBuf {
    out.join("verify.json")
}
