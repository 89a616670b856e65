//! Command-line front end: builds the integrable families on the sphere,
//! computes the critical parameter by two methods, and runs the
//! verification, sweep, and equivalence reports.
//!
//! Exit codes: 0 all checks passed, 1 a verification threshold failed,
//! 2 usage or I/O error.

mod commands;
mod fixture;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "s2cubic",
    about = "Integrable conservative systems on S^2 with cubic integrals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "GC", alias = "gc")]
    Gc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    /// All four traceable separatrix branches.
    All,
    /// Stable branches of the lower saddle (0, -1/2).
    LowerStable,
    /// Unstable branches of the upper saddle (0, 1).
    UpperUnstable,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the critical parameter T by bisection and by the
    /// separatrix limit; write the comparison and the fixture file.
    ///
    /// Artifacts: find_t.json (both values, difference, pass flag) and the
    /// fixture JSON with a settings hash.
    #[command(name = "find-T", alias = "find-t")]
    FindT {
        /// Bisection tolerance on the parameter bracket.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Separatrix extent for the limit fit.
        #[arg(long, default_value_t = 60.0)]
        qmax: f64,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Fixture path (defaults to <out>/fixture.json).
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Emit the planar phase portrait: equilibria with eigen-data
    /// (equilibria.csv: q,p,kind,eig1,eig2), four separatrix branches
    /// (separatrix_*.csv: q,p), sample orbits (orbits.csv:
    /// orbit,tau,q,p), and the refined T estimate (portrait.json).
    PhasePortrait {
        /// Separatrix extent in q.
        #[arg(long, default_value_t = 50.0)]
        qmax: f64,
        /// Which separatrix branches to trace.
        #[arg(long, value_enum, default_value_t = BranchArg::All)]
        branch: BranchArg,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Solve the profile equation for psi at a parameter value.
    ///
    /// Artifacts: psi.csv (y,psi,psi1,psi2) and psi.json (parameter,
    /// stationary point, range of m = psi^2 - psi'^2).
    SolvePsi {
        /// Profile parameter tau in [-T, T].
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
        /// Half-width of the y interval.
        #[arg(long, default_value_t = 12.0)]
        y_range: f64,
        /// Grid step of the CSV output.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Build the metric manifest of a family: parameter, b-bounds by both
    /// methods, pole smoothness, conformal-factor and curvature ranges.
    ///
    /// Artifacts: metric.json; for the rigid-body profile additionally
    /// gc_profile.csv (y,lambda,potential).
    BuildMetric {
        /// Profile parameter tau in [-T, T].
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Family-B parameter.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Family-A constant.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the verification battery for a family spec: bracket residuals
    /// at random states, conservation drift along trajectories, the PDE
    /// criterion, pole smoothness, and the b-bound cross-check. Exit 1 if
    /// any threshold fails.
    ///
    /// Artifacts: verify.json (one entry per check with value, threshold,
    /// pass flag; embeds the fixture hash).
    Verify {
        /// Profile parameter tau; defaults to 0.5 T.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<f64>,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Family-B parameter; defaults to the admissible b_* + 1.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Family-A constant.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        /// Number of random states / trajectories.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        /// Trajectory horizon for the drift check.
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        /// Bracket-residual threshold.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Fixture file to pin T (written by find-T).
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Tabulate b-bounds, curvature range, and worst conservation drift
    /// over a grid of parameters (fractions of T). Partial failures are
    /// flagged in the status column and the run continues.
    ///
    /// Artifacts: sweep.csv (tau_frac,tau,b_lower,b_upper,b_lower_phi,
    /// b_upper_phi,curv_min,curv_max,drift_max,status).
    Sweep {
        /// Comma-separated list of tau values as fractions of T.
        #[arg(long)]
        taus: String,
        /// Worker threads.
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Fit the Hamiltonian equivalence between the rigid-body profile and
    /// the limiting second family; exit 1 if the joint residual exceeds
    /// the tolerance.
    ///
    /// Artifacts: gc_match.json (fit constants, gauge, residuals,
    /// fixture hash) and gc_match.csv (y, matched profiles).
    GcMatch {
        /// Profile parameter; defaults to the critical value T.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<f64>,
        /// Family-B parameter; defaults to psi(y0)^2 at the stationary point.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Joint sup-residual threshold.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Fixture file to pin T.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Command outcome: verification commands distinguish pass from fail.
pub enum Outcome {
    Pass,
    VerificationFailed,
}

/// Errors that terminate with exit code 2.
#[derive(Debug)]
pub struct CmdError(pub String);

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError(format!("I/O error: {e}"))
    }
}

impl From<s2cubic::CoreError> for CmdError {
    fn from(e: s2cubic::CoreError) -> Self {
        CmdError(format!("computation failed: {e}"))
    }
}

impl From<serde_json::Error> for CmdError {
    fn from(e: serde_json::Error) -> Self {
        CmdError(format!("serialization failed: {e}"))
    }
}

pub type CmdResult = Result<Outcome, CmdError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::FindT { tol, qmax, out, fixture } => {
            commands::find_t::run(tol, qmax, &out, fixture.as_deref())
        }
        Command::PhasePortrait { qmax, branch, out } => {
            commands::phase::run(qmax, branch, &out)
        }
        Command::SolvePsi { tau, y_range, step, out } => {
            commands::solve_psi::run(tau, y_range, step, &out)
        }
        Command::BuildMetric { tau, family, b, c, out } => {
            commands::build_metric::run(tau, family, b, c, &out)
        }
        Command::Verify { tau, family, b, c, seeds, horizon, tol, fixture, out } => {
            commands::verify::run(commands::verify::Args {
                tau,
                family,
                b,
                c,
                seeds,
                horizon,
                tol,
                fixture,
                out,
            })
        }
        Command::Sweep { taus, workers, out } => commands::sweep::run(&taus, workers, &out),
        Command::GcMatch { tau, b, tol, fixture, out } => {
            commands::gc_match::run(tau, b, tol, fixture.as_deref(), &out)
        }
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::from(0),
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
