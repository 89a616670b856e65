//! The critical constant T: probe, bisection, the symmetric-jet refinement,
//! and the boundary-chart function g with the pole functions derived from it.

use crate::dopri5::{self, Controller, Event, EventDir, Status};
use crate::error::{CoreError, Result};
use crate::ode::{self, JetState};
use crate::phase::{CriticalResult, Method};
use serde::Serialize;
use std::sync::OnceLock;

/// Squared radius of the node disk that certifies a globally positive leg.
const NODE_DISK_SQ: f64 = 1e-12;

/// Outcome of probing one parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ProbeOutcome {
    GlobalPositive,
    DerivativeZero { t0: f64 },
    Blowup { t_star: f64 },
}

fn probe_leg(tau: f64, sign: f64, t_max: f64) -> Result<Option<ProbeOutcome>> {
    // On the backward leg x < 0, so the reduced orbit of a globally positive
    // solution converges to the node (-1, 0) instead of (1, 0).
    let center = sign;
    let ctrl = Controller { rtol: 1e-11, atol: 1e-13, max_step: 0.5, event_tol: 1e-12 };
    let mut events = vec![
        Event { g: Box::new(|_t, y: &[f64; 3]| y[1]), direction: EventDir::Any, terminal: true },
        Event {
            g: Box::new(|_t, y: &[f64; 3]| {
                ode::BLOWUP_THRESHOLD - y[0].abs().max(y[2].abs())
            }),
            direction: EventDir::Down,
            terminal: true,
        },
        Event {
            g: Box::new(move |t: f64, y: &[f64; 3]| {
                if t.abs() < 0.5 || y[0] == 0.0 {
                    return 1.0;
                }
                let q = y[1] / y[0];
                let p = y[2] / y[0] - q * q;
                (q - center).powi(2) + p * p - NODE_DISK_SQ
            }),
            direction: EventDir::Down,
            terminal: true,
        },
    ];
    let run = dopri5::integrate(
        &ode::jet_system,
        0.0,
        [0.0, 1.0, tau],
        sign * t_max,
        &ctrl,
        &mut events,
    );
    match run {
        Ok(sol) => match sol.status {
            Status::EventStop(2) => Ok(None), // disk entered: leg is globally positive
            Status::EventStop(0) => {
                Ok(Some(ProbeOutcome::DerivativeZero { t0: sol.t_end() }))
            }
            Status::EventStop(_) => Ok(Some(ProbeOutcome::Blowup { t_star: sol.t_end() })),
            Status::Completed => Err(CoreError::Inconclusive { t_max }),
        },
        // Past the critical value x' decays to zero so fast that the step
        // size underflows before a clean sign change; a vanishing
        // derivative at the last reliable point is the same verdict.
        Err(CoreError::StepSizeUnderflow { t }) => {
            Ok(Some(ProbeOutcome::DerivativeZero { t0: t }))
        }
        Err(e) => Err(e),
    }
}

/// Decide whether x' stays positive globally for this tau.
///
/// Both time directions are probed: failures past the critical value occur
/// on the backward leg (the reflection tau -> -tau swaps the legs).
pub fn tau_probe(tau: f64, t_max: f64) -> Result<ProbeOutcome> {
    if t_max < 30.0 {
        return Err(CoreError::InvalidInput("probe horizon must be at least 30".into()));
    }
    if let Some(fail) = probe_leg(tau, 1.0, t_max)? {
        return Ok(fail);
    }
    if let Some(fail) = probe_leg(tau, -1.0, t_max)? {
        return Ok(fail);
    }
    Ok(ProbeOutcome::GlobalPositive)
}

/// Bisect the probe outcome over the bracket [0, 16].
pub fn find_t_bisection(tol: f64) -> Result<CriticalResult> {
    if !(tol >= 1e-10) {
        return Err(CoreError::InvalidInput(
            "bisection tolerance must be at least 1e-10".into(),
        ));
    }
    let (mut lo, mut hi) = (0.0f64, 16.0f64);
    if tau_probe(lo, 40.0)? != ProbeOutcome::GlobalPositive {
        return Err(CoreError::BracketFailure { lo, hi });
    }
    if tau_probe(hi, 40.0)? == ProbeOutcome::GlobalPositive {
        return Err(CoreError::BracketFailure { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if tau_probe(mid, 40.0)? == ProbeOutcome::GlobalPositive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalResult { t: 0.5 * (lo + hi), method: Method::Bisection, error_estimate: hi - lo })
}

/// High-precision data of the critical solution obtained by shooting from
/// the symmetric stationary point.
///
/// At the critical parameter the solution has a single stationary point
/// t0 < 0 with x(t0) < 0, x'''(t0) = 0; the local even power series
/// x(t0 + u) = x0 (1 - u^2/4 + u^4/384 - 7 u^6/23040 + ...)
/// follows from the equation. Integrating from a small u to the x = 0
/// crossing and rescaling to x' = 1 there recovers T = x''/x' and the
/// stationary data to near machine precision.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalProfileData {
    /// The critical parameter value.
    pub t: f64,
    /// Time of the stationary point of the critical solution.
    pub t0: f64,
    /// Value of the critical solution at the stationary point.
    pub x0: f64,
}

/// Evaluate the symmetric series jet at offset `u` from the stationary point.
pub fn symmetric_series_jet(x0: f64, t0: f64, u: f64) -> JetState {
    let u2 = u * u;
    let x = x0 * (1.0 - u2 / 4.0 + u2 * u2 / 384.0 - 7.0 * u2 * u2 * u2 / 23040.0);
    let x1 = x0 * (-u / 2.0 + u * u2 / 96.0 - 7.0 * u * u2 * u2 / 3840.0);
    let x2 = x0 * (-0.5 + u2 / 32.0 - 7.0 * u2 * u2 / 768.0);
    JetState::new(t0 + u, x, x1, x2)
}

/// Third derivative of the symmetric series at offset `u`.
pub fn symmetric_series_x3(x0: f64, u: f64) -> f64 {
    x0 * (u / 16.0 - 7.0 * u * u * u / 192.0)
}

/// Offset at which integration hands over to the series near the
/// stationary point.
pub const SERIES_HANDOVER: f64 = 0.05;

fn shoot_symmetric() -> Result<CriticalProfileData> {
    // Unnormalized germ: x0 = -1 at u = 0; integrate from the handover
    // offset to the x = 0 crossing.
    let j = symmetric_series_jet(-1.0, 0.0, SERIES_HANDOVER);
    let ctrl = Controller { rtol: 1e-13, atol: 1e-16, max_step: 0.1, event_tol: 1e-14 };
    let mut events = vec![Event {
        g: Box::new(|_t, y: &[f64; 3]| y[0]),
        direction: EventDir::Up,
        terminal: true,
    }];
    let sol = dopri5::integrate(
        &ode::jet_system,
        SERIES_HANDOVER,
        [j.x, j.x1, j.x2],
        10.0,
        &ctrl,
        &mut events,
    )?;
    if sol.status != Status::EventStop(0) {
        return Err(CoreError::NoStationaryPoint { tau: f64::NAN });
    }
    let te = sol.t_end();
    let ye = sol.y_end();
    let alpha = ye[1]; // x' at the crossing; rescale so that x' = 1 there
    Ok(CriticalProfileData { t: ye[2] / alpha, t0: -te, x0: -1.0 / alpha })
}

/// Cached critical-profile data (shooting method).
pub fn critical_profile() -> &'static CriticalProfileData {
    static CELL: OnceLock<CriticalProfileData> = OnceLock::new();
    CELL.get_or_init(|| shoot_symmetric().expect("symmetric shooting failed"))
}

/// Cached repository fixture for T (bisection at tolerance 1e-10).
pub fn t_fixture() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| find_t_bisection(1e-10).expect("bisection for T failed").t)
}

// ---------------------------------------------------------------------------
// Boundary chart: g(s) = sqrt(s) x(-log(s)/2).
// ---------------------------------------------------------------------------

/// Innermost s down to which the boundary-chart equation is integrated.
pub const G_S_MIN: f64 = 1e-9;

/// Solution of the boundary-chart equation together with the accumulated
/// quadrature Phi(s) = int_1^s 4 g'' (g - 2 s' g') ds'.
#[derive(Clone, Debug)]
pub struct GProfile {
    pub tau: f64,
    /// Dense solution of (g, g', g'', Phi) from s = 1 down to `G_S_MIN`.
    pub sol: dopri5::Solution<4>,
    /// Extrapolated limits at s = 0.
    pub g0: f64,
    pub g0p: f64,
    pub g0pp: f64,
    pub phi0: f64,
    /// Residual of the limit extrapolation.
    pub limit_residual: f64,
}

/// Right-hand side of the boundary-chart equation.
///
/// Substituting g(s) = sqrt(s) x(-log(s)/2) into the governing equation
/// gives g''' = (3 g' g'' + 4 s g''^2) / (g - 2 s g') with
/// g(1) = 0, g'(1) = -1/2, g''(1) = tau/4; the extra state accumulates
/// the Phi quadrature.
fn g_system(s: f64, y: &[f64; 4], dy: &mut [f64; 4]) -> Result<()> {
    let (g, g1, g2) = (y[0], y[1], y[2]);
    let den = g - 2.0 * s * g1;
    if den.abs() <= 1e-13 {
        return Err(CoreError::SingularDenominator { s });
    }
    dy[0] = g1;
    dy[1] = g2;
    dy[2] = (3.0 * g2 * g1 + 4.0 * s * g2 * g2) / den;
    dy[3] = 4.0 * g2 * den;
    Ok(())
}

/// Quadratic extrapolation to s = 0 through three geometric samples,
/// with the difference from the secant through the two smallest samples
/// as a residual estimate.
fn richardson_limit(samples: &[(f64, f64); 3]) -> (f64, f64) {
    let [(s0, f0), (s1, f1), (s2, f2)] = *samples;
    // Lagrange interpolation evaluated at s = 0.
    let l0 = (s1 * s2) / ((s0 - s1) * (s0 - s2));
    let l1 = (s0 * s2) / ((s1 - s0) * (s1 - s2));
    let l2 = (s0 * s1) / ((s2 - s0) * (s2 - s1));
    let quad = l0 * f0 + l1 * f1 + l2 * f2;
    let lin = f2 + (f2 - f1) * s2 / (s1 - s2);
    (quad, (quad - lin).abs())
}

/// Integrate the boundary-chart equation from s = 1 toward s = 0 and
/// extract the s = 0 limits by extrapolation from s in {1e-2, 1e-3, 1e-4}.
pub fn solve_g(tau: f64) -> Result<GProfile> {
    let t_crit = critical_profile().t;
    if !(tau > -t_crit - 1e-9 && tau <= t_crit + 1e-9) {
        return Err(CoreError::InvalidInput(format!(
            "tau = {tau} outside the admissible range (-T, T]"
        )));
    }
    let ctrl = Controller { rtol: 1e-12, atol: 1e-15, max_step: f64::INFINITY, event_tol: 1e-12 };
    let y0 = [0.0, -0.5, tau / 4.0, 0.0];
    let sol = dopri5::integrate(&g_system, 1.0, y0, G_S_MIN, &ctrl, &mut [])?;
    let sample = |s: f64| sol.eval(s).expect("sample inside the integrated range");
    // Quadratic extrapolation from s in {1e-2, 1e-3, 1e-4}; the same
    // extrapolation from a 10x finer window serves as the reported value
    // and the difference between the windows as the residual.
    let coarse = [1e-2, 1e-3, 1e-4];
    let fine = [1e-3, 1e-4, 1e-5];
    let mut limits = [0.0f64; 4];
    let mut residual: f64 = 0.0;
    for comp in 0..4 {
        let triple = |nodes: [f64; 3]| {
            richardson_limit(&[
                (nodes[0], sample(nodes[0])[comp]),
                (nodes[1], sample(nodes[1])[comp]),
                (nodes[2], sample(nodes[2])[comp]),
            ])
            .0
        };
        let (a, b) = (triple(coarse), triple(fine));
        limits[comp] = b;
        residual = residual.max((a - b).abs() / b.abs().max(1.0));
    }
    Ok(GProfile {
        tau,
        sol,
        g0: limits[0],
        g0p: limits[1],
        g0pp: limits[2],
        phi0: limits[3],
        limit_residual: residual,
    })
}

impl GProfile {
    /// Dense evaluation of (g, g', g'', Phi) at s in [G_S_MIN, 1].
    pub fn eval(&self, s: f64) -> [f64; 4] {
        if s >= 1.0 {
            return [0.0, -0.5, self.tau / 4.0, 0.0];
        }
        if s <= G_S_MIN {
            return [
                self.g0 + self.g0p * s,
                self.g0p,
                self.g0pp,
                self.phi0,
            ];
        }
        self.sol.eval(s).expect("s inside the integrated range")
    }

    /// zeta(s) = g - 2 s g'; equals exp(-t) x'(t) at s = exp(-2t).
    pub fn zeta(&self, s: f64) -> f64 {
        let v = self.eval(s);
        v[0] - 2.0 * s * v[1]
    }

    /// nu(s) = 4 g''(s) zeta(s)^2; equals exp(t) (x'' - x) x'^2.
    pub fn nu(&self, s: f64) -> f64 {
        let v = self.eval(s);
        let z = v[0] - 2.0 * s * v[1];
        4.0 * v[2] * z * z
    }

    /// Accumulated quadrature Phi(s) = int_1^s 4 g'' zeta ds'.
    pub fn phi(&self, s: f64) -> f64 {
        self.eval(s)[3]
    }

    /// Extreme values of Phi over the whole s range (dense sampling plus
    /// node refinement).
    pub fn phi_extrema(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for step in &self.sol.steps {
            for k in 0..=8 {
                let t = step.t0 + (step.t1 - step.t0) * (k as f64) / 8.0;
                let v = step.eval(t)[3];
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        lo = lo.min(self.phi0).min(0.0);
        hi = hi.max(self.phi0).max(0.0);
        (lo, hi)
    }

    /// Spot-check the profile against the time-domain solution through
    /// g(s) = sqrt(s) x(-log(s)/2); returns the worst absolute mismatch.
    pub fn validate_against_trajectory(&self) -> Result<f64> {
        let spec = ode::IvpSpec::new(self.tau, (-0.1, 2.0));
        let traj = ode::integrate_ivp(&spec)?;
        let mut worst: f64 = 0.0;
        for s in [0.25f64, 0.5, 0.75] {
            let t = -0.5 * s.ln();
            let j = traj.eval(t).ok_or(CoreError::Inconclusive { t_max: t })?;
            let g = self.eval(s)[0];
            worst = worst.max((g - s.sqrt() * j.x).abs());
        }
        Ok(worst)
    }
}

/// Search for an interior zero of the denominator g - 2 s g' when the
/// equation is continued beyond s = 1 (exists exactly at the critical
/// parameter, where it marks the stationary point of x).
pub fn g_denominator_zero(tau: f64, s_max: f64) -> Result<Option<f64>> {
    let ctrl = Controller { rtol: 1e-12, atol: 1e-15, max_step: f64::INFINITY, event_tol: 1e-12 };
    let y0 = [0.0, -0.5, tau / 4.0, 0.0];
    let mut events = vec![Event {
        g: Box::new(|s: f64, y: &[f64; 4]| y[0] - 2.0 * s * y[1]),
        direction: EventDir::Any,
        terminal: true,
    }];
    let sol = match dopri5::integrate(&g_system, 1.0, y0, s_max, &ctrl, &mut events) {
        Ok(sol) => sol,
        // The equation itself degenerates right at the zero; the last
        // reliable s locates it.
        Err(CoreError::SingularDenominator { s }) | Err(CoreError::StepSizeUnderflow { t: s }) => {
            return Ok(Some(s));
        }
        Err(e) => return Err(e),
    };
    if let Status::EventStop(_) = sol.status {
        return Ok(Some(sol.t_end()));
    }
    // At the limiting parameter known only to finite precision, the
    // denominator dips to a small positive minimum instead of crossing
    // zero (the dip depth scales like the square root of the parameter
    // error).  Away from the limit it increases monotonically from 1,
    // so an interior dip below a modest threshold is an unambiguous
    // signature of the crossing.
    let mut min = (f64::INFINITY, 1.0);
    let n = 20_000;
    for k in 0..=n {
        let s = 1.0 + (s_max - 1.0) * k as f64 / n as f64;
        if let Some(y) = sol.eval(s) {
            let den = (y[0] - 2.0 * s * y[1]).abs();
            if den < min.0 {
                min = (den, s);
            }
        }
    }
    if min.0 < 0.5 && min.1 > 1.0 && min.1 < s_max {
        Ok(Some(min.1))
    } else {
        Ok(None)
    }
}

/// The four pole functions at a point s in [0, 1].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoleValues {
    pub xi: f64,
    pub zeta: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Pole data for one parameter value: the boundary-chart profiles at tau
/// and -tau (the reflection x_tau(t) = -x_{-tau}(-t) swaps the ends).
pub struct PoleData {
    pub gp: GProfile,
    pub gm: GProfile,
}

impl PoleData {
    pub fn new(tau: f64) -> Result<Self> {
        Ok(PoleData { gp: solve_g(tau)?, gm: solve_g(-tau)? })
    }

    /// zeta/nu attach to t -> +infinity, xi/mu to t -> -infinity:
    /// xi_tau = zeta_{-tau} and mu_tau = -nu_{-tau}.
    pub fn at(&self, s: f64) -> PoleValues {
        PoleValues {
            xi: self.gm.zeta(s),
            zeta: self.gp.zeta(s),
            mu: -self.gm.nu(s),
            nu: self.gp.nu(s),
        }
    }
}

/// One-shot evaluation of the pole functions.
pub fn pole_functions(tau: f64, s: f64) -> Result<PoleValues> {
    if !(0.0..=1.0).contains(&s) {
        return Err(CoreError::InvalidInput("s must lie in [0, 1]".into()));
    }
    Ok(PoleData::new(tau)?.at(s))
}
