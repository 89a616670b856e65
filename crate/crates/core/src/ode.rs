//! The governing third-order equation x'x''' = xx'' - 2x''^2 + x'^2 + x^2,
//! its initial value problem x(0)=0, x'(0)=1, x''(0)=tau, and the
//! logarithmic reduction to the planar (q, p) variables.

use crate::dopri5::{self, Controller, Event, EventDir, Solution, Status};
use crate::error::{CoreError, Result};
use serde::Serialize;

/// Guard below which division by x' is refused.
pub const EPS_DEN: f64 = 1e-10;
/// |x| or |x''| beyond this value counts as finite-time escape.
pub const BLOWUP_THRESHOLD: f64 = 1e12;
/// Tolerance (in t) for event roots on the dense output.
pub const ZERO_CROSSING_TOL: f64 = 1e-12;

/// A jet (t, x, x', x'') of the third-order equation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct JetState {
    pub t: f64,
    pub x: f64,
    pub x1: f64,
    pub x2: f64,
}

impl JetState {
    pub fn new(t: f64, x: f64, x1: f64, x2: f64) -> Self {
        JetState { t, x, x1, x2 }
    }

    pub fn from_array(t: f64, y: &[f64; 3]) -> Self {
        JetState { t, x: y[0], x1: y[1], x2: y[2] }
    }
}

/// x''' from the governing equation.
pub fn rhs_third_order(s: &JetState) -> Result<f64> {
    if s.x1.abs() <= EPS_DEN {
        return Err(CoreError::SingularDerivative { t: s.t });
    }
    Ok((s.x * s.x2 - 2.0 * s.x2 * s.x2 + s.x1 * s.x1 + s.x * s.x) / s.x1)
}

/// First-order system for the jet; errs when x' hits the singular guard.
pub fn jet_system(t: f64, y: &[f64; 3], dy: &mut [f64; 3]) -> Result<()> {
    let s = JetState::from_array(t, y);
    dy[0] = y[1];
    dy[1] = y[2];
    dy[2] = rhs_third_order(&s)?;
    Ok(())
}

/// Specification of the initial value problem.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IvpSpec {
    pub tau: f64,
    pub t_span: (f64, f64),
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl IvpSpec {
    pub fn new(tau: f64, t_span: (f64, f64)) -> Self {
        IvpSpec { tau, t_span, rel_tol: 1e-12, abs_tol: 1e-14, max_step: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(CoreError::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.t_span.0 <= 0.0 && self.t_span.1 >= 0.0 && self.t_span.0 < self.t_span.1) {
            return Err(CoreError::InvalidInput("t_span must contain 0".into()));
        }
        Ok(())
    }

    fn controller(&self) -> Controller {
        Controller {
            rtol: self.rel_tol,
            atol: self.abs_tol,
            max_step: self.max_step,
            event_tol: ZERO_CROSSING_TOL,
        }
    }
}

/// How an integration ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Termination {
    Completed,
    /// x' reached zero at t0.
    DerivativeZero { t0: f64 },
    /// |x| or |x''| exceeded the blowup threshold at t_star.
    Blowup { t_star: f64 },
}

/// Dense solution of the initial value problem over a two-sided span.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub spec: IvpSpec,
    /// Forward piece (t >= 0), possibly empty.
    pub forward: Solution<3>,
    /// Backward piece (t <= 0), possibly empty.
    pub backward: Solution<3>,
    pub termination: Termination,
}

const EV_X1: usize = 0;

fn standard_events<'a>() -> Vec<Event<'a, 3>> {
    vec![
        Event { g: Box::new(|_t, y: &[f64; 3]| y[1]), direction: EventDir::Any, terminal: true },
        Event {
            // Finite-time escape detector. Global solutions also grow
            // exponentially, but their reduced orbit sits at a node
            // (q, p) = (+-1, 0); growth in that regime is not an escape,
            // so the detector is masked near the nodes.
            g: Box::new(|_t, y: &[f64; 3]| {
                if y[0] != 0.0 {
                    let q = y[1] / y[0];
                    let p = y[2] / y[0] - q * q;
                    if (q.abs() - 1.0).powi(2) + p * p < 1e-6 {
                        return 1.0;
                    }
                }
                BLOWUP_THRESHOLD - y[0].abs().max(y[2].abs())
            }),
            direction: EventDir::Down,
            terminal: true,
        },
    ]
}

fn leg_termination(sol: &Solution<3>) -> Termination {
    match sol.status {
        Status::Completed => Termination::Completed,
        Status::EventStop(EV_X1) => {
            Termination::DerivativeZero { t0: sol.events.last().map(|e| e.t).unwrap_or(f64::NAN) }
        }
        Status::EventStop(_) => {
            Termination::Blowup { t_star: sol.events.last().map(|e| e.t).unwrap_or(f64::NAN) }
        }
    }
}

/// Integrate the initial value problem over `spec.t_span`, with x' = 0 and
/// blowup events terminal on each leg.
pub fn integrate_ivp(spec: &IvpSpec) -> Result<Trajectory> {
    spec.validate()?;
    let y0 = [0.0, 1.0, spec.tau];
    let ctrl = spec.controller();
    // Past the critical parameter x' decays to zero so fast that the step
    // size can underflow before a clean sign change; treat the last
    // reliable time as the x' = 0 event.
    let run = |t_end: f64| -> Result<(Solution<3>, Option<f64>)> {
        if t_end == 0.0 {
            return Ok((
                Solution { steps: Vec::new(), status: Status::Completed, events: Vec::new() },
                None,
            ));
        }
        let mut events = standard_events();
        match dopri5::integrate(&jet_system, 0.0, y0, t_end, &ctrl, &mut events) {
            Ok(sol) => Ok((sol, None)),
            Err(CoreError::StepSizeUnderflow { t }) | Err(CoreError::SingularDerivative { t }) => {
                let shortened = t - t.signum() * 1e-6 * t.abs().max(1.0);
                let mut events = standard_events();
                let sol = dopri5::integrate(&jet_system, 0.0, y0, shortened, &ctrl, &mut events)?;
                Ok((sol, Some(t)))
            }
            Err(e) => Err(e),
        }
    };
    let (forward, fwd_stall) = run(spec.t_span.1)?;
    let (backward, bwd_stall) = run(spec.t_span.0)?;
    let leg = |sol: &Solution<3>, stall: Option<f64>| match stall {
        Some(t0) => Termination::DerivativeZero { t0 },
        None => leg_termination(sol),
    };
    let termination = match (leg(&forward, fwd_stall), leg(&backward, bwd_stall)) {
        (Termination::Completed, b) => b,
        (f, _) => f,
    };
    Ok(Trajectory { spec: *spec, forward, backward, termination })
}

impl Trajectory {
    /// Dense evaluation at time `t` inside the covered span.
    pub fn eval(&self, t: f64) -> Option<JetState> {
        let sol = if t >= 0.0 { &self.forward } else { &self.backward };
        if t == 0.0 {
            return Some(JetState::new(0.0, 0.0, 1.0, self.spec.tau));
        }
        sol.eval(t).map(|y| JetState::from_array(t, &y))
    }

    /// All accepted nodes in increasing t order.
    pub fn nodes(&self) -> Vec<JetState> {
        let mut out: Vec<JetState> = Vec::new();
        for s in self.backward.steps.iter().rev() {
            out.push(JetState::from_array(s.t1, &s.y1));
        }
        out.push(JetState::new(0.0, 0.0, 1.0, self.spec.tau));
        for s in self.forward.steps.iter() {
            out.push(JetState::from_array(s.t1, &s.y1));
        }
        out
    }

    /// Covered time range (after possible early termination).
    pub fn t_range(&self) -> (f64, f64) {
        let lo = if self.backward.steps.is_empty() { 0.0 } else { self.backward.t_end() };
        let hi = if self.forward.steps.is_empty() { 0.0 } else { self.forward.t_end() };
        (lo, hi)
    }
}

/// Logarithmic reduction q = x'/x, p = x''/x - (x'/x)^2 at the trajectory
/// nodes with t in [t_min, t_max]. Requires x > 0 on the sampled window.
pub fn log_reduction(traj: &Trajectory, t_min: f64, t_max: f64) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::new();
    for n in traj.nodes() {
        if n.t < t_min || n.t > t_max {
            continue;
        }
        if n.x <= 0.0 {
            return Err(CoreError::NonPositiveX { t: n.t });
        }
        let q = n.x1 / n.x;
        let p = n.x2 / n.x - q * q;
        out.push((n.t, q, p));
    }
    Ok(out)
}
