//! Embedded Dormand–Prince 5(4) integrator with dense output and event
//! detection, generic over the state dimension.
//!
//! The right-hand side may fail (e.g. when a formula divides by a state
//! component that approaches zero); a failing stage evaluation rejects the
//! step and the controller retries with a smaller step until the minimum
//! step size is reached.

use crate::error::{CoreError, Result};

/// Direction filter for event sign changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventDir {
    Any,
    /// Trigger only on a - to + crossing.
    Up,
    /// Trigger only on a + to - crossing.
    Down,
}

/// A scalar event function g(t, y); a root of g along the solution triggers
/// the event. Roots are resolved on the dense output by bisection.
pub struct Event<'a, const N: usize> {
    pub g: Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>,
    pub direction: EventDir,
    pub terminal: bool,
}

impl<'a, const N: usize> Event<'a, N> {
    pub fn terminal(g: impl Fn(f64, &[f64; N]) -> f64 + 'a) -> Self {
        Event { g: Box::new(g), direction: EventDir::Any, terminal: true }
    }
}

/// One accepted step with its quartic dense-output interpolant.
#[derive(Clone, Debug)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    /// Evaluate the interpolant at `t` (valid for t between t0 and t1).
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let theta = if h == 0.0 { 0.0 } else { (t - self.t0) / h };
        let th1 = 1.0 - theta;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + th1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + th1 * self.rcont[4][i])));
        }
        y
    }
}

/// Why the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Status {
    /// Reached the end of the requested span.
    Completed,
    /// A terminal event (by index) fired.
    EventStop(usize),
}

/// A triggered event occurrence.
#[derive(Clone, Copy, Debug)]
pub struct EventHit<const N: usize> {
    pub index: usize,
    pub t: f64,
    pub y: [f64; N],
}

/// Dense solution of one integration run.
#[derive(Clone, Debug)]
pub struct Solution<const N: usize> {
    pub steps: Vec<Step<N>>,
    pub status: Status,
    pub events: Vec<EventHit<N>>,
}

impl<const N: usize> Solution<N> {
    pub fn t_start(&self) -> f64 {
        self.steps.first().map(|s| s.t0).unwrap_or(f64::NAN)
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().map(|s| s.t1).unwrap_or(f64::NAN)
    }

    pub fn y_end(&self) -> [f64; N] {
        self.steps.last().map(|s| s.y1).unwrap_or([f64::NAN; N])
    }

    /// Evaluate the dense output at `t` (must lie inside the covered span).
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        if self.steps.is_empty() {
            return None;
        }
        let forward = self.steps[0].t1 >= self.steps[0].t0;
        let (mut lo, mut hi) = (0usize, self.steps.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let inside_left = if forward { t < self.steps[mid].t0 } else { t > self.steps[mid].t0 };
            if inside_left {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let s = &self.steps[lo];
        let (a, b) = if forward { (s.t0, s.t1) } else { (s.t1, s.t0) };
        let tol = 1e-9 * (1.0 + t.abs());
        if t < a - tol || t > b + tol {
            return None;
        }
        Some(s.eval(t))
    }
}

/// Controller parameters.
#[derive(Clone, Copy, Debug)]
pub struct Controller {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Absolute tolerance (in t) for event root resolution.
    pub event_tol: f64,
}

impl Default for Controller {
    fn default() -> Self {
        Controller { rtol: 1e-12, atol: 1e-14, max_step: f64::INFINITY, event_tol: 1e-12 }
    }
}

// Dormand–Prince coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrate `f` from `(t0, y0)` to `t_end` (either direction).
///
/// `f(t, y, dy)` fills the derivative; returning an error rejects the step.
pub fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctrl: &Controller,
    events: &mut [Event<'_, N>],
) -> Result<Solution<N>> {
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    if span == 0.0 {
        return Ok(Solution { steps: Vec::new(), status: Status::Completed, events: Vec::new() });
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    f(t, &y, &mut k1)?;
    // Initial step: conservative heuristic, the controller adapts quickly.
    let mut h = dir * (1e-4 * span).min(ctrl.max_step).min(1e-2).max(1e-10);
    let mut steps: Vec<Step<N>> = Vec::new();
    let mut hits: Vec<EventHit<N>> = Vec::new();
    let mut gvals: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();

    let mut ks = [[0.0; N]; 7];
    loop {
        let h_min = 1e4 * f64::EPSILON * t.abs().max(1.0);
        if (t - t_end) * dir >= 0.0 || (t_end - t).abs() <= h_min {
            return Ok(Solution { steps, status: Status::Completed, events: hits });
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        if h.abs() < h_min {
            return Err(CoreError::StepSizeUnderflow { t });
        }

        ks[0] = k1;
        let mut failed_stage = false;
        let mut y1 = [0.0; N];
        for stage in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in ks.iter().enumerate().take(stage) {
                    acc += A[stage][j] * kj[i];
                }
                ys[i] += h * acc;
            }
            let ts = t + C[stage] * h;
            let mut ki = [0.0; N];
            if f(ts, &ys, &mut ki).is_err() || ys.iter().any(|v| !v.is_finite()) {
                failed_stage = true;
                break;
            }
            ks[stage] = ki;
            if stage == 6 {
                y1 = ys;
            }
        }
        if failed_stage || y1.iter().any(|v| !v.is_finite()) {
            h *= 0.5;
            continue;
        }

        // Error estimate (FSAL: stage 7 is the derivative at y1).
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in ks.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let sc = ctrl.atol + ctrl.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / N as f64).sqrt();

        if err > 1.0 {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            continue;
        }

        // Accepted: build dense output.
        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let dy = y1[i] - y[i];
            let bspl = h * ks[0][i] - dy;
            rcont[0][i] = y[i];
            rcont[1][i] = dy;
            rcont[2][i] = bspl;
            rcont[3][i] = dy - h * ks[6][i] - bspl;
            let mut d5 = 0.0;
            for (j, kj) in ks.iter().enumerate() {
                d5 += D[j] * kj[i];
            }
            rcont[4][i] = h * d5;
        }
        let step = Step { t0: t, t1: t + h, y0: y, y1, rcont };

        // Event detection on the accepted step.
        let mut terminal_hit: Option<(usize, f64, [f64; N])> = None;
        for (ei, ev) in events.iter().enumerate() {
            let g0 = gvals[ei];
            let g1 = (ev.g)(step.t1, &y1);
            let crossed = g0.is_finite()
                && g1.is_finite()
                && g0 * g1 <= 0.0
                && (g0 != 0.0 || g1 != 0.0)
                && g1 != g0
                && match ev.direction {
                    EventDir::Any => true,
                    EventDir::Up => g0 < g1,
                    EventDir::Down => g0 > g1,
                };
            if crossed {
                // Bisection on the dense output.
                let (mut ta, mut tb) = (step.t0, step.t1);
                let mut ga = g0;
                while (tb - ta).abs() > ctrl.event_tol {
                    let tm = 0.5 * (ta + tb);
                    let gm = (ev.g)(tm, &step.eval(tm));
                    if ga * gm <= 0.0 && gm != ga {
                        tb = tm;
                    } else {
                        ta = tm;
                        ga = gm;
                    }
                }
                let te = 0.5 * (ta + tb);
                let yt = step.eval(te);
                if ev.terminal {
                    match terminal_hit {
                        Some((_, tprev, _)) if (te - tprev) * dir >= 0.0 => {}
                        _ => terminal_hit = Some((ei, te, yt)),
                    }
                } else {
                    hits.push(EventHit { index: ei, t: te, y: yt });
                }
            }
            gvals[ei] = g1;
        }

        if let Some((ei, te, ye)) = terminal_hit {
            // Truncate the step at the event time.
            let mut cut = step.clone();
            cut.t1 = te;
            cut.y1 = ye;
            steps.push(cut);
            hits.push(EventHit { index: ei, t: te, y: ye });
            return Ok(Solution { steps, status: Status::EventStop(ei), events: hits });
        }

        t += h;
        y = y1;
        k1 = ks[6];
        steps.push(step);

        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h.abs() > ctrl.max_step {
            h = dir * ctrl.max_step;
        }
    }
}
