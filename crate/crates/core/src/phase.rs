//! The reduced planar systems obtained from the logarithmic substitution
//! q = (log x)', p = q': the non-regularized field (division by q) and its
//! regularization (time rescaled by q), plus equilibrium classification,
//! separatrix tracing, and the separatrix-limit estimate of the critical
//! constant.

use crate::dopri5::{self, Controller, Event, EventDir, Status};
use crate::error::{CoreError, Result};
use serde::Serialize;

/// A point of the (q, p) plane.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q, p }
    }
}

/// Equilibrium type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FpKind {
    Saddle,
    Node,
}

/// An equilibrium with its linearization data.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointInfo {
    pub location: PhasePoint,
    pub kind: FpKind,
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors, matching `eigenvalues` by index.
    pub eigenvectors: [[f64; 2]; 2],
}

/// Regularized planar field.
pub fn sms_rhs(pt: &PhasePoint) -> (f64, f64) {
    let (q, p) = (pt.q, pt.p);
    (
        q * p,
        1.0 + 2.0 * q * q - 3.0 * q.powi(4) + p - 7.0 * q * q * p - 2.0 * p * p,
    )
}

/// Non-regularized planar field (orbits coincide with the regularized ones
/// up to time reparametrization by q).
pub fn syst1_rhs(pt: &PhasePoint) -> Result<(f64, f64)> {
    if pt.q.abs() <= crate::ode::EPS_DEN {
        return Err(CoreError::SingularQ);
    }
    let (qd, pd) = sms_rhs(pt);
    Ok((qd / pt.q, pd / pt.q))
}

/// Analytic Jacobian of the regularized field.
pub fn sms_jacobian(pt: &PhasePoint) -> [[f64; 2]; 2] {
    let (q, p) = (pt.q, pt.p);
    [
        [p, q],
        [4.0 * q - 12.0 * q.powi(3) - 14.0 * q * p, 1.0 - 7.0 * q * q - 4.0 * p],
    ]
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / n, v[1] / n]
}

/// The four equilibria of the regularized field, classified analytically.
///
/// Order: (1, 0), (-1, 0), (0, 1), (0, -1/2).
pub fn classify_fixed_points() -> Vec<FixedPointInfo> {
    // At (+-1, 0) the Jacobian is [[0, +-1], [-+8, -6]], eigenvalues -2, -4,
    // eigenvectors from row one: lambda v_q = +- v_p.
    // At (0, 1): diag(1, -3); at (0, -1/2): diag(-1/2, 3).
    vec![
        FixedPointInfo {
            location: PhasePoint::new(1.0, 0.0),
            kind: FpKind::Node,
            eigenvalues: [-2.0, -4.0],
            eigenvectors: [unit([1.0, -2.0]), unit([1.0, -4.0])],
        },
        FixedPointInfo {
            location: PhasePoint::new(-1.0, 0.0),
            kind: FpKind::Node,
            eigenvalues: [-2.0, -4.0],
            eigenvectors: [unit([1.0, 2.0]), unit([1.0, 4.0])],
        },
        FixedPointInfo {
            location: PhasePoint::new(0.0, 1.0),
            kind: FpKind::Saddle,
            eigenvalues: [1.0, -3.0],
            eigenvectors: [[1.0, 0.0], [0.0, 1.0]],
        },
        FixedPointInfo {
            location: PhasePoint::new(0.0, -0.5),
            kind: FpKind::Saddle,
            eigenvalues: [-0.5, 3.0],
            eigenvectors: [[1.0, 0.0], [0.0, 1.0]],
        },
    ]
}

/// Which invariant-manifold branch of a saddle to trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Along the unstable eigenvector into q > 0 (forward time).
    UnstablePos,
    /// Along the unstable eigenvector into q < 0 (forward time).
    UnstableNeg,
    /// Along the stable eigenvector into q > 0 (traced against the flow).
    StablePos,
    /// Along the stable eigenvector into q < 0 (traced against the flow).
    StableNeg,
}

/// Default seeding offset along the eigenvector.
pub const SEED_DELTA: f64 = 1e-7;

/// Trace a separatrix branch of `saddle` until q >= q_max, convergence to an
/// equilibrium, or escape from the bounding box |p + q^2| <= 10q + 10.
///
/// Branches into q < 0 combined with q_max > 0 escape the expected quadrant
/// and report `ManifoldEscape`.
pub fn trace_separatrix(
    saddle: &FixedPointInfo,
    branch: Branch,
    q_max: f64,
    delta: f64,
) -> Result<Vec<PhasePoint>> {
    if saddle.kind != FpKind::Saddle {
        return Err(CoreError::InvalidInput("separatrix trace requires a saddle".into()));
    }
    let (want_stable, sign_q) = match branch {
        Branch::UnstablePos => (false, 1.0),
        Branch::UnstableNeg => (false, -1.0),
        Branch::StablePos => (true, 1.0),
        Branch::StableNeg => (true, -1.0),
    };
    // A branch into q < 0 cannot reach a positive q extent.
    if sign_q < 0.0 && q_max > 0.0 {
        return Err(CoreError::ManifoldEscape { q: saddle.location.q, p: saddle.location.p });
    }
    // Pick the eigenvector with a q-component (the q = 0 axis is invariant,
    // so the axis-aligned branch never leaves the saddle line).
    let mut idx = None;
    for (i, ev) in saddle.eigenvectors.iter().enumerate() {
        let stable = saddle.eigenvalues[i] < 0.0;
        if stable == want_stable && ev[0].abs() > 1e-12 {
            idx = Some(i);
        }
    }
    let idx = idx.ok_or_else(|| {
        CoreError::InvalidInput("saddle has no transverse branch of the requested stability".into())
    })?;
    let ev = saddle.eigenvectors[idx];
    let ev = [ev[0] * sign_q * ev[0].signum(), ev[1] * sign_q * ev[0].signum()];
    let y0 = [saddle.location.q + delta * ev[0], saddle.location.p + delta * ev[1]];

    // Stable branches are traced against the flow.
    let time_dir = if want_stable { -1.0 } else { 1.0 };
    let f = move |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| -> Result<()> {
        let (qd, pd) = sms_rhs(&PhasePoint::new(y[0], y[1]));
        dy[0] = time_dir * qd;
        dy[1] = time_dir * pd;
        Ok(())
    };

    let ctrl = Controller { rtol: 1e-12, atol: 1e-14, max_step: f64::INFINITY, event_tol: 1e-12 };
    let nodes = classify_fixed_points();
    let mut events = vec![
        // Reached the requested q extent.
        Event {
            g: Box::new(move |_t, y: &[f64; 2]| q_max - y[0]),
            direction: EventDir::Down,
            terminal: true,
        },
        // Bounding box |p + q^2| <= 10|q| + 10.
        Event {
            g: Box::new(|_t, y: &[f64; 2]| 10.0 * y[0].abs() + 10.0 - (y[1] + y[0] * y[0]).abs()),
            direction: EventDir::Down,
            terminal: true,
        },
        // Converged to one of the stable nodes.
        Event {
            g: Box::new(move |_t, y: &[f64; 2]| {
                nodes
                    .iter()
                    .filter(|n| n.kind == FpKind::Node)
                    .map(|n| (y[0] - n.location.q).powi(2) + (y[1] - n.location.p).powi(2))
                    .fold(f64::INFINITY, f64::min)
                    - 1e-16
            }),
            direction: EventDir::Down,
            terminal: true,
        },
        // Left the expected quadrant.
        Event {
            g: Box::new(move |_t, y: &[f64; 2]| sign_q * y[0] + 1e-9),
            direction: EventDir::Down,
            terminal: true,
        },
    ];
    let sol = dopri5::integrate(&f, 0.0, y0, 1e4, &ctrl, &mut events)?;
    let escaped = matches!(sol.status, Status::EventStop(1) | Status::EventStop(3))
        || (q_max > 0.0 && sign_q < 0.0);
    if escaped {
        let y = sol.y_end();
        return Err(CoreError::ManifoldEscape { q: y[0], p: y[1] });
    }
    // Monotone-q sampling of the curve.
    let mut pts: Vec<PhasePoint> = vec![PhasePoint::new(y0[0], y0[1])];
    for s in &sol.steps {
        let cand = PhasePoint::new(s.y1[0], s.y1[1]);
        if sign_q * (cand.q - pts.last().unwrap().q) > 0.0 {
            pts.push(cand);
        }
    }
    Ok(pts)
}

/// Result of a critical-constant computation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalResult {
    pub t: f64,
    pub method: Method,
    /// Bisection bracket width or extrapolation residual.
    pub error_estimate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Bisection,
    Separatrix,
}

/// Fit h(q) = limit + c1/q + c2/q^2 by linear least squares over the points
/// with q in `window`; returns (limit, max residual over the window).
pub fn fit_inverse_q(curve: &[(f64, f64)], window: (f64, f64)) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        curve.iter().copied().filter(|(q, _)| *q >= window.0 && *q <= window.1).collect();
    if pts.len() < 8 {
        return Err(CoreError::PoorConvergence { residual: f64::INFINITY });
    }
    // Least squares for the 3-parameter model in powers of 1/q.
    let (coef, residual) = crate::util::lsq_fit(&pts, 3, |q| vec![1.0, 1.0 / q, 1.0 / (q * q)])
        .ok_or(CoreError::PoorConvergence { residual: f64::INFINITY })?;
    Ok((coef[0], residual))
}

/// Estimate the critical constant from the saddle (0, -1/2) separatrix:
/// the limit of h(q) = -(p(q) + q^2)/q as q grows.
pub fn estimate_t_from_separatrix(
    q_max: f64,
    fit_window: Option<(f64, f64)>,
) -> Result<CriticalResult> {
    if q_max < 20.0 {
        return Err(CoreError::PoorConvergence { residual: f64::INFINITY });
    }
    let saddles = classify_fixed_points();
    let saddle = saddles.iter().find(|f| f.location.q == 0.0 && f.location.p == -0.5).unwrap();
    let curve = trace_separatrix(saddle, Branch::StablePos, q_max, SEED_DELTA)?;
    let window = fit_window.unwrap_or((q_max / 2.0, q_max));
    let h: Vec<(f64, f64)> = curve.iter().map(|pt| (pt.q, -(pt.p + pt.q * pt.q) / pt.q)).collect();
    let (t, residual) = fit_inverse_q(&h, window)?;
    if residual > 1e-3 {
        return Err(CoreError::PoorConvergence { residual });
    }
    Ok(CriticalResult { t, method: Method::Separatrix, error_estimate: residual })
}

/// Extrapolate tau = lim (q^2 + p)/q from a large-q orbit sample.
pub fn tau_from_orbit(curve: &[PhasePoint]) -> Result<(f64, f64)> {
    let q_top = curve.iter().map(|p| p.q).fold(f64::NEG_INFINITY, f64::max);
    if !q_top.is_finite() || q_top < 10.0 {
        return Err(CoreError::PoorConvergence { residual: f64::INFINITY });
    }
    let h: Vec<(f64, f64)> = curve.iter().map(|pt| (pt.q, (pt.q * pt.q + pt.p) / pt.q)).collect();
    let (tau, residual) = fit_inverse_q(&h, (q_top / 2.0, q_top))?;
    if residual > 1e-2 {
        return Err(CoreError::PoorConvergence { residual });
    }
    Ok((tau, residual))
}
