//! The cubic integral: coefficient a1, evaluation, Poisson-bracket and
//! conservation checks, the integrability PDE in real and complex form,
//! and the polar boundedness diagnostic.

use crate::dopri5::{self, Controller, Solution};
use crate::error::{CoreError, Result};
use crate::metric::{
    conformal_factor_jet, f_second, ConformalSurface, CotangentState, Family, FamilySurface,
    PsiProfile,
};
use num_complex::Complex64;
use serde::Serialize;

/// Relative finite-difference step for first derivatives.
pub fn h_fd() -> f64 {
    f64::EPSILON.powf(1.0 / 3.0)
}

/// The coefficient a1 = -3 (f_pp - f_yy)/lambda + 6i f_py / lambda.
pub fn a1_eval(surface: &dyn ConformalSurface, phi: f64, y: f64) -> Result<Complex64> {
    let f = f_second(surface, phi, y);
    let lam = f.f_pp + f.f_yy;
    if lam <= 0.0 {
        return Err(CoreError::DegenerateMetric { phi, y, lambda: lam });
    }
    Ok(Complex64::new(-3.0 * (f.f_pp - f.f_yy) / lam, 6.0 * f.f_py / lam))
}

/// F = 2 Re(p_z^3 + a1 p_z^2 conj(p_z)) with p_z = (p_phi - i p_y)/2.
pub fn cubic_integral_eval(surface: &dyn ConformalSurface, state: &CotangentState) -> Result<f64> {
    let a1 = a1_eval(surface, state.phi, state.y)?;
    let pz = Complex64::new(0.5 * state.p_phi, -0.5 * state.p_y);
    let val = pz * pz * pz + a1 * pz * pz * pz.conj();
    Ok(2.0 * val.re)
}

/// Normalized Poisson-bracket residual |{F, H}| / (|grad F| |grad H|) by
/// central differences of step h_fd on a relative scale.
pub fn bracket_residual(
    h: &dyn Fn(&CotangentState) -> Result<f64>,
    f: &dyn Fn(&CotangentState) -> Result<f64>,
    state: &CotangentState,
) -> Result<f64> {
    let base = [state.phi, state.y, state.p_phi, state.p_y];
    let eval = |g: &dyn Fn(&CotangentState) -> Result<f64>, v: &[f64; 4]| {
        g(&CotangentState { phi: v[0], y: v[1], p_phi: v[2], p_y: v[3] })
    };
    let mut grad_h = [0.0f64; 4];
    let mut grad_f = [0.0f64; 4];
    for i in 0..4 {
        let step = h_fd() * base[i].abs().max(1.0);
        let mut up = base;
        let mut dn = base;
        up[i] += step;
        dn[i] -= step;
        grad_h[i] = (eval(h, &up)? - eval(h, &dn)?) / (2.0 * step);
        grad_f[i] = (eval(f, &up)? - eval(f, &dn)?) / (2.0 * step);
    }
    // Conjugate pairs: (phi, p_phi) and (y, p_y).
    let bracket = grad_f[0] * grad_h[2] - grad_f[2] * grad_h[0] + grad_f[1] * grad_h[3]
        - grad_f[3] * grad_h[1];
    let nf = grad_f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nh = grad_h.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(bracket.abs() / (nf * nh).max(1e-300))
}

/// Flow mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FlowMode {
    /// Geodesic flow of the conformal metric lambda (zero potential).
    Geodesic,
    /// The conservative system K + U.
    Conservative,
}

/// Phase trajectory with the monitored relative energy drift.
pub struct FlowResult {
    pub sol: Solution<4>,
    pub energy0: f64,
    pub energy_drift: f64,
}

fn flow_controller() -> Controller {
    Controller { rtol: 1e-12, atol: 1e-14, max_step: 0.25, event_tol: 1e-12 }
}

/// Geodesic flow of the conformal factor of `surface`.
pub fn geodesic_flow(
    surface: &dyn ConformalSurface,
    state: &CotangentState,
    horizon: f64,
) -> Result<FlowResult> {
    let rhs = |_t: f64, v: &[f64; 4], dv: &mut [f64; 4]| -> Result<()> {
        let (lam, grad, _) = conformal_factor_jet(surface, v[0], v[1]);
        if lam.abs() < 1e-12 {
            return Err(CoreError::DegenerateMetric { phi: v[0], y: v[1], lambda: lam });
        }
        let p2 = v[2] * v[2] + v[3] * v[3];
        dv[0] = v[2] / lam;
        dv[1] = v[3] / lam;
        dv[2] = 0.5 * p2 * grad[0] / (lam * lam);
        dv[3] = 0.5 * p2 * grad[1] / (lam * lam);
        Ok(())
    };
    let energy = |v: &[f64; 4]| {
        let (lam, _, _) = conformal_factor_jet(surface, v[0], v[1]);
        (v[2] * v[2] + v[3] * v[3]) / (2.0 * lam)
    };
    let y0 = [state.phi, state.y, state.p_phi, state.p_y];
    let sol = dopri5::integrate(&rhs, 0.0, y0, horizon, &flow_controller(), &mut [])?;
    let e0 = energy(&y0);
    let drift = sol
        .steps
        .iter()
        .map(|s| (energy(&s.y1) - e0).abs())
        .fold(0.0, f64::max)
        / e0.abs().max(1.0);
    Ok(FlowResult { sol, energy0: e0, energy_drift: drift })
}

/// Hamiltonian flow of the conservative system K + U of a family.
pub fn conservative_flow(
    profile: &PsiProfile,
    family: &Family,
    state: &CotangentState,
    horizon: f64,
) -> Result<FlowResult> {
    let rhs = |_t: f64, v: &[f64; 4], dv: &mut [f64; 4]| -> Result<()> {
        let [x, x1, x2, x3] = profile.jet4(v[1]);
        let p2 = v[2] * v[2] + v[3] * v[3];
        let (w, wp, u_phi, u_y) = match family {
            Family::A { .. } => {
                let w = x1 * x1;
                let wp = 2.0 * x1 * x2;
                let amp = (x2 - x) * x1 * x1; // U = -amp cos(phi)
                let amp_p = (x3 - x1) * x1 * x1 + (x2 - x) * 2.0 * x1 * x2;
                (w, wp, amp * v[0].sin(), -amp_p * v[0].cos())
            }
            Family::B { b } => {
                let d = x1 * x1 - x * x + b;
                if d.abs() < 1e-12 {
                    return Err(CoreError::DegenerateDenominator { y: v[1] });
                }
                let dp = 2.0 * x1 * x2 - 2.0 * x * x1;
                let w = x1 * x1 / d;
                let wp = (2.0 * x1 * x2 * d - x1 * x1 * dp) / (d * d);
                let p_amp = x1 * x1 * (x2 - x); // U = -p_amp cos(phi)/d
                let p_amp_p = 2.0 * x1 * x2 * (x2 - x) + x1 * x1 * (x3 - x1);
                let u_phi = p_amp * v[0].sin() / d;
                let u_y = -v[0].cos() * (p_amp_p * d - p_amp * dp) / (d * d);
                (w, wp, u_phi, u_y)
            }
            Family::Gc => {
                return Err(CoreError::ChartMismatch(
                    "conservative flow of the rigid-body family lives in the equivalence module".into(),
                ))
            }
        };
        dv[0] = w * v[2];
        dv[1] = w * v[3];
        dv[2] = -u_phi;
        dv[3] = -(0.5 * wp * p2 + u_y);
        Ok(())
    };
    let energy = |v: &[f64; 4]| {
        crate::metric::hamiltonian_eval(
            profile,
            family,
            &CotangentState { phi: v[0], y: v[1], p_phi: v[2], p_y: v[3] },
        )
    };
    let y0 = [state.phi, state.y, state.p_phi, state.p_y];
    let sol = dopri5::integrate(&rhs, 0.0, y0, horizon, &flow_controller(), &mut [])?;
    let e0 = energy(&y0)?;
    let mut drift: f64 = 0.0;
    for s in &sol.steps {
        drift = drift.max((energy(&s.y1)? - e0).abs());
    }
    Ok(FlowResult { sol, energy0: e0, energy_drift: drift / e0.abs().max(1.0) })
}

/// Integrate the requested flow for a family spec.
pub fn integrate_flow(
    profile: &PsiProfile,
    family: &Family,
    state: &CotangentState,
    horizon: f64,
    mode: FlowMode,
) -> Result<FlowResult> {
    match mode {
        FlowMode::Geodesic => {
            let surface = FamilySurface::new(profile, *family);
            geodesic_flow(&surface, state, horizon)
        }
        FlowMode::Conservative => conservative_flow(profile, family, state, horizon),
    }
}

/// Maximum of |F(t) - F(0)| / max(1, |F(0)|) along the flow through `state`.
///
/// In geodesic mode F is the cubic integral of the family's conformal
/// factor. In conservative mode the integral is lifted to the energy level
/// E = H(state): the lift replaces the free constant of the conformal
/// construction (c for the first family, the scale a for the second) by E,
/// leaving the momenta untouched.
pub fn conservation_drift(
    profile: &PsiProfile,
    family: &Family,
    state: &CotangentState,
    horizon: f64,
    mode: FlowMode,
) -> Result<f64> {
    let flow = integrate_flow(profile, family, state, horizon, mode)?;
    let surface = match mode {
        FlowMode::Geodesic => FamilySurface::new(profile, *family),
        FlowMode::Conservative => {
            let e = crate::metric::hamiltonian_eval(profile, family, state)?;
            FamilySurface::with_scale(profile, *family, e)
        }
    };
    drift_along(&surface, &flow)
}

/// Drift of the cubic integral of `surface` along an integrated flow.
pub fn drift_along(surface: &dyn ConformalSurface, flow: &FlowResult) -> Result<f64> {
    let state_at = |v: &[f64; 4]| CotangentState { phi: v[0], y: v[1], p_phi: v[2], p_y: v[3] };
    let first = flow.sol.steps.first().map(|s| s.y0).unwrap_or([0.0; 4]);
    let f0 = cubic_integral_eval(surface, &state_at(&first))?;
    let mut worst: f64 = 0.0;
    for s in &flow.sol.steps {
        for k in 1..=4 {
            let t = s.t0 + (s.t1 - s.t0) * (k as f64) / 4.0;
            let f = cubic_integral_eval(surface, &state_at(&s.eval(t)))?;
            worst = worst.max((f - f0).abs());
        }
    }
    Ok(worst / f0.abs().max(1.0))
}

/// Both sides of the real-form integrability PDE at a point, analytically,
/// for a constructed surface:
/// d/dphi [(f_pp - f_yy)(f_pp + f_yy)] = 2 d/dy [f_py (f_pp + f_yy)].
pub fn eqpde_residual(surface: &dyn ConformalSurface, phi: f64, y: f64) -> f64 {
    let [x, x1, x2, x3, _] = surface.psi_jet(y);
    let [_, xi3, _] = surface.xi_jet(y);
    let f = f_second(surface, phi, y);
    let lam = f.f_pp + f.f_yy;
    // Third derivatives of f = psi cos(phi) + xi + a (phi^2 - y^2).
    let d_phi_fpp = x * phi.sin();
    let d_phi_fyy = -x2 * phi.sin();
    let d_y_fpp = -x1 * phi.cos();
    let d_y_fyy = x3 * phi.cos() + xi3;
    let d_y_fpy = -x2 * phi.sin();
    let lhs = (d_phi_fpp - d_phi_fyy) * lam + (f.f_pp - f.f_yy) * (d_phi_fpp + d_phi_fyy);
    let rhs = 2.0 * (d_y_fpy * lam + f.f_py * (d_y_fpp + d_y_fyy));
    lhs - rhs
}

/// Finite-difference version of the PDE residual for an arbitrary f.
pub fn eqpde_residual_fd(f: &dyn Fn(f64, f64) -> f64, phi: f64, y: f64, h: f64) -> f64 {
    let second = |g: &dyn Fn(f64, f64) -> f64, phi: f64, y: f64| {
        // 4th-order central second derivatives and mixed derivative.
        let fpp = (-g(phi + 2.0 * h, y) + 16.0 * g(phi + h, y) - 30.0 * g(phi, y)
            + 16.0 * g(phi - h, y)
            - g(phi - 2.0 * h, y))
            / (12.0 * h * h);
        let fyy = (-g(phi, y + 2.0 * h) + 16.0 * g(phi, y + h) - 30.0 * g(phi, y)
            + 16.0 * g(phi, y - h)
            - g(phi, y - 2.0 * h))
            / (12.0 * h * h);
        let fpy = (g(phi + h, y + h) - g(phi + h, y - h) - g(phi - h, y + h)
            + g(phi - h, y - h))
            / (4.0 * h * h);
        (fpp, fyy, fpy)
    };
    let p_field = |phi: f64, y: f64| {
        let (fpp, fyy, _) = second(f, phi, y);
        (fpp - fyy) * (fpp + fyy)
    };
    let q_field = |phi: f64, y: f64| {
        let (fpp, fyy, fpy) = second(f, phi, y);
        fpy * (fpp + fyy)
    };
    let lhs = (p_field(phi + h, y) - p_field(phi - h, y)) / (2.0 * h);
    let rhs = 2.0 * (q_field(phi, y + h) - q_field(phi, y - h)) / (2.0 * h);
    lhs - rhs
}

/// Complex-recurrence residuals for a degree-n integral with coefficient
/// vector (b0, ..., bn) against theta: row k (k = 0..n+1):
/// theta d_w b_{k-1} + (n-k+1) b_{k-1} d_w theta
///   + theta d_wbar b_k + k b_k d_wbar theta,
/// with b_{-1} = b_{n+1} = 0. For the cubic family the vector is
/// (1, a1, conj(a1), 1).
///
/// Derivatives are 4th-order finite differences in (phi, y) with
/// d_w = (d_phi - i d_y)/2.
pub fn systpde_residuals(
    theta: &dyn Fn(f64, f64) -> f64,
    b: &[&dyn Fn(f64, f64) -> Complex64],
    phi: f64,
    y: f64,
    h: f64,
) -> Vec<Complex64> {
    let n = b.len() - 1;
    let d4 = |g: &dyn Fn(f64) -> Complex64| {
        (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h)
    };
    let dw_pair = |g: &dyn Fn(f64, f64) -> Complex64| {
        let dphi = d4(&|e| g(phi + e, y));
        let dy = d4(&|e| g(phi, y + e));
        (
            0.5 * (dphi - Complex64::i() * dy),
            0.5 * (dphi + Complex64::i() * dy),
        )
    };
    let th = Complex64::from(theta(phi, y));
    let (th_w, th_wbar) = dw_pair(&|p, q| Complex64::from(theta(p, q)));
    let nf = n as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n + 2];
    for (k, slot) in out.iter_mut().enumerate() {
        let kf = k as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        if k >= 1 {
            let bk1 = b[k - 1];
            let (bw, _) = dw_pair(&|p, q| bk1(p, q));
            acc += th * bw + (nf - kf + 1.0) * bk1(phi, y) * th_w;
        }
        if k <= n {
            let bk = b[k];
            let (_, bwbar) = dw_pair(&|p, q| bk(p, q));
            acc += th * bwbar + kf * bk(phi, y) * th_wbar;
        }
        *slot = acc;
    }
    out
}

/// Run the recurrence for a constructed surface over a (phi, y) grid;
/// returns the max |residual| per row and the max |d_wbar b0|.
pub fn systpde_check(
    surface: &dyn ConformalSurface,
    phis: &[f64],
    ys: &[f64],
) -> Result<([f64; 5], f64)> {
    let one = |_p: f64, _q: f64| Complex64::new(1.0, 0.0);
    let a1 = |p: f64, q: f64| a1_eval(surface, p, q).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let a1c = |p: f64, q: f64| a1(p, q).conj();
    let theta = |p: f64, q: f64| crate::metric::conformal_factor(surface, p, q);
    let b: Vec<&dyn Fn(f64, f64) -> Complex64> = vec![&one, &a1, &a1c, &one];
    let h = 1e-3;
    let mut max_rows = [0.0f64; 5];
    let mut max_hol: f64 = 0.0;
    for &p in phis {
        for &q in ys {
            let res = systpde_residuals(&theta, &b, p, q, h);
            for (i, r) in res.iter().enumerate() {
                max_rows[i] = max_rows[i].max(r.norm());
            }
            // Endpoint antiholomorphic derivative of b0.
            let d4 = |g: &dyn Fn(f64) -> Complex64| {
                (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h)
            };
            let dphi = d4(&|e| one(p + e, q));
            let dy = d4(&|e| one(p, q + e));
            max_hol = max_hol.max((0.5 * (dphi + Complex64::i() * dy)).norm());
        }
    }
    Ok((max_rows, max_hol))
}

/// A deliberately non-integrable conformal surface for negative controls:
/// psi_c = -cos(2y)/5 with xi'' = 2 gives lambda = 2 + cos(phi) cos(2y),
/// which is positive everywhere but does not satisfy the profile equation.
pub struct ControlSurface;

impl crate::metric::ConformalSurface for ControlSurface {
    fn psi_jet(&self, y: f64) -> [f64; 5] {
        let (s, c) = (2.0 * y).sin_cos();
        [-c / 5.0, 2.0 * s / 5.0, 4.0 * c / 5.0, -8.0 * s / 5.0, -16.0 * c / 5.0]
    }

    fn xi_jet(&self, _y: f64) -> [f64; 3] {
        [2.0, 0.0, 0.0]
    }

    fn a(&self) -> f64 {
        0.0
    }
}

/// Report of the polar boundedness diagnostic for b1 = a1 |w|^2 w.
#[derive(Clone, Debug, Serialize)]
pub struct PolarBoundReport {
    /// sup of |a1| |w|^3 over the sampled rays (both charts).
    pub sup: f64,
    /// Whether the samples decrease toward the poles.
    pub decreasing: bool,
    /// Interior degeneracy: xi'' blows up at a stationary point of psi.
    pub degenerate: bool,
}

/// Sample |a1| |w|^3 on rays approaching both poles, and scan for an
/// interior blowup of the construction.
pub fn polar_integral_bound(profile: &PsiProfile, family: &Family) -> PolarBoundReport {
    let surface = FamilySurface::new(profile, *family);
    let phis = [0.0, 0.7, 1.9, 3.6, 5.1];
    let mut sup: f64 = 0.0;
    let mut near: f64 = 0.0;
    let mut far: f64 = 0.0;
    for sign in [1.0, -1.0] {
        for (i, k) in (0..=16).enumerate() {
            let y = sign * (2.0 + 0.5 * k as f64);
            let wcube = (-3.0 * y.abs()).exp();
            for &p in &phis {
                if let Ok(a1) = a1_eval(&surface, p, y) {
                    let v = a1.norm() * wcube;
                    sup = sup.max(v);
                    if i < 5 {
                        far = far.max(v);
                    }
                    if i > 11 {
                        near = near.max(v);
                    }
                }
            }
        }
    }
    // Interior degeneracy scan: xi'' has a genuine pole wherever psi'
    // vanishes with a nonzero numerator (c for the first family,
    // a (b - psi^2) for the second; the matched parameter b = psi(y*)^2
    // leaves a removable point).
    let mut degenerate = false;
    let (y_lo, y_hi) = profile.y_range;
    let n = 4000;
    let mut min_d = (f64::INFINITY, 0.0f64);
    for k in 0..=n {
        let y = y_lo + (y_hi - y_lo) * (k as f64) / (n as f64);
        let d = profile.jet(y)[1].abs();
        if d < min_d.0 {
            min_d = (d, y);
        }
    }
    if min_d.0 < 1e-2 {
        // Golden-section refinement of the |psi'| minimum.
        let h = (y_hi - y_lo) / n as f64;
        let (mut a, mut b) = (min_d.1 - h, min_d.1 + h);
        for _ in 0..80 {
            let u = a + (b - a) * 0.381966;
            let v = b - (b - a) * 0.381966;
            if profile.jet(u)[1].abs() < profile.jet(v)[1].abs() {
                b = v;
            } else {
                a = u;
            }
        }
        let y_star = 0.5 * (a + b);
        let [x, x1, _] = profile.jet(y_star);
        if x1.abs() < 1e-6 {
            let numerator = match family {
                Family::A { c } => *c,
                Family::B { b } => b - x * x,
                Family::Gc => 0.0,
            };
            if numerator.abs() > 1e-6 {
                degenerate = true;
            }
        }
    }
    PolarBoundReport { sup, decreasing: near < far, degenerate }
}
