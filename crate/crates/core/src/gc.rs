//! The rigid-body (Goryachev–Chaplygin) profile on the sphere, its
//! conformal polar coordinates, the polar-chart gauge transformations, and
//! the Hamiltonian-equivalence fit against the second constructed family.

use crate::dopri5::{self, Controller, Solution};
use crate::error::{CoreError, Result};
use crate::metric::{build_psi, PsiProfile};
use serde::Serialize;
use std::rc::Rc;

/// A rotationally symmetric metric ds^2 = A dtheta^2 + B dphi^2 with a
/// potential V(theta) cos(phi), theta in (0, pi).
pub struct RotSymMetricProfile {
    pub a: Rc<dyn Fn(f64) -> f64>,
    pub b: Rc<dyn Fn(f64) -> f64>,
    pub v: Rc<dyn Fn(f64) -> f64>,
}

/// The rigid-body profile: the ambient form
/// (du1^2 + du2^2 + 4 du3^2) / (4u1^2 + 4u2^2 + u3^2) - u1
/// restricted to the unit sphere with u3 = cos(theta). On the sphere
/// 4u1^2 + 4u2^2 + u3^2 = 4 - 3cos^2(theta).
pub fn gc_profile() -> RotSymMetricProfile {
    RotSymMetricProfile {
        a: Rc::new(|th: f64| {
            let s = th.sin();
            (1.0 + 3.0 * s * s) / (4.0 - 3.0 * th.cos().powi(2))
        }),
        b: Rc::new(|th: f64| {
            let s = th.sin();
            s * s / (4.0 - 3.0 * th.cos().powi(2))
        }),
        v: Rc::new(|th: f64| -th.sin()),
    }
}

/// The round sphere (A = 1, B = sin^2 theta, V = -sin theta): reference
/// profile for the Mercator and gauge-invariance oracles.
pub fn round_sphere_profile() -> RotSymMetricProfile {
    RotSymMetricProfile {
        a: Rc::new(|_| 1.0),
        b: Rc::new(|th: f64| th.sin().powi(2)),
        v: Rc::new(|th: f64| -th.sin()),
    }
}

/// Finite-difference pullback of the ambient rigid-body quadratic form
/// through the embedding u = (sin t cos p, sin t sin p, cos t); returns
/// (A, B, V) at (theta, phi). Oracle for the closed forms of `gc_profile`.
pub fn gc_pullback_fd(theta: f64, phi: f64, h: f64) -> (f64, f64, f64) {
    let embed = |t: f64, p: f64| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
    let u = embed(theta, phi);
    let den = 4.0 * u[0] * u[0] + 4.0 * u[1] * u[1] + u[2] * u[2];
    let quad = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + 4.0 * v[2] * v[2]) / den;
    // 4th-order central first derivatives of the embedding.
    let d4 = |g: &dyn Fn(f64) -> [f64; 3]| {
        let (a, b, c, d) = (g(-2.0 * h), g(-h), g(h), g(2.0 * h));
        [
            (a[0] - 8.0 * b[0] + 8.0 * c[0] - d[0]) / (12.0 * h),
            (a[1] - 8.0 * b[1] + 8.0 * c[1] - d[1]) / (12.0 * h),
            (a[2] - 8.0 * b[2] + 8.0 * c[2] - d[2]) / (12.0 * h),
        ]
    };
    let ut = d4(&|e| embed(theta + e, phi));
    let up = d4(&|e| embed(theta, phi + e));
    (quad(ut), quad(up), -u[0])
}

/// Conformal polar coordinates of a rotationally symmetric profile: the
/// map theta(y) solving dtheta/dy = sqrt(B/A), theta(0) = pi/2, on
/// y in [-y_span, y_span]. The metric becomes B(theta(y)) (dphi^2 + dy^2).
pub struct ConformalPolarMap {
    pub y_span: f64,
    fwd: Solution<1>,
    bwd: Solution<1>,
    a: Rc<dyn Fn(f64) -> f64>,
    b: Rc<dyn Fn(f64) -> f64>,
    v: Rc<dyn Fn(f64) -> f64>,
}

impl ConformalPolarMap {
    pub fn theta(&self, y: f64) -> f64 {
        let (sol, yc) = if y >= 0.0 {
            (&self.fwd, y.min(self.y_span))
        } else {
            (&self.bwd, y.max(-self.y_span))
        };
        sol.eval(yc).map(|s| s[0]).unwrap_or_else(|| sol.y_end()[0])
    }

    /// Conformal factor lambda(y) = B(theta(y)).
    pub fn lambda(&self, y: f64) -> f64 {
        (self.b)(self.theta(y))
    }

    /// Potential amplitude V(theta(y)).
    pub fn potential(&self, y: f64) -> f64 {
        (self.v)(self.theta(y))
    }

    #[allow(dead_code)]
    fn a_coeff(&self, th: f64) -> f64 {
        (self.a)(th)
    }
}

/// Build the conformal polar chart of a profile over |y| <= y_span.
pub fn conformal_polar_coords(
    profile: &RotSymMetricProfile,
    y_span: f64,
) -> Result<ConformalPolarMap> {
    let (a, b) = (profile.a.clone(), profile.b.clone());
    let rhs = move |_t: f64, s: &[f64; 1], ds: &mut [f64; 1]| -> Result<()> {
        let th = s[0];
        if !(0.0..=std::f64::consts::PI).contains(&th) {
            return Err(CoreError::QuadratureFailure(format!(
                "theta left (0, pi) at theta = {th}"
            )));
        }
        let (av, bv) = (a(th), b(th));
        if av <= 0.0 || bv < 0.0 {
            return Err(CoreError::QuadratureFailure(format!(
                "metric coefficients not positive at theta = {th}"
            )));
        }
        ds[0] = (bv / av).sqrt();
        Ok(())
    };
    let ctrl = Controller { rtol: 1e-13, atol: 1e-14, max_step: 0.1, event_tol: 1e-12 };
    let y0 = [std::f64::consts::FRAC_PI_2];
    let fwd = dopri5::integrate(&rhs, 0.0, y0, y_span, &ctrl, &mut [])
        .map_err(|e| CoreError::QuadratureFailure(format!("forward leg: {e}")))?;
    let bwd = dopri5::integrate(&rhs, 0.0, y0, -y_span, &ctrl, &mut [])
        .map_err(|e| CoreError::QuadratureFailure(format!("backward leg: {e}")))?;
    Ok(ConformalPolarMap {
        y_span,
        fwd,
        bwd,
        a: profile.a.clone(),
        b: profile.b.clone(),
        v: profile.v.clone(),
    })
}

/// y(theta) = integral of sqrt(A/B) from pi/2, by adaptive integration.
pub fn y_of_theta(profile: &RotSymMetricProfile, theta: f64) -> Result<f64> {
    let (a, b) = (profile.a.clone(), profile.b.clone());
    let rhs = move |t: f64, _s: &[f64; 1], ds: &mut [f64; 1]| -> Result<()> {
        let (av, bv) = (a(t), b(t));
        if bv <= 0.0 {
            return Err(CoreError::QuadratureFailure(format!(
                "azimuthal coefficient vanishes at theta = {t}"
            )));
        }
        ds[0] = (av / bv).sqrt();
        Ok(())
    };
    if (theta - std::f64::consts::FRAC_PI_2).abs() < 1e-14 {
        return Ok(0.0);
    }
    let ctrl = Controller { rtol: 1e-13, atol: 1e-14, max_step: 0.05, event_tol: 1e-12 };
    let sol = dopri5::integrate(&rhs, std::f64::consts::FRAC_PI_2, [0.0], theta, &ctrl, &mut [])
        .map_err(|e| CoreError::QuadratureFailure(format!("y(theta): {e}")))?;
    Ok(sol.y_end()[0])
}

/// A metric-plus-potential in the radial polar chart:
/// lambda(r)(r^2 dphi^2 + dr^2) + rho(r) r cos(phi).
#[derive(Clone)]
pub struct RadialForm {
    pub lambda: Rc<dyn Fn(f64) -> f64>,
    pub rho: Rc<dyn Fn(f64) -> f64>,
}

/// The round-sphere radial form (stereographic): lambda = 4/(1+r^2)^2.
pub fn round_sphere_radial() -> RadialForm {
    RadialForm {
        lambda: Rc::new(|r: f64| 4.0 / (1.0 + r * r).powi(2)),
        rho: Rc::new(|r: f64| -2.0 / (1.0 + r * r)),
    }
}

/// The gauge transformation r_new = D r^{sign}: re-expresses the radial
/// form in the new chart.
pub fn lemma_l_transform(form: &RadialForm, d: f64, sign: i32) -> Result<RadialForm> {
    if d <= 0.0 {
        return Err(CoreError::InvalidInput("gauge scale D must be positive".into()));
    }
    if sign != 1 && sign != -1 {
        return Err(CoreError::InvalidInput("gauge sign must be +1 or -1".into()));
    }
    let (lam, rho) = (form.lambda.clone(), form.rho.clone());
    let out = if sign == 1 {
        // r = r_new / D: r^2 dphi^2 + dr^2 scales by 1/D^2.
        RadialForm {
            lambda: Rc::new(move |rn: f64| lam(rn / d) / (d * d)),
            rho: Rc::new(move |rn: f64| rho(rn / d) / d),
        }
    } else {
        // r = D / r_new: the quadratic form picks up D^2 / r_new^4.
        RadialForm {
            lambda: Rc::new(move |rn: f64| lam(d / rn) * d * d / rn.powi(4)),
            rho: Rc::new(move |rn: f64| rho(d / rn) * d / (rn * rn)),
        }
    };
    Ok(out)
}

/// A profile in the conformal y-chart: the kinetic conformal factor Q(y)
/// and the potential amplitude V(y) (potential = V cos phi), over
/// [y_min, y_max]. Out-of-range or singular queries return errors and are
/// skipped by the matcher.
pub struct YProfile {
    pub y_min: f64,
    pub y_max: f64,
    eval: Rc<dyn Fn(f64) -> Result<(f64, f64)>>,
}

impl YProfile {
    /// Wrap an arbitrary (Q, V) evaluator.
    pub fn from_fn(
        y_min: f64,
        y_max: f64,
        eval: impl Fn(f64) -> Result<(f64, f64)> + 'static,
    ) -> YProfile {
        YProfile { y_min, y_max, eval: Rc::new(eval) }
    }

    pub fn eval(&self, y: f64) -> Result<(f64, f64)> {
        if y < self.y_min || y > self.y_max {
            return Err(CoreError::NoOverlap);
        }
        (self.eval)(y)
    }

    /// The second family at (tau, b): Q = (psi'^2 - psi^2 + b)/psi'^2,
    /// V = -psi'^2 (psi'' - psi)/(psi'^2 - psi^2 + b).
    pub fn family_b(tau: f64, b: f64, y_span: f64) -> Result<YProfile> {
        let profile: PsiProfile = build_psi(tau, (-y_span, y_span))?;
        let eval = move |y: f64| -> Result<(f64, f64)> {
            let [x, x1, x2] = profile.jet(y);
            let d = x1 * x1 - x * x + b;
            if x1.abs() < 1e-7 || d.abs() < 1e-10 {
                return Err(CoreError::DegenerateDerivative { y });
            }
            Ok((d / (x1 * x1), -x1 * x1 * (x2 - x) / d))
        };
        Ok(YProfile { y_min: -y_span, y_max: y_span, eval: Rc::new(eval) })
    }

    /// The rigid-body profile in its conformal chart: Q = lambda(y),
    /// V = potential amplitude.
    pub fn gc(y_span: f64) -> Result<YProfile> {
        let map = conformal_polar_coords(&gc_profile(), y_span)?;
        let eval = move |y: f64| -> Result<(f64, f64)> { Ok((map.lambda(y), map.potential(y))) };
        Ok(YProfile { y_min: -y_span, y_max: y_span, eval: Rc::new(eval) })
    }
}

/// Result of the Hamiltonian-equivalence fit: independent scalings of the
/// potential (C0) and kinetic (C3) parts, the chart shift y1, and the two
/// sup-norm residuals (relative to the sup of the left profile).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EquivalenceFit {
    pub c0: f64,
    pub c3: f64,
    pub y1: f64,
    /// Chart orientation: +1 or -1.
    pub sign: i32,
    pub residual_v: f64,
    pub residual_k: f64,
}

impl EquivalenceFit {
    pub fn residual(&self) -> f64 {
        self.residual_v.max(self.residual_k)
    }
}

fn fit_at(p1: &YProfile, p2: &YProfile, eps: f64, y1: f64) -> Option<EquivalenceFit> {
    // Overlap of y (chart of p1) with the preimage of p2's range under
    // y -> eps*y + y1.
    let (img_lo, img_hi) = if eps > 0.0 {
        ((p2.y_min - y1) / eps, (p2.y_max - y1) / eps)
    } else {
        ((p2.y_max - y1) / eps, (p2.y_min - y1) / eps)
    };
    let lo = p1.y_min.max(img_lo);
    let hi = p1.y_max.min(img_hi);
    if hi - lo < 1.0 {
        return None;
    }
    let n = 201;
    let mut qs: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut vs: Vec<(f64, f64)> = Vec::with_capacity(n);
    for k in 0..n {
        let y = lo + (hi - lo) * (k as f64 + 0.5) / (n as f64);
        let (a, b) = match (p1.eval(y), p2.eval(eps * y + y1)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        if a.0.is_finite() && a.1.is_finite() && b.0.is_finite() && b.1.is_finite() {
            qs.push((a.0, b.0));
            vs.push((a.1, b.1));
        }
    }
    if qs.len() < 50 {
        return None;
    }
    let ratio = |pairs: &[(f64, f64)]| {
        let num: f64 = pairs.iter().map(|(a, b)| a * b).sum();
        let den: f64 = pairs.iter().map(|(_, b)| b * b).sum();
        num / den.max(1e-300)
    };
    let c3 = ratio(&qs);
    let c0 = ratio(&vs);
    let sup_rel = |pairs: &[(f64, f64)], c: f64| {
        let scale = pairs.iter().map(|(a, _)| a.abs()).fold(0.0, f64::max).max(1e-300);
        pairs.iter().map(|(a, b)| (a - c * b).abs()).fold(0.0, f64::max) / scale
    };
    Some(EquivalenceFit {
        c0,
        c3,
        y1,
        sign: if eps > 0.0 { 1 } else { -1 },
        residual_v: sup_rel(&vs, c0),
        residual_k: sup_rel(&qs, c3),
    })
}

/// Search the gauge freedom (orientation sign, shift y1 in `search_box`)
/// and fit the two constant scalings by least squares; the objective is
/// the joint sup-residual.
pub fn match_equivalence(
    p1: &YProfile,
    p2: &YProfile,
    search_box: (f64, f64),
) -> Result<EquivalenceFit> {
    let (lo, hi) = search_box;
    if !(hi > lo) {
        return Err(CoreError::InvalidInput("empty gauge search box".into()));
    }
    let mut best: Option<EquivalenceFit> = None;
    let coarse = 0.05_f64;
    let steps = ((hi - lo) / coarse).ceil() as usize;
    for eps in [1.0f64, -1.0] {
        let mut best_y1: Option<(f64, f64)> = None; // (objective, y1)
        for k in 0..=steps {
            let y1 = lo + (hi - lo) * (k as f64) / (steps as f64);
            if let Some(fit) = fit_at(p1, p2, eps, y1) {
                let obj = fit.residual();
                if best_y1.map_or(true, |(b, _)| obj < b) {
                    best_y1 = Some((obj, y1));
                }
            }
        }
        let Some((_, center)) = best_y1 else { continue };
        // Golden-section refinement of the shift around the coarse winner.
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut a = (center - coarse).max(lo);
        let mut b = (center + coarse).min(hi);
        let obj = |y1: f64| fit_at(p1, p2, eps, y1).map_or(f64::INFINITY, |f| f.residual());
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (obj(c), obj(d));
        for _ in 0..90 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = obj(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = obj(d);
            }
        }
        let y1 = 0.5 * (a + b);
        // Keep the coarse winner when refinement did not improve on it
        // (sharp minima at grid points, e.g. the self match at shift 0).
        let candidates = [y1, center];
        for cand in candidates {
            if let Some(fit) = fit_at(p1, p2, eps, cand) {
                if best.as_ref().map_or(true, |b| fit.residual() < b.residual()) {
                    best = Some(fit);
                }
            }
        }
    }
    best.ok_or(CoreError::NoOverlap)
}

/// The parameter b = psi(y0)^2 of the second family at the critical value
/// of tau, where y0 is the stationary point of psi.
pub fn gc_b_value(tau: f64) -> Result<f64> {
    let profile = build_psi(tau, (-12.0, 12.0))?;
    match profile.stationary_point() {
        Some((_y0, x0)) => Ok(x0 * x0),
        None => Err(CoreError::NoStationaryPoint { tau }),
    }
}
