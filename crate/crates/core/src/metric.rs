//! Profiles psi(y), the conformal factors and Hamiltonians of the two
//! integrable families, admissible-b bounds, polar charts, and smoothness /
//! curvature diagnostics.

use crate::critical::{self, GProfile};
use crate::dopri5::{self, Controller, Solution};
use crate::error::{CoreError, Result};
use crate::ode;
use serde::Serialize;

/// Default half-width of the y grid.
pub const Y_RANGE_DEFAULT: f64 = 12.0;

/// Tolerance under which a requested tau counts as the critical value.
pub const TAU_CRITICAL_TOL: f64 = 1e-8;

/// Pieces of the critical profile near its stationary point.
#[derive(Clone, Debug)]
struct CriticalPieces {
    t0: f64,
    x0: f64,
    /// Outer backward piece (y < t0 - handover).
    outer: Solution<3>,
}

/// A solution psi of the governing equation on a y interval, with dense
/// evaluation of the full jet (psi ... psi'''').
#[derive(Clone, Debug)]
pub struct PsiProfile {
    pub tau: f64,
    pub y_range: (f64, f64),
    fwd: Solution<3>,
    bwd: Solution<3>,
    critical: Option<CriticalPieces>,
}

impl PsiProfile {
    /// psi, psi', psi'' at y.
    pub fn jet(&self, y: f64) -> [f64; 3] {
        if let Some(cp) = &self.critical {
            let u = y - cp.t0;
            if u.abs() <= critical::SERIES_HANDOVER {
                let j = critical::symmetric_series_jet(cp.x0, cp.t0, u);
                return [j.x, j.x1, j.x2];
            }
            if y < cp.t0 {
                return cp.outer.eval(y).unwrap_or_else(|| cp.outer.y_end());
            }
        }
        if y == 0.0 {
            return [0.0, 1.0, self.tau];
        }
        let sol = if y > 0.0 { &self.fwd } else { &self.bwd };
        sol.eval(y).unwrap_or_else(|| sol.y_end())
    }

    /// psi ... psi''' at y (third derivative from the governing equation,
    /// or from the symmetric series near the critical stationary point).
    pub fn jet4(&self, y: f64) -> [f64; 4] {
        if let Some(cp) = &self.critical {
            let u = y - cp.t0;
            if u.abs() <= critical::SERIES_HANDOVER {
                let j = critical::symmetric_series_jet(cp.x0, cp.t0, u);
                return [j.x, j.x1, j.x2, critical::symmetric_series_x3(cp.x0, u)];
            }
        }
        let [x, x1, x2] = self.jet(y);
        let x3 = (x * x2 - 2.0 * x2 * x2 + x1 * x1 + x * x) / x1;
        [x, x1, x2, x3]
    }

    /// psi ... psi'''' at y.
    pub fn jet5(&self, y: f64) -> [f64; 5] {
        if let Some(cp) = &self.critical {
            let u = y - cp.t0;
            if u.abs() <= critical::SERIES_HANDOVER {
                let j = critical::symmetric_series_jet(cp.x0, cp.t0, u);
                let x4 = cp.x0 * (1.0 / 16.0 - 7.0 * u * u / 64.0);
                return [j.x, j.x1, j.x2, critical::symmetric_series_x3(cp.x0, u), x4];
            }
        }
        let [x, x1, x2, x3] = self.jet4(y);
        // Differentiate psi''' = (psi psi'' - 2 psi''^2 + psi'^2 + psi^2)/psi'.
        let x4 = (3.0 * x1 * x2 + 2.0 * x * x1 + (x - 5.0 * x2) * x3) / x1;
        [x, x1, x2, x3, x4]
    }

    /// m(y) = psi^2 - psi'^2.
    pub fn m(&self, y: f64) -> f64 {
        let [x, x1, _] = self.jet(y);
        x * x - x1 * x1
    }

    /// The stationary point (y0, psi(y0)) of the critical profile, if any.
    pub fn stationary_point(&self) -> Option<(f64, f64)> {
        self.critical.as_ref().map(|cp| (cp.t0, cp.x0))
    }
}

/// Build the psi profile for tau in [0, T]; tau within `TAU_CRITICAL_TOL`
/// of the critical value uses the symmetric-jet construction around the
/// stationary point.
pub fn build_psi(tau: f64, y_range: (f64, f64)) -> Result<PsiProfile> {
    let t_crit = critical::critical_profile().t;
    if !((-t_crit - 1e-9)..=(t_crit + TAU_CRITICAL_TOL)).contains(&tau) {
        return Err(CoreError::InvalidInput(format!(
            "tau = {tau} outside [-T, T] for profile construction"
        )));
    }
    let ctrl = Controller { rtol: 1e-12, atol: 1e-14, max_step: 0.5, event_tol: 1e-12 };
    let critical_case = (tau - t_crit).abs() <= TAU_CRITICAL_TOL;
    let fwd = dopri5::integrate(&ode::jet_system, 0.0, [0.0, 1.0, tau], y_range.1, &ctrl, &mut [])?;
    if !critical_case {
        let bwd =
            dopri5::integrate(&ode::jet_system, 0.0, [0.0, 1.0, tau], y_range.0, &ctrl, &mut [])?;
        return Ok(PsiProfile { tau, y_range, fwd, bwd, critical: None });
    }
    let cp = critical::critical_profile();
    // Backward from 0 stops just before the stationary point; beyond it the
    // even symmetry of the critical solution about t0 seeds a fresh
    // integration from the series.
    let bwd = dopri5::integrate(
        &ode::jet_system,
        0.0,
        [0.0, 1.0, cp.t],
        cp.t0 + critical::SERIES_HANDOVER,
        &ctrl,
        &mut [],
    )?;
    let seed = critical::symmetric_series_jet(cp.x0, cp.t0, -critical::SERIES_HANDOVER);
    let outer = dopri5::integrate(
        &ode::jet_system,
        seed.t,
        [seed.x, seed.x1, seed.x2],
        y_range.0,
        &ctrl,
        &mut [],
    )?;
    Ok(PsiProfile {
        tau,
        y_range,
        fwd,
        bwd,
        critical: Some(CriticalPieces { t0: cp.t0, x0: cp.x0, outer }),
    })
}

/// The two constructed families (and the rigid-body profile handled in the
/// equivalence module).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Family {
    /// xi'' = c / psi'^2.
    A { c: f64 },
    /// xi'' = a (psi'^2 - psi^2 + b) / psi'^2 with |a| = 1; the sign of a
    /// is chosen so that the conformal factor is positive for admissible b.
    B { b: f64 },
    Gc,
}

/// A family at a parameter value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HamiltonianSpec {
    pub family: Family,
    pub tau: f64,
}

/// The harmonic coefficient a of f = psi cos(phi) + xi + a (phi^2 - y^2).
pub fn harmonic_a(family: &Family) -> f64 {
    match family {
        Family::A { .. } => 0.0,
        Family::B { b } => {
            if *b + 1.0 >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        Family::Gc => 0.0,
    }
}

/// xi''(y) for the given family.
pub fn xi_second(profile: &PsiProfile, family: &Family, y: f64) -> Result<f64> {
    let [x, x1, _] = profile.jet(y);
    match family {
        Family::A { c } => {
            if x1.abs() < 1e-8 {
                return Err(CoreError::DegenerateDerivative { y });
            }
            Ok(c / (x1 * x1))
        }
        Family::B { b } => {
            if x1.abs() < 1e-12 {
                // At the critical stationary point the combination has a
                // finite limit 3 b / 1 ... handled by the caller via the
                // series; reject the raw division here.
                return Err(CoreError::DegenerateDerivative { y });
            }
            Ok(harmonic_a(family) * (x1 * x1 - x * x + b) / (x1 * x1))
        }
        Family::Gc => Err(CoreError::ChartMismatch("xi'' undefined for the rigid-body profile".into())),
    }
}

/// Data needed by the cubic-integral machinery: the second derivatives of
/// f(phi, y) = psi cos(phi) + xi(y) + a (phi^2 - y^2), with enough
/// y-derivatives of psi and xi'' for analytic differentiation.
pub trait ConformalSurface {
    /// psi ... psi'''' at y.
    fn psi_jet(&self, y: f64) -> [f64; 5];
    /// xi'', xi''', xi'''' at y.
    fn xi_jet(&self, y: f64) -> [f64; 3];
    /// Harmonic coefficient a.
    fn a(&self) -> f64;
}

/// Conformal surface of one of the constructed families (the constant of
/// family A / scale of family B may be overridden for the energy lift).
pub struct FamilySurface<'p> {
    pub profile: &'p PsiProfile,
    pub family: Family,
    /// Overrides c (family A) or a (family B) when lifting to an energy
    /// level; `None` uses c as given and |a| = 1 with the positivity sign.
    pub scale_override: Option<f64>,
}

impl<'p> FamilySurface<'p> {
    pub fn new(profile: &'p PsiProfile, family: Family) -> Self {
        FamilySurface { profile, family, scale_override: None }
    }

    pub fn with_scale(profile: &'p PsiProfile, family: Family, scale: f64) -> Self {
        FamilySurface { profile, family, scale_override: Some(scale) }
    }
}

impl ConformalSurface for FamilySurface<'_> {
    fn psi_jet(&self, y: f64) -> [f64; 5] {
        self.profile.jet5(y)
    }

    fn xi_jet(&self, y: f64) -> [f64; 3] {
        let [x, x1, x2, x3, _] = self.profile.jet5(y);
        match self.family {
            Family::A { c } => {
                let c = self.scale_override.unwrap_or(c);
                let d2 = c / (x1 * x1);
                let d3 = -2.0 * c * x2 / (x1 * x1 * x1);
                let d4 = -2.0 * c * (x3 * x1 - 3.0 * x2 * x2) / (x1 * x1 * x1 * x1);
                [d2, d3, d4]
            }
            Family::B { b } => {
                let a = self.scale_override.unwrap_or_else(|| harmonic_a(&self.family));
                // xi'' = a (1 + u / psi'^2) with u = b - psi^2.
                let u = b - x * x;
                let u1 = -2.0 * x * x1;
                let u2 = -2.0 * (x1 * x1 + x * x2);
                let d2 = a * (1.0 + u / (x1 * x1));
                let n = u1 * x1 - 2.0 * u * x2;
                let n1 = u2 * x1 - u1 * x2 - 2.0 * u * x3;
                let d3 = a * n / (x1 * x1 * x1);
                let d4 = a * (n1 * x1 - 3.0 * n * x2) / (x1 * x1 * x1 * x1);
                [d2, d3, d4]
            }
            Family::Gc => [f64::NAN; 3],
        }
    }

    fn a(&self) -> f64 {
        match self.family {
            Family::B { .. } => self.scale_override.unwrap_or_else(|| harmonic_a(&self.family)),
            _ => 0.0,
        }
    }
}

/// Second derivatives of f at a point.
#[derive(Clone, Copy, Debug)]
pub struct FSecond {
    pub f_pp: f64,
    pub f_yy: f64,
    pub f_py: f64,
}

/// Second derivatives of f = psi cos(phi) + xi + a (phi^2 - y^2).
pub fn f_second(surface: &dyn ConformalSurface, phi: f64, y: f64) -> FSecond {
    let [x, x1, x2, _, _] = surface.psi_jet(y);
    let [xi2, _, _] = surface.xi_jet(y);
    let a = surface.a();
    FSecond {
        f_pp: -x * phi.cos() + 2.0 * a,
        f_yy: x2 * phi.cos() + xi2 - 2.0 * a,
        f_py: -x1 * phi.sin(),
    }
}

/// Conformal factor lambda = (psi'' - psi) cos(phi) + xi''.
pub fn conformal_factor(surface: &dyn ConformalSurface, phi: f64, y: f64) -> f64 {
    let f = f_second(surface, phi, y);
    f.f_pp + f.f_yy
}

/// lambda and its first and second derivatives in (phi, y), analytic.
pub fn conformal_factor_jet(
    surface: &dyn ConformalSurface,
    phi: f64,
    y: f64,
) -> (f64, [f64; 2], [f64; 3]) {
    let [x, x1, x2, x3, x4] = surface.psi_jet(y);
    let [xi2, xi3, xi4] = surface.xi_jet(y);
    let d = x2 - x;
    let dp = x3 - x1;
    let dpp = x4 - x2;
    let lam = d * phi.cos() + xi2;
    let grad = [-d * phi.sin(), dp * phi.cos() + xi3];
    let second = [
        -d * phi.cos(),                    // lambda_phiphi
        -dp * phi.sin(),                   // lambda_phiy
        dpp * phi.cos() + xi4,             // lambda_yy
    ];
    (lam, grad, second)
}

/// A cotangent point in the conformal chart.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CotangentState {
    pub phi: f64,
    pub y: f64,
    pub p_phi: f64,
    pub p_y: f64,
}

/// Inverse-metric weight w(y): H = w (p_phi^2 + p_y^2)/2 + U.
pub fn kinetic_weight(profile: &PsiProfile, family: &Family, y: f64) -> Result<f64> {
    let [x, x1, _] = profile.jet(y);
    match family {
        Family::A { .. } => Ok(x1 * x1),
        Family::B { b } => {
            let den = x1 * x1 - x * x + b;
            if den.abs() < 1e-12 {
                return Err(CoreError::DegenerateDenominator { y });
            }
            Ok(x1 * x1 / den)
        }
        Family::Gc => Err(CoreError::ChartMismatch("use the equivalence module for the rigid-body family".into())),
    }
}

/// Potential U(phi, y) of the conservative system.
pub fn potential(profile: &PsiProfile, family: &Family, phi: f64, y: f64) -> Result<f64> {
    let [x, x1, x2] = profile.jet(y);
    match family {
        Family::A { .. } => Ok(-(x2 - x) * x1 * x1 * phi.cos()),
        Family::B { b } => {
            let den = x1 * x1 - x * x + b;
            if den.abs() < 1e-12 {
                return Err(CoreError::DegenerateDenominator { y });
            }
            Ok(-x1 * x1 * (x2 - x) * phi.cos() / den)
        }
        Family::Gc => Err(CoreError::ChartMismatch("use the equivalence module for the rigid-body family".into())),
    }
}

/// H = K + U at a state.
pub fn hamiltonian_eval(
    profile: &PsiProfile,
    family: &Family,
    state: &CotangentState,
) -> Result<f64> {
    let w = kinetic_weight(profile, family, state.y)?;
    let u = potential(profile, family, state.phi, state.y)?;
    Ok(0.5 * w * (state.p_phi * state.p_phi + state.p_y * state.p_y) + u)
}

/// Admissibility bounds: b must satisfy b > upper = max m or b < lower = min m.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BBounds {
    /// min over y of m = psi^2 - psi'^2 (admissible b below this).
    pub lower: f64,
    /// max over y of m (admissible b above this).
    pub upper: f64,
}

fn refine_extremum(profile: &PsiProfile, y_guess: f64, h: f64, maximize: bool) -> f64 {
    let sgn = if maximize { 1.0 } else { -1.0 };
    let (mut a, mut b) = (y_guess - h, y_guess + h);
    for _ in 0..80 {
        let u = a + (b - a) * 0.381966;
        let v = b - (b - a) * 0.381966;
        if sgn * profile.m(u) > sgn * profile.m(v) {
            b = v;
        } else {
            a = u;
        }
    }
    0.5 * (a + b)
}

/// Bounds from the grid of m(y) closed with the boundary-chart limits
/// m(+-inf) = 4 g'(0) g(0) (for the profiles at tau and -tau).
pub fn b_bounds(profile: &PsiProfile, pole: &critical::PoleData) -> Result<BBounds> {
    // The combination psi^2 - psi'^2 is a difference of exponentially large
    // quantities; past |y| ~ 8 it is roundoff-limited, and the tails are
    // covered by the asymptotic closure below anyway.
    let (y_lo, y_hi) = (profile.y_range.0.max(-8.0), profile.y_range.1.min(8.0));
    let n = 2400usize;
    let h = (y_hi - y_lo) / n as f64;
    let mut best_max = (f64::NEG_INFINITY, 0.0f64);
    let mut best_min = (f64::INFINITY, 0.0f64);
    for k in 0..=n {
        let y = y_lo + h * k as f64;
        let m = profile.m(y);
        if m > best_max.0 {
            best_max = (m, y);
        }
        if m < best_min.0 {
            best_min = (m, y);
        }
    }
    let y_max = refine_extremum(profile, best_max.1, h, true);
    let y_min = refine_extremum(profile, best_min.1, h, false);
    let mut hi = profile.m(y_max);
    let mut lo = profile.m(y_min);
    // Asymptotic closure: m -> 4 g'(0) g(0) at both ends.
    let m_plus = 4.0 * pole.gp.g0p * pole.gp.g0;
    let m_minus = 4.0 * pole.gm.g0p * pole.gm.g0;
    // The asymptotic value must agree with the grid tail.
    for (m_inf, y_tail) in [(m_plus, y_hi), (m_minus, y_lo)] {
        let tail = profile.m(y_tail);
        if (m_inf - tail).abs() > 1e-3 * (1.0 + m_inf.abs()) {
            return Err(CoreError::UnboundedDiagnostic { asymptotic: m_inf, grid: tail });
        }
        hi = hi.max(m_inf);
        lo = lo.min(m_inf);
    }
    Ok(BBounds { lower: lo, upper: hi })
}

/// Independent bounds from the quadrature Phi accumulated along the
/// boundary-chart profiles: m(y) + 1 = Phi_tau(s) on one end and
/// Phi_{-tau}(s) on the other.
pub fn b_bounds_via_phi(pole: &critical::PoleData) -> BBounds {
    let (lo_p, hi_p) = pole.gp.phi_extrema();
    let (lo_m, hi_m) = pole.gm.phi_extrema();
    BBounds { lower: lo_p.min(lo_m) - 1.0, upper: hi_p.max(hi_m) - 1.0 }
}

/// Polar chart id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chart {
    /// r = exp(y); r -> 0 is y -> -infinity.
    RPlus,
    /// r = exp(-y); r -> 0 is y -> +infinity.
    RMinus,
}

impl Chart {
    pub fn parse(s: &str) -> Result<Chart> {
        match s {
            "r+" | "rplus" | "RPlus" => Ok(Chart::RPlus),
            "r-" | "rminus" | "RMinus" => Ok(Chart::RMinus),
            other => Err(CoreError::ChartMismatch(format!("unknown chart id '{other}'"))),
        }
    }
}

/// Rotationally symmetric polar form of a family metric in one chart,
/// evaluated through the boundary-chart profile (exact in s = r^2, hence
/// smooth across r = 0 by construction when the family is admissible).
pub struct PolarMetric<'g> {
    pub chart: Chart,
    pub family: Family,
    /// g profile attached to the r -> 0 end of this chart.
    pub gprof: &'g GProfile,
}

impl PolarMetric<'_> {
    /// The rotationally invariant metric coefficient:
    /// family A: c / zeta(s)^2; family B: a (b + 1 - Phi(s)) / zeta(s)^2.
    pub fn metric_coeff(&self, r: f64) -> f64 {
        let s = r * r;
        let z = self.gprof.zeta(s);
        match self.family {
            Family::A { c } => c / (z * z),
            Family::B { b } => {
                harmonic_a(&self.family) * (b + 1.0 - self.gprof.phi(s)) / (z * z)
            }
            Family::Gc => f64::NAN,
        }
    }

    /// The cos(phi) coefficient (psi'' - psi) / r^2 expressed in s:
    /// +-4 sqrt(s) g''(s), vanishing at the pole.
    pub fn potential_coeff(&self, r: f64) -> f64 {
        let s = r * r;
        let sign = match self.chart {
            Chart::RMinus => 1.0,
            Chart::RPlus => -1.0,
        };
        sign * 4.0 * s.sqrt() * self.gprof.eval(s)[2]
    }
}

/// Build the polar form in one chart. The r -> 0 end of `Chart::RMinus` is
/// y -> +infinity (profile at tau); `Chart::RPlus` is y -> -infinity
/// (profile at -tau via the reflection).
pub fn polar_form<'g>(
    family: &Family,
    chart: Chart,
    pole: &'g critical::PoleData,
) -> PolarMetric<'g> {
    let gprof = match chart {
        Chart::RMinus => &pole.gp,
        Chart::RPlus => &pole.gm,
    };
    PolarMetric { chart, family: *family, gprof }
}

/// Least-squares fit of samples (r, v) against an even power series
/// 1, r^2, ..., r^8; returns (value at r = 0, max residual).
pub fn even_series_fit(samples: &[(f64, f64)]) -> (f64, f64) {
    match crate::util::lsq_fit(samples, 5, |r| {
        let s = r * r;
        vec![1.0, s, s * s, s * s * s, s * s * s * s]
    }) {
        Some((coef, res)) => (coef[0], res),
        None => (f64::NAN, f64::INFINITY),
    }
}

/// Smoothness report for one chart.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChartSmoothness {
    pub chart: Chart,
    pub ok: bool,
    pub metric_limit: f64,
    pub metric_residual: f64,
    pub potential_limit: f64,
    pub potential_residual: f64,
}

/// Pole-smoothness diagnostic (never raises: failures are reported).
#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub charts: Vec<ChartSmoothness>,
    /// Set when a chart's boundary profile could not be constructed at all
    /// (e.g. the critical family A degeneracy).
    pub degenerate: bool,
    pub notes: Vec<String>,
}

/// Fit both polar charts near r = 0 against even power series in r.
pub fn pole_smoothness_check(tau: f64, family: &Family) -> SmoothnessReport {
    let mut charts = Vec::new();
    let mut notes = Vec::new();
    let mut degenerate = false;
    for chart in [Chart::RPlus, Chart::RMinus] {
        let t = match chart {
            Chart::RMinus => tau,
            Chart::RPlus => -tau,
        };
        match critical::solve_g(t) {
            Ok(gprof) => {
                let pm = PolarMetric { chart, family: *family, gprof: &gprof };
                let rs: Vec<f64> = (0..=24).map(|k| 0.2 * k as f64 / 24.0).collect();
                let mc: Vec<(f64, f64)> = rs.iter().map(|&r| (r, pm.metric_coeff(r))).collect();
                let pc: Vec<(f64, f64)> = rs.iter().map(|&r| (r, pm.potential_coeff(r))).collect();
                let finite =
                    mc.iter().chain(pc.iter()).all(|(_, v)| v.is_finite() && v.abs() < 1e8);
                if !finite {
                    degenerate = true;
                    notes.push(format!("{chart:?}: non-finite polar samples"));
                    charts.push(ChartSmoothness {
                        chart,
                        ok: false,
                        metric_limit: f64::NAN,
                        metric_residual: f64::INFINITY,
                        potential_limit: f64::NAN,
                        potential_residual: f64::INFINITY,
                    });
                    continue;
                }
                let (ml, mr) = even_series_fit(&mc);
                // The cos(phi) coefficient is odd in r about the pole only
                // through sqrt(s) * smooth; fit v / r against an even series
                // away from r = 0 and record v(0) = 0 directly.
                let pc_over_r: Vec<(f64, f64)> =
                    pc.iter().filter(|(r, _)| *r > 1e-6).map(|&(r, v)| (r, v / r)).collect();
                let (_, pr) = even_series_fit(&pc_over_r);
                charts.push(ChartSmoothness {
                    chart,
                    ok: mr <= 1e-6 && pr <= 1e-6,
                    metric_limit: ml,
                    metric_residual: mr,
                    potential_limit: 0.0,
                    potential_residual: pr,
                });
            }
            Err(e) => {
                degenerate = true;
                notes.push(format!("{chart:?}: boundary profile failed: {e}"));
                charts.push(ChartSmoothness {
                    chart,
                    ok: false,
                    metric_limit: f64::NAN,
                    metric_residual: f64::INFINITY,
                    potential_limit: f64::NAN,
                    potential_residual: f64::INFINITY,
                });
            }
        }
    }
    SmoothnessReport { charts, degenerate, notes }
}

/// Gaussian curvature K = -(Laplacian log lambda) / (2 lambda) with analytic
/// derivatives of the constructed conformal factor.
pub fn gaussian_curvature(surface: &dyn ConformalSurface, phi: f64, y: f64) -> Result<f64> {
    let (lam, grad, second) = conformal_factor_jet(surface, phi, y);
    if lam <= 0.0 {
        return Err(CoreError::DegenerateMetric { phi, y, lambda: lam });
    }
    let lap_log = (second[0] + second[2]) / lam
        - (grad[0] * grad[0] + grad[1] * grad[1]) / (lam * lam);
    Ok(-lap_log / (2.0 * lam))
}
