//! Oracle tests for the cubic integral, the bracket / conservation checks,
//! the integrability PDE, and the polar boundedness diagnostic.

use num_complex::Complex64;
use s2cubic::critical;
use s2cubic::cubic::{self, ControlSurface, FlowMode};
use s2cubic::metric::{self, CotangentState, Family, FamilySurface};

fn critical_t() -> f64 {
    critical::critical_profile().t
}

#[test]
fn a1_oracle_values() {
    let p = metric::build_psi(0.0, (-8.0, 8.0)).unwrap();
    let surf = FamilySurface::new(&p, Family::A { c: 1.0 });
    let a1 = cubic::a1_eval(&surf, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
    assert!((a1 - Complex64::new(3.0, -6.0)).norm() <= 1e-10, "a1 = {a1}");
    // f_py vanishes on the symmetry lines phi = 0, pi.
    for phi in [0.0, std::f64::consts::PI] {
        for y in [-1.0, 0.3, 2.0] {
            let a1 = cubic::a1_eval(&surf, phi, y).unwrap();
            assert!(a1.im.abs() <= 1e-10, "Im a1 at ({phi}, {y})");
        }
    }
}

#[test]
fn conformal_factor_jet_matches_finite_differences() {
    let t = critical_t();
    let p = metric::build_psi(0.4 * t, (-8.0, 8.0)).unwrap();
    let surf = FamilySurface::new(&p, Family::B { b: 3.0 });
    let h = 1e-4;
    for (phi, y) in [(0.5, -1.2), (2.0, 0.7), (3.0, 1.9)] {
        let (lam, grad, second) = metric::conformal_factor_jet(&surf, phi, y);
        let l = |p: f64, q: f64| metric::conformal_factor(&surf, p, q);
        assert!((lam - l(phi, y)).abs() <= 1e-12);
        let gp = (l(phi + h, y) - l(phi - h, y)) / (2.0 * h);
        let gy = (l(phi, y + h) - l(phi, y - h)) / (2.0 * h);
        assert!((grad[0] - gp).abs() <= 1e-6, "lambda_phi at ({phi},{y})");
        assert!((grad[1] - gy).abs() <= 1e-6, "lambda_y at ({phi},{y})");
        let spp = (l(phi + h, y) - 2.0 * lam + l(phi - h, y)) / (h * h);
        let syy = (l(phi, y + h) - 2.0 * lam + l(phi, y - h)) / (h * h);
        let spy = (l(phi + h, y + h) - l(phi + h, y - h) - l(phi - h, y + h)
            + l(phi - h, y - h))
            / (4.0 * h * h);
        assert!((second[0] - spp).abs() <= 1e-4, "lambda_phiphi at ({phi},{y})");
        assert!((second[1] - spy).abs() <= 1e-4, "lambda_phiy at ({phi},{y})");
        assert!((second[2] - syy).abs() <= 1e-4, "lambda_yy at ({phi},{y})");
    }
}

#[test]
fn cubic_integral_closed_forms() {
    let p = metric::build_psi(0.0, (-8.0, 8.0)).unwrap();
    let surf = FamilySurface::new(&p, Family::A { c: 1.0 });
    let at = |phi, y, p_phi, p_y| {
        cubic::cubic_integral_eval(&surf, &CotangentState { phi, y, p_phi, p_y }).unwrap()
    };
    // (p_phi, p_y) = (1, 0): F = (1 + Re a1)/4.
    let a1 = cubic::a1_eval(&surf, 1.1, 0.4).unwrap();
    assert!((at(1.1, 0.4, 1.0, 0.0) - (1.0 + a1.re) / 4.0).abs() <= 1e-12);
    // Zero momentum, cubic homogeneity.
    assert_eq!(at(1.1, 0.4, 0.0, 0.0), 0.0);
    let f1 = at(0.7, -0.3, 0.4, 0.9);
    let f2 = at(0.7, -0.3, 2.0 * 0.4, 2.0 * 0.9);
    assert!((f2 - 8.0 * f1).abs() <= 1e-10 * f1.abs().max(1.0));
}

#[test]
fn bracket_vanishes_for_the_families_and_not_for_perturbations() {
    let t = critical_t();
    let p = metric::build_psi(0.5 * t, (-10.0, 10.0)).unwrap();
    let family = Family::A { c: 1.0 };
    let surf = FamilySurface::new(&p, family);
    let h = |st: &CotangentState| {
        let (lam, _, _) = metric::conformal_factor_jet(&surf, st.phi, st.y);
        Ok((st.p_phi * st.p_phi + st.p_y * st.p_y) / (2.0 * lam))
    };
    let f = |st: &CotangentState| cubic::cubic_integral_eval(&surf, st);
    let states = [
        CotangentState { phi: 0.3, y: -0.8, p_phi: 0.7, p_y: 0.2 },
        CotangentState { phi: 2.1, y: 0.5, p_phi: -0.4, p_y: 1.1 },
        CotangentState { phi: 4.0, y: 1.4, p_phi: 0.9, p_y: -0.6 },
    ];
    for st in &states {
        let r = cubic::bracket_residual(&h, &f, st).unwrap();
        assert!(r <= 1e-6, "geodesic bracket residual {r} at {st:?}");
        let f_bad = |s: &CotangentState| Ok(f(s)? + 0.1 * s.p_phi);
        let r_bad = cubic::bracket_residual(&h, &f_bad, st).unwrap();
        assert!(r_bad >= 1e-5, "perturbed bracket residual {r_bad} too small");
    }
    // Round case: p_phi itself is conserved.
    let p0 = metric::build_psi(0.0, (-8.0, 8.0)).unwrap();
    let surf0 = FamilySurface::new(&p0, Family::A { c: 1.0 });
    let h0 = |st: &CotangentState| {
        let (lam, _, _) = metric::conformal_factor_jet(&surf0, st.phi, st.y);
        Ok((st.p_phi * st.p_phi + st.p_y * st.p_y) / (2.0 * lam))
    };
    let f0 = |st: &CotangentState| Ok(st.p_phi);
    let r = cubic::bracket_residual(&h0, &f0, &states[0]).unwrap();
    assert!(r <= 1e-10, "round p_phi residual {r}");
}

#[test]
fn conservative_bracket_vanishes_on_the_energy_level() {
    let t = critical_t();
    let p = metric::build_psi(0.5 * t, (-10.0, 10.0)).unwrap();
    let pole = critical::PoleData::new(0.5 * t).unwrap();
    let bounds = metric::b_bounds(&p, &pole).unwrap();
    for family in [Family::A { c: 1.0 }, Family::B { b: bounds.upper + 1.0 }] {
        for st in [
            CotangentState { phi: 0.9, y: -0.4, p_phi: 0.8, p_y: 0.3 },
            CotangentState { phi: 2.7, y: 1.1, p_phi: -0.5, p_y: 0.9 },
        ] {
            let e = metric::hamiltonian_eval(&p, &family, &st).unwrap();
            let lifted = FamilySurface::with_scale(&p, family, e);
            let h = |s: &CotangentState| metric::hamiltonian_eval(&p, &family, s);
            let f = |s: &CotangentState| cubic::cubic_integral_eval(&lifted, s);
            let r = cubic::bracket_residual(&h, &f, &st).unwrap();
            assert!(r <= 1e-6, "{family:?}: conservative residual {r} at {st:?}");
        }
    }
}

#[test]
fn round_geodesics_close_with_the_right_period() {
    let p = metric::build_psi(0.0, (-8.0, 8.0)).unwrap();
    let surf = FamilySurface::new(&p, Family::A { c: 1.0 });
    // Unit-speed great circle: period 2 pi, longitude advances by 2 pi.
    let st = CotangentState { phi: 0.0, y: 0.0, p_phi: 0.8, p_y: 0.6 };
    let period = 2.0 * std::f64::consts::PI;
    let flow = cubic::geodesic_flow(&surf, &st, period).unwrap();
    let v = flow.sol.eval(period).unwrap_or_else(|| flow.sol.y_end());
    assert!((v[0] - st.phi - 2.0 * std::f64::consts::PI).abs() <= 1e-5, "phi {}", v[0]);
    assert!((v[1] - st.y).abs() <= 1e-5);
    assert!((v[2] - st.p_phi).abs() <= 1e-5);
    assert!((v[3] - st.p_y).abs() <= 1e-5);
    assert!(flow.energy_drift <= 1e-9);
}

#[test]
fn cubic_integral_is_conserved_along_both_flows() {
    let t = critical_t();
    let p = metric::build_psi(0.5 * t, (-10.0, 10.0)).unwrap();
    let pole = critical::PoleData::new(0.5 * t).unwrap();
    let bounds = metric::b_bounds(&p, &pole).unwrap();
    let st = CotangentState { phi: 0.9, y: -0.3, p_phi: 0.7, p_y: 0.4 };
    for family in [Family::A { c: 1.0 }, Family::B { b: bounds.upper + 1.0 }] {
        for mode in [FlowMode::Geodesic, FlowMode::Conservative] {
            let d = cubic::conservation_drift(&p, &family, &st, 10.0, mode).unwrap();
            assert!(d <= 1e-7, "{family:?} {mode:?}: drift {d}");
        }
    }
}

#[test]
fn control_surface_breaks_conservation() {
    let st = CotangentState { phi: 0.9, y: -0.3, p_phi: 0.7, p_y: 0.4 };
    let flow = cubic::geodesic_flow(&ControlSurface, &st, 10.0).unwrap();
    assert!(flow.energy_drift <= 1e-9, "energy must still be conserved");
    let d = cubic::drift_along(&ControlSurface, &flow).unwrap();
    assert!(d >= 1e-2, "control drift {d} unexpectedly small");
}

#[test]
fn real_pde_residual_vanishes_for_the_families() {
    let t = critical_t();
    let p = metric::build_psi(0.6 * t, (-8.0, 8.0)).unwrap();
    for family in [Family::A { c: 0.8 }, Family::B { b: 2.0 }, Family::B { b: -4.0 }] {
        let surf = FamilySurface::new(&p, family);
        for i in 0..10 {
            let phi = 0.1 + 2.0 * std::f64::consts::PI * i as f64 / 10.0;
            for k in 0..10 {
                let y = -4.0 + 8.0 * k as f64 / 9.0;
                let r = cubic::eqpde_residual(&surf, phi, y);
                assert!(r.abs() <= 1e-8, "{family:?} at ({phi},{y}): {r}");
            }
        }
    }
}

#[test]
fn fd_pde_residual_matches_the_analytic_one() {
    // tau = 0, family A, c = 1: f = sinh(y) cos(phi) + log cosh(y).
    let f = |phi: f64, y: f64| y.sinh() * phi.cos() + y.cosh().ln();
    let p = metric::build_psi(0.0, (-8.0, 8.0)).unwrap();
    let surf = FamilySurface::new(&p, Family::A { c: 1.0 });
    for (phi, y) in [(0.4, 0.3), (1.7, -0.9), (2.9, 1.4)] {
        let fd = cubic::eqpde_residual_fd(&f, phi, y, 1e-3);
        let an = cubic::eqpde_residual(&surf, phi, y);
        assert!(an.abs() <= 1e-8, "analytic at ({phi},{y})");
        assert!(fd.abs() <= 1e-5, "fd at ({phi},{y}): {fd}");
    }
    // A generic non-solution: f = phi^2 y has residual -8 phi.
    let bad = |phi: f64, y: f64| phi * phi * y;
    let r = cubic::eqpde_residual_fd(&bad, 0.7, 0.2, 1e-3);
    assert!((r + 8.0 * 0.7).abs() <= 1e-4, "residual {r}");
}

#[test]
fn complex_recurrence_vanishes_for_the_families() {
    let t = critical_t();
    let p = metric::build_psi(0.5 * t, (-8.0, 8.0)).unwrap();
    for family in [Family::A { c: 1.0 }, Family::B { b: 2.0 }] {
        let surf = FamilySurface::new(&p, family);
        let phis: Vec<f64> = (0..8).map(|i| 0.2 + 6.0 * i as f64 / 8.0).collect();
        let ys: Vec<f64> = (0..8).map(|k| -3.0 + 6.0 * k as f64 / 7.0).collect();
        let (rows, hol) = cubic::systpde_check(&surf, &phis, &ys).unwrap();
        for (i, r) in rows.iter().enumerate() {
            assert!(*r <= 1e-6, "{family:?} row {i}: {r}");
        }
        assert!(hol <= 1e-8, "{family:?} holomorphicity {hol}");
    }
}

#[test]
fn complex_recurrence_flat_and_perturbed_cases() {
    // Flat metric with constant coefficients: every row vanishes, any n.
    let theta = |_p: f64, _q: f64| 1.0;
    let b0 = |_p: f64, _q: f64| Complex64::new(1.0, 0.0);
    let b1 = |_p: f64, _q: f64| Complex64::new(0.3, -0.2);
    let b: Vec<&dyn Fn(f64, f64) -> Complex64> = vec![&b0, &b1];
    let res = cubic::systpde_residuals(&theta, &b, 0.4, 0.9, 1e-3);
    assert_eq!(res.len(), 3);
    for r in &res {
        assert!(r.norm() <= 1e-12);
    }
    // Perturbing a1 of a genuine family breaks the recurrence.
    let t = critical_t();
    let p = metric::build_psi(0.5 * t, (-8.0, 8.0)).unwrap();
    let surf = FamilySurface::new(&p, Family::A { c: 1.0 });
    let th = |q: f64, r: f64| metric::conformal_factor(&surf, q, r);
    let one = |_p: f64, _q: f64| Complex64::new(1.0, 0.0);
    let a1 = |q: f64, r: f64| {
        cubic::a1_eval(&surf, q, r).unwrap() + Complex64::new(0.01, 0.0)
    };
    let a1c = |q: f64, r: f64| cubic::a1_eval(&surf, q, r).unwrap().conj();
    let bs: Vec<&dyn Fn(f64, f64) -> Complex64> = vec![&one, &a1, &a1c, &one];
    let res = cubic::systpde_residuals(&th, &bs, 0.9, 0.4, 1e-3);
    let worst = res.iter().map(|r| r.norm()).fold(0.0, f64::max);
    assert!(worst >= 1e-3, "perturbed recurrence residual {worst}");
}

#[test]
fn polar_bound_diagnostic() {
    let t = critical_t();
    // Round case: bounded and decaying toward the poles.
    let p0 = metric::build_psi(0.0, (-12.0, 12.0)).unwrap();
    let rep = cubic::polar_integral_bound(&p0, &Family::A { c: 1.0 });
    assert!(rep.sup.is_finite() && rep.decreasing && !rep.degenerate, "{rep:?}");
    // Admissible family B at a generic parameter.
    let p = metric::build_psi(0.5 * t, (-12.0, 12.0)).unwrap();
    let pole = critical::PoleData::new(0.5 * t).unwrap();
    let bounds = metric::b_bounds(&p, &pole).unwrap();
    let rep = cubic::polar_integral_bound(&p, &Family::B { b: bounds.upper + 1.0 });
    assert!(rep.sup.is_finite() && rep.decreasing && !rep.degenerate, "{rep:?}");
    // The first family degenerates at the limiting parameter: xi'' has an
    // interior pole where psi' vanishes.
    let pc = metric::build_psi(t, (-12.0, 12.0)).unwrap();
    let rep = cubic::polar_integral_bound(&pc, &Family::A { c: 1.0 });
    assert!(rep.degenerate, "{rep:?}");
}
