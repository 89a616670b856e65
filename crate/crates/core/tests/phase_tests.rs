//! Oracle tests for the reduced planar systems and the separatrix method.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use s2cubic::phase::{
    self, Branch, FpKind, PhasePoint,
};

#[test]
fn equilibria_annihilate_the_field() {
    for fp in phase::classify_fixed_points() {
        let (qd, pd) = phase::sms_rhs(&fp.location);
        assert!((qd * qd + pd * pd).sqrt() <= 1e-12, "{:?}", fp.location);
    }
}

#[test]
fn sms_rhs_known_values() {
    let (qd, pd) = phase::sms_rhs(&PhasePoint::new(0.0, -0.5));
    assert!(qd.abs() <= 1e-15 && pd.abs() <= 1e-15);
}

#[test]
fn syst1_rhs_examples() {
    // On the invariant parabola p = 1 - q^2 the quantity p + q^2 is
    // conserved: dp/dt = -2 q dq/dt.
    let (qd, pd) = phase::syst1_rhs(&PhasePoint::new(2.0, -3.0)).unwrap();
    assert!((qd - -3.0).abs() <= 1e-12);
    assert!((pd - 12.0).abs() <= 1e-12);
    assert!((pd + 2.0 * 2.0 * qd).abs() <= 1e-12);

    let (qd, pd) = phase::syst1_rhs(&PhasePoint::new(0.5, 0.0)).unwrap();
    assert!(qd.abs() <= 1e-15);
    assert!((pd - 2.625).abs() <= 1e-12);

    assert!(matches!(
        phase::syst1_rhs(&PhasePoint::new(0.0, 1.0)),
        Err(s2cubic::CoreError::SingularQ)
    ));
}

#[test]
fn classification_matches_numerical_jacobian() {
    let h = 1e-6;
    for fp in phase::classify_fixed_points() {
        // Finite-difference Jacobian of the regularized field.
        let at = |q: f64, p: f64| phase::sms_rhs(&PhasePoint::new(q, p));
        let (q0, p0) = (fp.location.q, fp.location.p);
        let col_q = {
            let (a, b) = (at(q0 + h, p0), at(q0 - h, p0));
            [(a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h)]
        };
        let col_p = {
            let (a, b) = (at(q0, p0 + h), at(q0, p0 - h));
            [(a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h)]
        };
        let jac = phase::sms_jacobian(&fp.location);
        assert!((jac[0][0] - col_q[0]).abs() <= 1e-6);
        assert!((jac[1][0] - col_q[1]).abs() <= 1e-6);
        assert!((jac[0][1] - col_p[0]).abs() <= 1e-6);
        assert!((jac[1][1] - col_p[1]).abs() <= 1e-6);
        // Eigen-pairs solve J v = lambda v.
        for (lam, v) in fp.eigenvalues.iter().zip(fp.eigenvectors.iter()) {
            let jv = [
                jac[0][0] * v[0] + jac[0][1] * v[1],
                jac[1][0] * v[0] + jac[1][1] * v[1],
            ];
            assert!((jv[0] - lam * v[0]).abs() <= 1e-10);
            assert!((jv[1] - lam * v[1]).abs() <= 1e-10);
        }
        // Saddle iff the eigenvalue product is negative.
        let prod = fp.eigenvalues[0] * fp.eigenvalues[1];
        assert_eq!(fp.kind == FpKind::Saddle, prod < 0.0);
    }
    // Known eigenvalues at (1, 0).
    let node = &phase::classify_fixed_points()[0];
    assert_eq!(node.location.q, 1.0);
    assert!((node.eigenvalues[0] - -2.0).abs() <= 1e-10);
    assert!((node.eigenvalues[1] - -4.0).abs() <= 1e-10);
}

#[test]
fn invariant_parabola() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..1000 {
        let q: f64 = rng.gen_range(-3.0..3.0);
        let p = 1.0 - q * q;
        let (qd, pd) = phase::sms_rhs(&PhasePoint::new(q, p));
        assert!((pd + 2.0 * q * qd).abs() <= 1e-12);
    }
}

#[test]
fn field_is_odd_under_reflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..200 {
        let q: f64 = rng.gen_range(0.2..3.0);
        let p: f64 = rng.gen_range(-3.0..3.0);
        let (qd, pd) = phase::syst1_rhs(&PhasePoint::new(q, p)).unwrap();
        let (qdr, pdr) = phase::syst1_rhs(&PhasePoint::new(-q, p)).unwrap();
        assert!((qdr - qd).abs() <= 1e-12);
        assert!((pdr + pd).abs() <= 1e-12);
    }
}

#[test]
fn unstable_branch_of_upper_saddle_flows_to_the_node() {
    let saddles = phase::classify_fixed_points();
    let saddle = saddles.iter().find(|f| f.location.p == 1.0).unwrap();
    let curve =
        phase::trace_separatrix(saddle, Branch::UnstablePos, 50.0, phase::SEED_DELTA).unwrap();
    let last = curve.last().unwrap();
    let d = ((last.q - 1.0).powi(2) + last.p.powi(2)).sqrt();
    assert!(d <= 1e-6, "terminal point ({}, {})", last.q, last.p);
}

#[test]
fn lower_saddle_separatrix_stays_below_the_parabola() {
    let saddles = phase::classify_fixed_points();
    let saddle = saddles.iter().find(|f| f.location.p == -0.5).unwrap();
    let curve = phase::trace_separatrix(saddle, Branch::StablePos, 50.0, phase::SEED_DELTA).unwrap();
    assert!(curve.last().unwrap().q >= 49.0);
    for pt in &curve {
        assert!(pt.p < 1.0 - pt.q * pt.q, "point ({}, {})", pt.q, pt.p);
    }
}

#[test]
fn wrong_quadrant_request_escapes() {
    let saddles = phase::classify_fixed_points();
    let saddle = saddles.iter().find(|f| f.location.p == -0.5).unwrap();
    let err =
        phase::trace_separatrix(saddle, Branch::StableNeg, 50.0, phase::SEED_DELTA).unwrap_err();
    assert!(matches!(err, s2cubic::CoreError::ManifoldEscape { .. }));
}

#[test]
fn seeding_offset_convergence() {
    // Halving the seed offset does not move the extrapolated limit.
    let saddles = phase::classify_fixed_points();
    let saddle = saddles.iter().find(|f| f.location.p == -0.5).unwrap();
    let limit = |delta: f64| {
        let curve = phase::trace_separatrix(saddle, Branch::StablePos, 40.0, delta).unwrap();
        let h: Vec<(f64, f64)> =
            curve.iter().map(|pt| (pt.q, -(pt.p + pt.q * pt.q) / pt.q)).collect();
        phase::fit_inverse_q(&h, (20.0, 40.0)).unwrap().0
    };
    assert!((limit(1e-7) - limit(5e-8)).abs() <= 1e-6);
}

#[test]
fn separatrix_limit_on_the_parabola_is_zero() {
    // h(q) = -(p + q^2)/q = -1/q on the invariant parabola; the fit model
    // is exact there.
    let curve: Vec<(f64, f64)> =
        (0..200).map(|k| 20.0 + 0.15 * k as f64).map(|q| (q, 1.0 / q * -1.0)).collect();
    let (limit, residual) = phase::fit_inverse_q(&curve, (25.0, 50.0)).unwrap();
    assert!(limit.abs() <= 1e-12);
    assert!(residual <= 1e-12);
}

#[test]
fn separatrix_estimate_agrees_with_bisection() {
    let sep = phase::estimate_t_from_separatrix(60.0, None).unwrap();
    let bis = s2cubic::critical::find_t_bisection(1e-8).unwrap();
    assert!(
        (sep.t - bis.t).abs() <= 1e-4,
        "separatrix {} vs bisection {}",
        sep.t,
        bis.t
    );
}

#[test]
fn too_small_window_is_rejected() {
    assert!(matches!(
        phase::estimate_t_from_separatrix(5.0, None),
        Err(s2cubic::CoreError::PoorConvergence { .. })
    ));
}

#[test]
fn tau_from_orbit_on_parabola_and_separatrix() {
    let parabola: Vec<PhasePoint> =
        (0..200).map(|k| 5.0 + 0.25 * k as f64).map(|q| PhasePoint::new(q, 1.0 - q * q)).collect();
    let (tau, _) = phase::tau_from_orbit(&parabola).unwrap();
    assert!(tau.abs() <= 1e-10);

    let saddles = phase::classify_fixed_points();
    let saddle = saddles.iter().find(|f| f.location.p == -0.5).unwrap();
    let curve = phase::trace_separatrix(saddle, Branch::StablePos, 60.0, phase::SEED_DELTA).unwrap();
    let (tau, _) = phase::tau_from_orbit(&curve).unwrap();
    let t = s2cubic::critical::t_fixture();
    assert!((tau + t).abs() <= 1e-3, "separatrix tau {tau} vs -T {}", -t);
}

#[test]
fn tau_from_ivp_orbit_matches_parameter() {
    // Large q sits at small positive t (q ~ 1/t as t -> 0+).
    let spec = s2cubic::ode::IvpSpec::new(0.05, (0.0, 25.0));
    let traj = s2cubic::ode::integrate_ivp(&spec).unwrap();
    let mut curve = Vec::new();
    for k in 0..=2000 {
        let t = 0.02 * (5.0f64 / 0.02).powf(k as f64 / 2000.0);
        let j = traj.eval(t).unwrap();
        let q = j.x1 / j.x;
        curve.push(PhasePoint::new(q, j.x2 / j.x - q * q));
    }
    let (tau, _) = phase::tau_from_orbit(&curve).unwrap();
    assert!((tau - 0.05).abs() <= 1e-3, "extrapolated tau {tau}");
}

#[test]
fn ivp_orbits_land_on_planar_orbits() {
    // The log reduction of the time-domain solution and the planar flow
    // describe the same curves: compare p at equal q.
    for tau in [0.02, 0.1] {
        let spec = s2cubic::ode::IvpSpec::new(tau, (0.0, 20.0));
        let traj = s2cubic::ode::integrate_ivp(&spec).unwrap();
        // q decreases with t (from ~1/t toward the node at q = 1).
        let reduced_at = |t: f64| {
            let j = traj.eval(t).unwrap();
            let q = j.x1 / j.x;
            (q, j.x2 / j.x - q * q)
        };
        let (q0, p0) = reduced_at(0.05);
        for target in [2.0, 5.0, 10.0] {
            // Bisection in t for q(t) = target.
            let (mut lo, mut hi) = (0.05f64, 10.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if reduced_at(mid).0 > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let expect = reduced_at(0.5 * (lo + hi)).1;
            // Integrate the planar field from the first reduced point to
            // the same q.
            let f = |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| -> Result<(), s2cubic::CoreError> {
                let (qd, pd) = phase::sms_rhs(&PhasePoint::new(y[0], y[1]));
                dy[0] = qd;
                dy[1] = pd;
                Ok(())
            };
            let ctrl = s2cubic::dopri5::Controller {
                rtol: 1e-12,
                atol: 1e-14,
                max_step: f64::INFINITY,
                event_tol: 1e-12,
            };
            let mut events = vec![s2cubic::dopri5::Event {
                g: Box::new(move |_t, y: &[f64; 2]| y[0] - target),
                direction: s2cubic::dopri5::EventDir::Down,
                terminal: true,
            }];
            let sol =
                s2cubic::dopri5::integrate(&f, 0.0, [q0, p0], 100.0, &ctrl, &mut events).unwrap();
            assert!(matches!(sol.status, s2cubic::dopri5::Status::EventStop(0)));
            let p_plane = sol.y_end()[1];
            assert!(
                (p_plane - expect).abs() <= 1e-6,
                "tau={tau}, q={target}: planar {p_plane} vs reduced {expect}"
            );
        }
    }
}

#[test]
fn orbit_ordering_is_monotone_in_tau() {
    let p_at = |tau: f64, target: f64| {
        let spec = s2cubic::ode::IvpSpec::new(tau, (0.0, 20.0));
        let traj = s2cubic::ode::integrate_ivp(&spec).unwrap();
        let reduced_at = |t: f64| {
            let j = traj.eval(t).unwrap();
            let q = j.x1 / j.x;
            (q, j.x2 / j.x - q * q)
        };
        let (mut lo, mut hi) = (0.05f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reduced_at(mid).0 > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        reduced_at(0.5 * (lo + hi)).1
    };
    for q in [3.0, 6.0] {
        assert!(p_at(0.1, q) > p_at(0.02, q));
    }
}
