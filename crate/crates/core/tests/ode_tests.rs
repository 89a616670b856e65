//! Oracle tests for the third-order equation and its initial value problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use s2cubic::ode::{self, IvpSpec, JetState, Termination};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0001)
}

#[test]
fn rhs_matches_exact_solution_jets() {
    // x = exp t at t = 0.
    let x3 = ode::rhs_third_order(&JetState::new(0.0, 1.0, 1.0, 1.0)).unwrap();
    assert!((x3 - 1.0).abs() <= 1e-12);
    // x = cosh t at t = 1 (t = 0 sits on the singular guard).
    let t = 1.0f64;
    let x3 = ode::rhs_third_order(&JetState::new(t, t.cosh(), t.sinh(), t.cosh())).unwrap();
    assert!((x3 - t.sinh()).abs() <= 1e-12);
    // x = sinh t at t = 0.
    let x3 = ode::rhs_third_order(&JetState::new(0.0, 0.0, 1.0, 0.0)).unwrap();
    assert!((x3 - 1.0).abs() <= 1e-12);
}

#[test]
fn rhs_rejects_singular_derivative() {
    let err = ode::rhs_third_order(&JetState::new(0.0, 1.0, 1e-11, 1.0)).unwrap_err();
    assert!(matches!(err, s2cubic::CoreError::SingularDerivative { .. }));
}

#[test]
fn exact_solutions_satisfy_equation_at_random_times() {
    let mut rng = rng();
    let cases: [(&str, fn(f64) -> [f64; 4]); 3] = [
        ("exp", |t| [t.exp(), t.exp(), t.exp(), t.exp()]),
        ("cosh", |t| [t.cosh(), t.sinh(), t.cosh(), t.sinh()]),
        ("sinh", |t| [t.sinh(), t.cosh(), t.sinh(), t.cosh()]),
    ];
    for (name, jet) in cases {
        let mut n = 0;
        while n < 100 {
            let t: f64 = rng.gen_range(-3.0..3.0);
            let [x, x1, x2, x3] = jet(t);
            if x1.abs() < 1e-6 {
                continue;
            }
            n += 1;
            let rhs = ode::rhs_third_order(&JetState::new(t, x, x1, x2)).unwrap();
            let rel = (rhs - x3).abs() / x3.abs().max(1.0);
            assert!(rel <= 1e-12, "{name} at t={t}: relative residual {rel}");
        }
    }
}

#[test]
fn rhs_is_scaling_covariant() {
    let mut rng = rng();
    for _ in 0..50 {
        let t: f64 = rng.gen_range(-2.0..2.0);
        let x: f64 = rng.gen_range(-2.0..2.0);
        let x1: f64 = rng.gen_range(0.5..2.0);
        let x2: f64 = rng.gen_range(-2.0..2.0);
        let base = ode::rhs_third_order(&JetState::new(t, x, x1, x2)).unwrap();
        for alpha in [2.0, -3.0, 0.5] {
            let scaled =
                ode::rhs_third_order(&JetState::new(t, alpha * x, alpha * x1, alpha * x2)).unwrap();
            assert!((scaled - alpha * base).abs() <= 1e-10 * base.abs().max(1.0));
        }
    }
}

#[test]
fn tau_zero_is_sinh() {
    let traj = ode::integrate_ivp(&IvpSpec::new(0.0, (-5.0, 5.0))).unwrap();
    assert_eq!(traj.termination, Termination::Completed);
    let mut worst: f64 = 0.0;
    for k in 0..=200 {
        let t = -5.0 + 10.0 * k as f64 / 200.0;
        let j = traj.eval(t).unwrap();
        worst = worst.max((j.x - t.sinh()).abs());
    }
    assert!(worst <= 1e-8, "max |x - sinh| = {worst}");
}

#[test]
fn small_positive_tau_completes_with_positive_derivative() {
    let traj = ode::integrate_ivp(&IvpSpec::new(0.01, (0.0, 30.0))).unwrap();
    assert_eq!(traj.termination, Termination::Completed);
    for n in traj.nodes() {
        assert!(n.x1 > 0.0, "x' <= 0 at t = {}", n.t);
    }
}

#[test]
fn beyond_critical_value_fails_in_finite_time() {
    let t = s2cubic::critical::t_fixture();
    let traj = ode::integrate_ivp(&IvpSpec::new(t + 0.05, (-40.0, 40.0))).unwrap();
    assert!(
        matches!(traj.termination, Termination::DerivativeZero { .. } | Termination::Blowup { .. }),
        "termination = {:?}",
        traj.termination
    );
}

#[test]
fn reflection_symmetry() {
    // x_tau(t) = -x_{-tau}(-t).
    let plus = ode::integrate_ivp(&IvpSpec::new(0.2, (-3.0, 3.0))).unwrap();
    let minus = ode::integrate_ivp(&IvpSpec::new(-0.2, (-3.0, 3.0))).unwrap();
    for k in 0..=60 {
        let t = -3.0 + 6.0 * k as f64 / 60.0;
        let a = plus.eval(t).unwrap();
        let b = minus.eval(-t).unwrap();
        assert!((a.x + b.x).abs() <= 1e-9, "t={t}: {} vs {}", a.x, -b.x);
    }
}

#[test]
fn time_translation_invariance() {
    let traj = ode::integrate_ivp(&IvpSpec::new(0.3, (0.0, 6.0))).unwrap();
    let mid = traj.eval(2.0).unwrap();
    // Restart from the mid-trajectory jet and compare the tails.
    let ctrl = s2cubic::dopri5::Controller {
        rtol: 1e-12,
        atol: 1e-14,
        max_step: 0.5,
        event_tol: 1e-12,
    };
    let sol = s2cubic::dopri5::integrate(
        &ode::jet_system,
        2.0,
        [mid.x, mid.x1, mid.x2],
        6.0,
        &ctrl,
        &mut [],
    )
    .unwrap();
    for k in 0..=40 {
        let t = 2.0 + 4.0 * k as f64 / 40.0;
        let a = traj.eval(t).unwrap();
        let b = sol.eval(t).unwrap();
        let scale = a.x.abs().max(1.0);
        assert!((a.x - b[0]).abs() <= 1e-8 * scale);
    }
}

#[test]
fn log_reduction_of_sinh_lies_on_the_parabola() {
    let traj = ode::integrate_ivp(&IvpSpec::new(0.0, (-1.0, 6.0))).unwrap();
    let pts = ode::log_reduction(&traj, 0.1, 6.0).unwrap();
    assert!(pts.len() > 10);
    for (t, q, p) in pts {
        assert!((p + q * q - 1.0).abs() <= 1e-9, "t={t}: parabola residual");
    }
}

#[test]
fn log_reduction_rejects_nonpositive_x() {
    let traj = ode::integrate_ivp(&IvpSpec::new(0.0, (-2.0, 2.0))).unwrap();
    let err = ode::log_reduction(&traj, -2.0, 2.0).unwrap_err();
    assert!(matches!(err, s2cubic::CoreError::NonPositiveX { .. }));
}

#[test]
fn invalid_spec_is_rejected() {
    let mut spec = IvpSpec::new(0.0, (1.0, 2.0));
    assert!(ode::integrate_ivp(&spec).is_err());
    spec = IvpSpec::new(0.0, (-1.0, 1.0));
    spec.rel_tol = -1.0;
    assert!(ode::integrate_ivp(&spec).is_err());
}

#[test]
fn interpolated_residual_is_small() {
    let traj = ode::integrate_ivp(&IvpSpec::new(0.25, (-2.0, 4.0))).unwrap();
    let mut rng = rng();
    for _ in 0..100 {
        let t: f64 = rng.gen_range(-1.5..3.5);
        let j = traj.eval(t).unwrap();
        if j.x1.abs() < 1e-6 {
            continue;
        }
        let x3 = ode::rhs_third_order(&j).unwrap();
        // Compare against a finite-difference third derivative of the
        // dense output.
        let h = 1e-3;
        let xm2 = traj.eval(t - 2.0 * h).unwrap().x;
        let xm1 = traj.eval(t - h).unwrap().x;
        let xp1 = traj.eval(t + h).unwrap().x;
        let xp2 = traj.eval(t + 2.0 * h).unwrap().x;
        let fd3 = (xp2 - 2.0 * xp1 + 2.0 * xm1 - xm2) / (2.0 * h * h * h);
        assert!((x3 - fd3).abs() <= 1e-4 * x3.abs().max(1.0), "t={t}");
    }
}
