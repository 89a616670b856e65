//! Integrable conservative systems on the two-sphere with cubic integrals.
//!
//! The library is organized around a third-order nonlinear ODE,
//! x' x''' = x x'' - 2 x''^2 + x'^2 + x^2,
//! whose globally positive solutions generate conformal metrics on S^2
//! carrying conservative systems with an integral cubic in momenta.
//!
//! Modules:
//! - [`dopri5`]: an explicit Runge–Kutta integrator with dense output and
//!   event location.
//! - [`ode`]: the third-order initial value problem and its trajectories.
//! - [`phase`]: the reduced planar systems, equilibrium classification,
//!   separatrix tracing, and the separatrix-limit estimate of the critical
//!   constant.
//! - [`critical`]: the bisection computation of the critical constant, the
//!   symmetric critical profile, the compactified s-chart equation, and the
//!   pole-side functions.
//! - [`metric`]: the profile psi, the two constructed families, conformal
//!   factors, parameter bounds, polar charts, and pole smoothness.
//! - [`cubic`]: the cubic integral, Poisson-bracket and conservation
//!   checks, and the integrability PDE in real and complex form.
//! - [`gc`]: the rigid-body profile and the Hamiltonian-equivalence fit.

pub mod critical;
pub mod cubic;
pub mod dopri5;
pub mod error;
pub mod gc;
pub mod metric;
pub mod ode;
pub mod phase;
pub mod util;

pub use error::{CoreError, Result};
