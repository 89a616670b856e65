pub mod build_metric;
pub mod find_t;
pub mod gc_match;
pub mod phase;
pub mod solve_psi;
pub mod sweep;
pub mod verify;
