//! Three independent routes to the solution of `u_t - Δu = |∇u|²`:
//! the exponential-substitution oracle, a two-stage exponential integrator
//! for the mild formulation, and the Picard iterates with a closed-form
//! second iterate on sparse data.

mod a2;
mod cole_hopf;
mod config;
mod mild;
mod monitor;
mod nonlin;
mod picard;

#[cfg(test)]
mod tests;

pub use a2::a2_exact;
pub use cole_hopf::{
    cole_hopf_snapshots_lowband, cole_hopf_solve, heat_image_lowband, HeatImage,
};
pub use config::{gauss_legendre, log_spaced, SolverConfig};
pub use mild::mild_solve;
pub use monitor::{grad_sup, hs_energy_monitor, MonitorReport, MonitorRow};
pub use nonlin::{grad_dot, grad_square_sum};
pub use picard::{duhamel_integral, picard_a, PicardSeries};
