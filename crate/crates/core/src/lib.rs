//! Spectral toolkit for norm-inflation experiments on the viscous
//! Hamilton-Jacobi equation `u_t - Δu = |∇u|²` on a periodic torus.
//!
//! The crate is organized around band-limited fields represented by their
//! Fourier coefficients:
//!
//! - [`spectral`] — lattices, dense/sparse coefficient fields, multiplier
//!   actions, exact sparse convolution, pointwise maps, sup-norm evaluation.
//! - [`lp`] — the dyadic Littlewood-Paley partition, frequency blocks, the
//!   Besov / Fourier-Besov / Sobolev / Chemin-Lerner / BMO / parabolic
//!   cylinder norms, and Bony paraproducts.
//! - [`solver`] — three independent solvers for the equation (exponential
//!   Cole-Hopf oracle, ETD2RK mild stepper, Picard iterates with a
//!   closed-form second iterate) plus energy monitoring.
//! - [`construct`] — the two families of oscillatory initial data used in
//!   the inflation experiments, their time scales, index sets, and exact
//!   frequency-support certificates.
//! - [`experiment`] — sweep orchestration, inequality verifiers, scaling
//!   fits, and CSV/JSON reporting.

pub mod construct;
pub mod error;
pub mod experiment;
pub mod lp;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{FrequencyLattice, Mode, SpectralField};
