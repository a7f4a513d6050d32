//! Band-limited functions on a periodic torus, represented by Fourier
//! coefficients in dense or sparse form.
//!
//! Conventions used throughout the crate:
//!
//! - The torus has period `2πL` per axis; admissible frequencies are
//!   `ξ = k/L` for integer vectors `k` with `|k_i| ≤ K`.
//! - A field is `u(x) = Σ_k c_k e^{i(k/L)·x}`.
//! - Continuous `L¹`-in-frequency integrals are approximated by lattice
//!   sums weighted by `L^{-d}`.

mod eval;
mod fft;
mod field;
mod io;
mod lattice;
mod ops;


pub use eval::{
    eval_at_point, grid_max_imag, grid_sup, samples_on_grid, sup_on_grid_direct, sup_on_grid_fft,
    EvalPath,
};
pub use field::{Mode, Repr, SpectralField};
pub use io::{
    parse_coefficient_dump, parse_snapshot_dump, write_coefficient_dump, write_snapshot_dump,
};
pub use lattice::FrequencyLattice;
pub use ops::{
    heat_propagate, partial_derivative, pointwise_map, sparse_convolve, sup_norm,
    sup_norm_oversampled, PointwiseFn, PointwiseOptions, PointwiseReport,
};

pub(crate) use fft::dft_inplace;
pub(crate) use ops::{forward_to_dense, grid_dims};
