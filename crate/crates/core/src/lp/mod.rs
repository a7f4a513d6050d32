//! Littlewood-Paley analysis: the dyadic partition, frequency blocks, the
//! norm zoo, and Bony paraproducts.

mod block;
mod norms;
mod paraproduct;
pub mod partition;


pub use block::{active_levels, block, low_cut};
pub use norms::{
    besov_norm, bmo_norm_approx, chemin_lerner_norm, d_norm, fourier_besov_norm, s_norm,
    sobolev_norm, xt_norm, xt_norm_parts, yt_norm, BallSampling, BesovKind,
    BlockSeriesAccumulator, BlockedNorm, NormSpec, QIndex, TimeNorm,
};
pub use paraproduct::{paraproduct, remainder};
