use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("negative time {0} rejected")]
    NegativeTime(f64),

    #[error("band overflow: mode {mode:?} exceeds band limit {limit}")]
    BandOverflow { mode: [i64; 3], limit: i64 },

    #[error("dense representation required")]
    DenseRequired,

    #[error("sparse representation required")]
    SparseRequired,

    #[error("nonpositive sample {value:.3e} under log at grid index {index}")]
    NonpositiveSample { value: f64, index: usize },

    #[error("overflow guard: sup-norm {sup:.3e} exceeds limit {limit:.3e} under exp")]
    ExpOverflow { sup: f64, limit: f64 },

    #[error("truncation energy {energy:.3e} above tolerance {tol:.3e} (grid {grid})")]
    TruncationEnergy { energy: f64, tol: f64, grid: usize },

    #[error("quadrature did not converge: relative change {change:.3e} after {doublings} doublings")]
    QuadratureDivergence { change: f64, doublings: usize },

    #[error("snapshot times must be ascending and within [0, T]")]
    BadSnapshotTimes,

    #[error("empty snapshot list")]
    EmptySnapshots,

    #[error("nonpositive heat image (min sample {0:.3e}); spectral truncation failed")]
    HeatImageNotPositive(f64),

    #[error("invalid parameter {key}: {message}")]
    InvalidParameter { key: String, message: String },

    #[error("fit requires at least {need} points, got {got}")]
    FitUnderdetermined { need: usize, got: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
