use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Discrete frequency lattice standing in for continuum frequencies.
///
/// Frequencies are `ξ = k/L` for integer vectors `k` with `|k_i| ≤ K`.
/// The physical domain is the torus of period `2πL` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyLattice {
    dim: usize,
    inverse_spacing: i64,
    band_limit: i64,
}

impl FrequencyLattice {
    pub fn new(dim: usize, inverse_spacing: i64, band_limit: i64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidLattice(format!("d = {dim} not in 1..=3")));
        }
        if inverse_spacing < 1 {
            return Err(Error::InvalidLattice(format!(
                "inverse spacing L = {inverse_spacing} must be >= 1"
            )));
        }
        if band_limit < 1 {
            return Err(Error::InvalidLattice(format!(
                "band limit K = {band_limit} must be >= 1"
            )));
        }
        Ok(Self { dim, inverse_spacing, band_limit })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `L`: frequencies are spaced `1/L` apart.
    pub fn inverse_spacing(&self) -> i64 {
        self.inverse_spacing
    }

    /// Max representable `|k_i|` per axis.
    pub fn band_limit(&self) -> i64 {
        self.band_limit
    }

    /// Spatial period per axis, `2πL`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.inverse_spacing as f64
    }

    /// Same lattice with a different band limit.
    pub fn with_band_limit(&self, band_limit: i64) -> Result<Self> {
        Self::new(self.dim, self.inverse_spacing, band_limit)
    }

    /// Physical frequency of a lattice mode, `ξ = k/L`.
    pub fn freq(&self, k: [i64; 3]) -> [f64; 3] {
        let l = self.inverse_spacing as f64;
        [k[0] as f64 / l, k[1] as f64 / l, k[2] as f64 / l]
    }

    /// `|ξ|²` for a lattice mode.
    pub fn freq_norm_sq(&self, k: [i64; 3]) -> f64 {
        let xi = self.freq(k);
        xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
    }

    /// `|ξ|` for a lattice mode.
    pub fn freq_norm(&self, k: [i64; 3]) -> f64 {
        self.freq_norm_sq(k).sqrt()
    }

    pub fn contains(&self, k: [i64; 3]) -> bool {
        k.iter().all(|&ki| ki.abs() <= self.band_limit)
    }

    /// Weight of one lattice cell in frequency integrals, `L^{-d}`.
    pub fn cell_weight(&self) -> f64 {
        (self.inverse_spacing as f64).powi(-(self.dim as i32))
    }
}
