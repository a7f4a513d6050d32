use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::spectral::{
    dft_inplace, heat_propagate, pointwise_map, FrequencyLattice, PointwiseFn, PointwiseOptions,
    SpectralField,
};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Exact solution of `u_t - Δu = |∇u|²` through the substitution `w = e^u`,
/// which turns the equation into the heat equation: returns
/// `log(e^{tΔ} e^{u0})` up to spectral truncation. This is the ground-truth
/// oracle against which the mild stepper and the Picard series are checked.
pub fn cole_hopf_solve(u0: &SpectralField, t: f64, cfg: &SolverConfig) -> Result<SpectralField> {
    if !u0.is_dense() {
        return Err(Error::DenseRequired);
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let opts = PointwiseOptions {
        trunc_tol: cfg.trunc_tol,
        exp_guard: cfg.exp_guard,
        ..Default::default()
    };
    let (w0, _) = pointwise_map(u0, PointwiseFn::Exp, &opts)?;
    let wt = heat_propagate(&w0, t)?;
    let (ut, _) = pointwise_map(&wt, PointwiseFn::Log, &opts).map_err(|e| match e {
        Error::NonpositiveSample { value, .. } => Error::HeatImageNotPositive(value),
        other => other,
    })?;
    ut.truncated(u0.band())
}

/// Spectrum of `e^{u0}` on a kept low band, for sparse high-frequency data
/// too wide to exponentiate densely (one-dimensional fields).
///
/// `e^{u0}` is sampled on an `M`-point grid in decimated segments
/// (`u0` evaluated by phasor rotation, exponentiated, FFT'd per segment),
/// and only coefficients `|k| ≤ b0` are assembled:
/// `c_k = (1/M) Σ_r e^{-2πikr/M}·X_r[k mod M/S]`. The grid doubles until
/// two successive passes agree on the kept band, which bounds the
/// fold-in aliasing error.
pub struct HeatImage {
    lattice: FrequencyLattice,
    /// Coefficients of `e^{u0}` for `k ∈ [-b0, b0]`.
    coeffs: Vec<Complex64>,
    b0: i64,
    /// Grid that passed verification.
    pub grid: usize,
    /// Relative ℓ² disagreement between the last two grids.
    pub verify_rel: f64,
}

const SEG_LEN: usize = 1 << 20;

pub fn heat_image_lowband(u0: &SpectralField, b0: i64, cfg: &SolverConfig) -> Result<HeatImage> {
    if u0.dim() != 1 {
        return Err(Error::InvalidParameter {
            key: "d".into(),
            message: "the low-band fast path is one-dimensional".into(),
        });
    }
    if !u0.is_sparse() {
        return Err(Error::SparseRequired);
    }
    let sup = crate::spectral::sup_norm(u0);
    if sup > cfg.exp_guard {
        return Err(Error::ExpOverflow { sup, limit: cfg.exp_guard });
    }
    let kmax = u0.support_extent()[0].max(1);
    let mut m = (8 * (kmax as usize + 1)).next_power_of_two().max(4 * (b0 as usize + 1));
    let mut prev = exp_spectrum_pruned(u0, b0, m);
    for _ in 0..3 {
        let fine = exp_spectrum_pruned(u0, b0, 2 * m);
        let rel = rel_l2(&fine, &prev);
        if rel <= cfg.trunc_tol.max(1e-9) {
            return Ok(HeatImage {
                lattice: *u0.lattice(),
                coeffs: fine,
                b0,
                grid: 2 * m,
                verify_rel: rel,
            });
        }
        prev = fine;
        m *= 2;
    }
    Err(Error::TruncationEnergy { energy: f64::NAN, tol: cfg.trunc_tol, grid: m })
}

impl HeatImage {
    /// `u(t) = log(e^{tΔ}e^{u0})`, assembled from the kept band. The output
    /// band adapts to the heat decay at time `t` (everything the multiplier
    /// has not kept above `trunc_tol`), capped by the image band.
    pub fn solution_at(&self, t: f64, cfg: &SolverConfig) -> Result<SpectralField> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let band = self.band_at(t);
        let l = self.lattice.inverse_spacing() as f64;
        let n = (2 * band + 1) as usize;
        let mut coeffs = vec![Complex64::ZERO; n];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            let k = i as i64 - band;
            let xi = k as f64 / l;
            *slot = self.coeff(k) * (-t * xi * xi).exp();
        }
        let lattice = self.lattice.with_band_limit(self.lattice.band_limit().max(band))?;
        let wt = SpectralField::from_dense_parts(lattice, band, coeffs, true)?;
        let opts = PointwiseOptions {
            trunc_tol: cfg.trunc_tol,
            exp_guard: cfg.exp_guard,
            ..Default::default()
        };
        let (ut, _) = pointwise_map(&wt, PointwiseFn::Log, &opts).map_err(|e| match e {
            Error::NonpositiveSample { value, .. } => Error::HeatImageNotPositive(value),
            other => other,
        })?;
        ut.truncated(band)
    }

    fn coeff(&self, k: i64) -> Complex64 {
        let idx = k + self.b0;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Complex64::ZERO
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Band where `e^{-t|ξ|²}` still exceeds the double-precision floor,
    /// capped by the image band.
    pub fn band_at(&self, t: f64) -> i64 {
        if t <= 0.0 {
            return self.b0;
        }
        let l = self.lattice.inverse_spacing() as f64;
        let cut = (45.0 / t).sqrt() * l;
        ((cut.ceil() as i64) + 8).min(self.b0).max(8)
    }
}

/// Cole-Hopf snapshots for sparse one-dimensional data: the expensive
/// exponential transform happens once, each snapshot is a cheap heat
/// multiplier plus a small logarithm.
pub fn cole_hopf_snapshots_lowband(
    u0: &SpectralField,
    times: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<(f64, SpectralField)>> {
    let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
    if !(t_min > 0.0) {
        return Err(Error::BadSnapshotTimes);
    }
    let l = u0.lattice().inverse_spacing() as f64;
    let kmax = u0.support_extent()[0].max(1);
    let b0 = (((45.0 / t_min).sqrt() * l).ceil() as i64 + 8).min(4 * kmax);
    let image = heat_image_lowband(u0, b0, cfg)?;
    times
        .iter()
        .map(|&t| Ok((t, image.solution_at(t, cfg)?)))
        .collect()
}

/// Pruned forward transform: coefficients of `e^{u0}` for `|k| ≤ b0` from an
/// `M`-point sampling, built in segments of at most `SEG_LEN` points.
fn exp_spectrum_pruned(u0: &SpectralField, b0: i64, m: usize) -> Vec<Complex64> {
    let entries: Vec<(i64, Complex64)> = u0.iter_coeffs().map(|(k, c)| (k.0[0], c)).collect();
    let seg_len = SEG_LEN.min(m);
    let segments = m / seg_len;
    let n_out = (2 * b0 + 1) as usize;
    let mut out = vec![Complex64::ZERO; n_out];
    let mut buf = vec![Complex64::ZERO; seg_len];
    for r in 0..segments {
        // Samples u0(x) on the subgrid m' ↦ r + S·m', then e^{u0}.
        buf.par_chunks_mut(1 << 14).enumerate().for_each(|(chunk_idx, chunk)| {
            let base = chunk_idx << 14;
            chunk.fill(Complex64::ZERO);
            for &(k, c) in &entries {
                let step = rotor(k, segments as i64, m);
                let mut z = rotor(k, (r + segments * base) as i64, m);
                for (i, slot) in chunk.iter_mut().enumerate() {
                    if i % 256 == 0 && i > 0 {
                        z = rotor(k, (r + segments * (base + i)) as i64, m);
                    }
                    *slot += c * z;
                    z *= step;
                }
            }
            for slot in chunk.iter_mut() {
                *slot = Complex64::new(slot.re.exp(), 0.0);
            }
        });
        dft_inplace(&mut buf, false);
        for (i, slot) in out.iter_mut().enumerate() {
            let k = i as i64 - b0;
            let folded = k.rem_euclid(seg_len as i64) as usize;
            *slot += buf[folded] * rotor(k, -(r as i64), m);
        }
    }
    let scale = 1.0 / m as f64;
    out.iter_mut().for_each(|c| *c *= scale);
    out
}

fn rotor(k: i64, step: i64, modulus: usize) -> Complex64 {
    let md = modulus as i128;
    let prod = (k as i128 * step as i128).rem_euclid(md);
    let phase = TAU * prod as f64 / modulus as f64;
    Complex64::new(phase.cos(), phase.sin())
}

fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    if norm == 0.0 {
        0.0
    } else {
        (diff / norm).sqrt()
    }
}
