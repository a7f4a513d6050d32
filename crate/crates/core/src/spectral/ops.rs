use super::eval::{grid_sup, oversampled_grid, samples_on_grid};
use super::fft::nd_transform;
use super::field::{dense_index, dense_len, Mode, SpectralField};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// `e^{tΔ}f`: multiply each coefficient by `e^{-t|ξ|²}`.
pub fn heat_propagate(f: &SpectralField, t: f64) -> Result<SpectralField> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.apply_multiplier(|xi| {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        (-t * r2).exp()
    }))
}

/// `∂_{x_axis} f`: multiply by `i·ξ_axis`. Axis is zero-based.
pub fn partial_derivative(f: &SpectralField, axis: usize) -> Result<SpectralField> {
    let dim = f.dim();
    if axis >= dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    Ok(f.apply_multiplier_complex(|xi| Complex64::new(0.0, xi[axis]), true))
}

/// Exact coefficient convolution of two sparse fields:
/// `(a*b)_k = Σ_m a_m b_{k-m}`. The output key set is exactly the sumset of
/// the two supports, including keys whose value cancels to zero.
pub fn sparse_convolve(
    a: &SpectralField,
    b: &SpectralField,
    auto_extend: bool,
) -> Result<SpectralField> {
    if a.is_dense() || b.is_dense() {
        return Err(Error::SparseRequired);
    }
    compatible(a, b)?;
    let needed = a.band() + b.band();
    let lattice = if needed > a.lattice().band_limit() {
        if !auto_extend {
            return Err(Error::BandOverflow { mode: [needed, 0, 0], limit: a.lattice().band_limit() });
        }
        a.lattice().with_band_limit(needed)?
    } else {
        *a.lattice()
    };
    let mut map: BTreeMap<Mode, Complex64> = BTreeMap::new();
    for (ka, ca) in a.iter_coeffs() {
        for (kb, cb) in b.iter_coeffs() {
            *map.entry(ka.add(&kb)).or_insert(Complex64::ZERO) += ca * cb;
        }
    }
    SpectralField::from_sorted_sparse(lattice, map.into_iter().collect(), a.is_real() && b.is_real())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseFn {
    Exp,
    Log,
    Square,
}

#[derive(Debug, Clone)]
pub struct PointwiseOptions {
    /// Relative spectral-tail tolerance (energy in the outer half of the
    /// grid band, which bounds what truncation to the grid discards).
    pub trunc_tol: f64,
    /// Sup-norm guard for `Exp`.
    pub exp_guard: f64,
    /// Grid doublings allowed before reporting failure.
    pub max_doublings: usize,
    /// Starting grid is at least this (per axis) and at least `3K`.
    pub min_grid: usize,
}

impl Default for PointwiseOptions {
    fn default() -> Self {
        Self { trunc_tol: 1e-10, exp_guard: 30.0, max_doublings: 6, min_grid: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct PointwiseReport {
    /// Grid actually used (per axis).
    pub grid: usize,
    /// Relative energy in the outer half of the grid band.
    pub trunc_energy_rel: f64,
}

/// Apply `exp`, `log`, or squaring on a dealiased spatial grid and transform
/// back. The output carries the full grid band `M/2 - 1`; callers truncate
/// further as needed. The grid starts at `max(3K, min_grid)` per axis
/// (`Square` gets the exact-product size `2·(2K)+2`) and doubles until the
/// spectral tail passes `trunc_tol`.
pub fn pointwise_map(
    f: &SpectralField,
    func: PointwiseFn,
    opts: &PointwiseOptions,
) -> Result<(SpectralField, PointwiseReport)> {
    if !f.is_dense() {
        return Err(Error::DenseRequired);
    }
    let dim = f.dim();
    let k_in = f.band().max(1) as usize;
    let base = match func {
        PointwiseFn::Square => 4 * k_in + 2,
        _ => (3 * k_in).max(opts.min_grid),
    };
    let mut m = base.next_power_of_two().max(opts.min_grid.next_power_of_two());

    if func == PointwiseFn::Exp {
        let sup = sup_norm(f);
        if sup > opts.exp_guard {
            return Err(Error::ExpOverflow { sup, limit: opts.exp_guard });
        }
    }

    for attempt in 0..=opts.max_doublings {
        let dims = grid_dims(dim, m);
        let mut buf = samples_on_grid(f, dims);
        for (i, z) in buf.iter_mut().enumerate() {
            *z = match func {
                PointwiseFn::Exp => z.exp(),
                PointwiseFn::Square => *z * *z,
                PointwiseFn::Log => {
                    if z.re <= 0.0 {
                        return Err(Error::NonpositiveSample { value: z.re, index: i });
                    }
                    z.ln()
                }
            };
        }
        let dims_v: Vec<usize> = dims[..dim].to_vec();
        nd_transform(&mut buf, &dims_v, false);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);

        let (field, tail) = extract_dense(f, &buf, &dims_v, m)?;
        let report = PointwiseReport { grid: m, trunc_energy_rel: tail };
        if tail <= opts.trunc_tol || func == PointwiseFn::Square {
            return Ok((field, report));
        }
        if attempt == opts.max_doublings {
            return Err(Error::TruncationEnergy { energy: tail, tol: opts.trunc_tol, grid: m });
        }
        m *= 2;
    }
    unreachable!()
}

/// Unwrap the grid-ordered spectrum into a dense field of band `m/2 - 1`
/// and measure the relative energy in the outer half of that band.
fn extract_dense(
    f: &SpectralField,
    buf: &[Complex64],
    dims: &[usize],
    m: usize,
) -> Result<(SpectralField, f64)> {
    let dim = dims.len();
    let band = (m / 2 - 1) as i64;
    let lattice = if band > f.lattice().band_limit() {
        f.lattice().with_band_limit(band)?
    } else {
        *f.lattice()
    };
    let mut out = vec![Complex64::ZERO; dense_len(dim, band)];
    let mut total = 0.0f64;
    let mut outer = 0.0f64;
    let inner = (m / 4) as i64;
    for (flat, c) in buf.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        let mut rem = flat;
        let mut k = [0i64; 3];
        let mut in_band = true;
        let mut in_inner = true;
        for a in (0..dim).rev() {
            let idx = (rem % dims[a]) as i64;
            rem /= dims[a];
            let ka = if idx <= dims[a] as i64 / 2 { idx } else { idx - dims[a] as i64 };
            k[a] = ka;
            if ka.abs() > band {
                in_band = false;
            }
            if ka.abs() > inner {
                in_inner = false;
            }
        }
        if in_band {
            out[dense_index(dim, band, Mode(k))] = *c;
        }
        if !in_inner {
            outer += e;
        }
    }
    let tail = if total > 0.0 { outer / total } else { 0.0 };
    let field = SpectralField::from_dense_parts(lattice, band, out, f.is_real())?;
    Ok((field, tail))
}

/// Max `|u(x)|` over a grid with 4× the field's Nyquist density per axis.
pub fn sup_norm(f: &SpectralField) -> f64 {
    sup_norm_oversampled(f, 4)
}

pub fn sup_norm_oversampled(f: &SpectralField, oversample: usize) -> f64 {
    grid_sup(f, oversampled_grid(f, oversample))
}

pub(crate) fn grid_dims(dim: usize, m: usize) -> [usize; 3] {
    let mut dims = [1usize; 3];
    for d in dims.iter_mut().take(dim) {
        *d = m;
    }
    dims
}

/// Forward-transform grid samples and collect `|k_i| ≤ out_band` into a
/// dense field (the caller guarantees the grid resolves that band).
pub(crate) fn forward_to_dense(
    lattice: super::lattice::FrequencyLattice,
    buf: &mut [Complex64],
    dims: &[usize],
    out_band: i64,
    real: bool,
) -> Result<SpectralField> {
    let dim = dims.len();
    debug_assert!(dims.iter().all(|&m| m as i64 >= 2 * out_band + 2));
    nd_transform(buf, dims, false);
    let scale = 1.0 / buf.len() as f64;
    let lattice = if out_band <= lattice.band_limit() {
        lattice
    } else {
        lattice.with_band_limit(out_band)?
    };
    let mut out = vec![Complex64::ZERO; dense_len(dim, out_band)];
    let n = (2 * out_band + 1) as usize;
    let mut k = [0i64; 3];
    for (flat, slot) in out.iter_mut().enumerate() {
        let mut rem = flat;
        for a in (0..dim).rev() {
            k[a] = (rem % n) as i64 - out_band;
            rem /= n;
        }
        let mut src = 0usize;
        for a in 0..dim {
            src = src * dims[a] + k[a].rem_euclid(dims[a] as i64) as usize;
        }
        *slot = buf[src] * scale;
    }
    SpectralField::from_dense_parts(lattice, out_band, out, real)
}

pub(crate) fn compatible(a: &SpectralField, b: &SpectralField) -> Result<()> {
    if a.dim() != b.dim() || a.lattice().inverse_spacing() != b.lattice().inverse_spacing() {
        return Err(Error::InvalidLattice(format!(
            "incompatible lattices: (d={}, L={}) vs (d={}, L={})",
            a.dim(),
            a.lattice().inverse_spacing(),
            b.dim(),
            b.lattice().inverse_spacing()
        )));
    }
    Ok(())
}
