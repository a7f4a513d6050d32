use super::fft::{dft_inplace, nd_synthesis};
use super::field::SpectralField;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Largest single FFT buffer the evaluator will allocate (complex entries);
/// longer grids are evaluated in decimated segments of this length.
const SEG_MAX_LEN: usize = 1 << 21;

/// Work bound (modes × points) below which direct summation is used for
/// sparse fields.
const DIRECT_WORK_LIMIT: u128 = 1 << 26;

/// Phasor-rotation resync interval; bounds accumulated rounding to
/// ~`interval · eps` per phase.
const RESYNC: usize = 256;

/// Which evaluation strategy `grid_sup` would choose (exposed for tests).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    Direct,
    Fft,
}

/// Evaluate the field at one physical point by direct summation.
pub fn eval_at_point(field: &SpectralField, x: [f64; 3]) -> Complex64 {
    let l = field.lattice().inverse_spacing() as f64;
    let mut acc = Complex64::ZERO;
    for (k, c) in field.iter_coeffs() {
        let phase = (k.0[0] as f64 * x[0] + k.0[1] as f64 * x[1] + k.0[2] as f64 * x[2]) / l;
        acc += c * Complex64::new(phase.cos(), phase.sin());
    }
    acc
}

/// Exact samples on the uniform grid `x_m = (2πL/M_a)·m_a`, computed by
/// folding coefficients modulo the grid and synthesizing with an FFT.
/// Materializes the whole grid; callers needing only the max should prefer
/// [`grid_sup`].
pub fn samples_on_grid(field: &SpectralField, m: [usize; 3]) -> Vec<Complex64> {
    let dim = field.dim();
    let dims: Vec<usize> = m[..dim].to_vec();
    let total: usize = dims.iter().product();
    let mut buf = vec![Complex64::ZERO; total];
    for (k, c) in field.iter_coeffs() {
        let mut idx = 0usize;
        for a in 0..dim {
            let ma = dims[a] as i64;
            let folded = k.0[a].rem_euclid(ma) as usize;
            idx = idx * dims[a] + folded;
        }
        buf[idx] += c;
    }
    nd_synthesis(&mut buf, &dims);
    buf
}

/// Max `|u|` over the uniform grid, path chosen automatically.
pub fn grid_sup(field: &SpectralField, m: [usize; 3]) -> f64 {
    match choose_path(field, m) {
        EvalPath::Direct => sup_on_grid_direct(field, m),
        EvalPath::Fft => sup_on_grid_fft(field, m),
    }
}

pub fn choose_path(field: &SpectralField, m: [usize; 3]) -> EvalPath {
    let dim = field.dim();
    let points: u128 = m[..dim].iter().map(|&x| x as u128).product();
    let work = field.stored_len() as u128 * points;
    if field.is_sparse() && work <= DIRECT_WORK_LIMIT {
        EvalPath::Direct
    } else {
        EvalPath::Fft
    }
}

/// Direct trigonometric summation over the grid. Exact same samples as the
/// FFT path; used as the reference path and for small sparse fields.
pub fn sup_on_grid_direct(field: &SpectralField, m: [usize; 3]) -> f64 {
    let dim = field.dim();
    if dim == 1 {
        return sup_direct_1d(field, m[0]);
    }
    let dims = &m[..dim];
    let entries: Vec<_> = field.iter_coeffs().collect();
    let mut sup: f64 = 0.0;
    let total: usize = dims.iter().product();
    for flat in 0..total {
        let mut rem = flat;
        let mut mpt = [0usize; 3];
        for a in (0..dim).rev() {
            mpt[a] = rem % dims[a];
            rem /= dims[a];
        }
        let mut acc = Complex64::ZERO;
        for (k, c) in &entries {
            let mut phase = 0.0;
            for a in 0..dim {
                phase += TAU * (k.0[a].rem_euclid(dims[a] as i64) as f64) * (mpt[a] as f64)
                    / dims[a] as f64;
            }
            acc += c * Complex64::new(phase.cos(), phase.sin());
        }
        sup = sup.max(acc.norm());
    }
    sup
}

fn sup_direct_1d(field: &SpectralField, m: usize) -> f64 {
    let entries: Vec<(i64, Complex64)> = field
        .iter_coeffs()
        .map(|(k, c)| (k.0[0].rem_euclid(m as i64), c))
        .collect();
    const CHUNK: usize = 4096;
    let chunks: Vec<usize> = (0..m).step_by(CHUNK).collect();
    let sup = chunks
        .par_iter()
        .map(|&start| {
            let len = CHUNK.min(m - start);
            let mut acc = vec![Complex64::ZERO; len];
            for &(k, c) in &entries {
                // Phasor rotation with periodic exact resync.
                let step = rotor(k, 1, m);
                let mut z = rotor(k, start as i64, m);
                for (i, slot) in acc.iter_mut().enumerate() {
                    if i % RESYNC == 0 && i > 0 {
                        z = rotor(k, (start + i) as i64, m);
                    }
                    *slot += c * z;
                    z *= step;
                }
            }
            acc.iter().map(|c| c.norm()).fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    sup
}

/// `e^{2πi·k·m/M}` with the product reduced exactly.
fn rotor(k: i64, m: i64, modulus: usize) -> Complex64 {
    let md = modulus as i128;
    let prod = (k as i128 * m as i128).rem_euclid(md);
    let phase = TAU * prod as f64 / modulus as f64;
    Complex64::new(phase.cos(), phase.sin())
}

/// FFT-based sup over the grid. One-dimensional grids longer than the
/// segment cap are evaluated in decimated segments: samples with index
/// `r + S·m'` come from a length-`M/S` FFT of the twisted, folded
/// coefficients, so memory stays bounded while the samples are identical.
pub fn sup_on_grid_fft(field: &SpectralField, m: [usize; 3]) -> f64 {
    let dim = field.dim();
    if dim > 1 || m[0] <= SEG_MAX_LEN {
        let buf = samples_on_grid(field, m);
        return buf.iter().map(|c| c.norm()).fold(0.0, f64::max);
    }
    let total = m[0];
    let seg_len = SEG_MAX_LEN;
    let segments = total / seg_len;
    debug_assert!(total % seg_len == 0, "grid sizes are powers of two");
    let entries: Vec<(i64, Complex64)> = field.iter_coeffs().map(|(k, c)| (k.0[0], c)).collect();
    (0..segments)
        .into_par_iter()
        .map(|r| {
            let mut buf = vec![Complex64::ZERO; seg_len];
            for &(k, c) in &entries {
                let idx = k.rem_euclid(seg_len as i64) as usize;
                buf[idx] += c * rotor(k, r as i64, total);
            }
            dft_inplace(&mut buf, true);
            buf.iter().map(|c| c.norm()).fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Max `|Im u|` over the grid (Hermitian-symmetry diagnostics).
pub fn grid_max_imag(field: &SpectralField, m: [usize; 3]) -> f64 {
    let buf = samples_on_grid(field, m);
    buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
}

pub(crate) fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Per-axis grid sizes giving at least `oversample`× the Nyquist density of
/// the field's stored support.
pub(crate) fn oversampled_grid(field: &SpectralField, oversample: usize) -> [usize; 3] {
    let ext = field.support_extent();
    let mut m = [1usize; 3];
    for a in 0..field.dim() {
        let nyquist = 2 * ext[a].unsigned_abs() as usize + 1;
        m[a] = next_pow2((oversample * nyquist).max(8));
    }
    m
}
