use crate::error::Result;
use crate::spectral::{
    forward_to_dense, grid_dims, partial_derivative, samples_on_grid, sparse_convolve,
    SpectralField,
};
use num_complex::Complex64;

/// `Σ_i ∂_i a · ∂_i b`, the bilinear form of the nonlinearity.
///
/// Sparse inputs use exact coefficient convolution (band auto-extends).
/// Dense inputs multiply on a grid with
/// `M ≥ out_band + band(a) + band(b) + 1`, so no aliased image of the
/// product lands inside `out_band`.
pub fn grad_dot(a: &SpectralField, b: &SpectralField, out_band: i64) -> Result<SpectralField> {
    if a.is_sparse() && b.is_sparse() {
        let mut acc: Option<SpectralField> = None;
        for axis in 0..a.dim() {
            let da = partial_derivative(a, axis)?;
            let db = partial_derivative(b, axis)?;
            let prod = sparse_convolve(&da, &db, true)?;
            acc = Some(match acc {
                None => prod,
                Some(s) => s.add_scaled(&prod, Complex64::new(1.0, 0.0))?,
            });
        }
        Ok(acc.expect("dim >= 1"))
    } else {
        dense_grad_dot(&densify(a)?, &densify(b)?, out_band, false)
    }
}

/// `Σ_i (∂_i u)²` truncated alias-free to `out_band`.
pub fn grad_square_sum(u: &SpectralField, out_band: i64) -> Result<SpectralField> {
    if u.is_sparse() {
        return grad_dot(u, u, out_band);
    }
    dense_grad_dot(u, u, out_band, true)
}

fn dense_grad_dot(
    a: &SpectralField,
    b: &SpectralField,
    out_band: i64,
    same: bool,
) -> Result<SpectralField> {
    let dim = a.dim();
    let m = (((out_band + a.band() + b.band() + 1).max(8)) as usize).next_power_of_two();
    let dims = grid_dims(dim, m);
    let total: usize = dims[..dim].iter().product();
    let mut acc = vec![Complex64::ZERO; total];
    for axis in 0..dim {
        let da = partial_derivative(a, axis)?;
        let sa = samples_on_grid(&da, dims);
        if same {
            for (slot, x) in acc.iter_mut().zip(&sa) {
                *slot += x * x;
            }
        } else {
            let db = partial_derivative(b, axis)?;
            let sb = samples_on_grid(&db, dims);
            for ((slot, x), y) in acc.iter_mut().zip(&sa).zip(&sb) {
                *slot += x * y;
            }
        }
    }
    forward_to_dense(
        *a.lattice(),
        &mut acc,
        &dims[..dim],
        out_band,
        a.is_real() && b.is_real(),
    )
}

fn densify(f: &SpectralField) -> Result<SpectralField> {
    if f.is_dense() {
        Ok(f.clone())
    } else {
        f.to_dense(f.band())
    }
}
