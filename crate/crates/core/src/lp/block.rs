use super::partition::{annulus_bump_at_level, level_range, low_pass_at_level};
use crate::spectral::SpectralField;

/// Littlewood-Paley block. With `homogeneous` the multiplier is
/// `φ(2^{-j}ξ)` for every `j`; without it, levels `j ≤ -2` vanish, `j = -1`
/// is the low block `Ψ(ξ)` and `j ≥ 0` agrees with the homogeneous block.
/// Sparse inputs stay sparse.
pub fn block(f: &SpectralField, j: i64, homogeneous: bool) -> SpectralField {
    if !homogeneous {
        if j <= -2 {
            return zero_like(f);
        }
        if j == -1 {
            return f.apply_multiplier(|xi| low_pass_at_level(0, norm3(xi)));
        }
    }
    f.apply_multiplier(|xi| annulus_bump_at_level(j, norm3(xi)))
}

/// Low cut `Ṡ_j f`: multiplier `χ_L(2^{-j}ξ)`.
pub fn low_cut(f: &SpectralField, j: i64) -> SpectralField {
    f.apply_multiplier(|xi| low_pass_at_level(j, norm3(xi)))
}

/// Dyadic levels with possibly nonzero homogeneous blocks for this field.
pub fn active_levels(f: &SpectralField) -> Vec<i64> {
    match f.freq_range() {
        None => Vec::new(),
        Some((lo, hi)) => {
            let (j0, j1) = level_range(lo, hi);
            (j0..=j1).collect()
        }
    }
}

pub(crate) fn zero_like(f: &SpectralField) -> SpectralField {
    if f.is_dense() {
        SpectralField::zero_dense(*f.lattice(), f.band()).expect("band already validated")
    } else {
        SpectralField::zero_sparse(*f.lattice())
    }
}

fn norm3(xi: [f64; 3]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}
