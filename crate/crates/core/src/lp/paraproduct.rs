use super::block::{active_levels, block, low_cut, zero_like};
use crate::error::Result;
use crate::spectral::{sparse_convolve, Mode, SpectralField};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Bony paraproduct `Ṫ_u v = Σ_j Ṡ_{j-1}u · Δ̇_j v`.
pub fn paraproduct(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let us = u.to_sparse();
    let vs = v.to_sparse();
    let mut acc: BTreeMap<Mode, Complex64> = BTreeMap::new();
    for j in active_levels(&vs) {
        let vj = block(&vs, j, true);
        if is_zero(&vj) {
            continue;
        }
        let su = low_cut(&us, j - 1);
        if is_zero(&su) {
            continue;
        }
        accumulate(&mut acc, &sparse_convolve(&su, &vj, true)?);
    }
    assemble(u, v, acc)
}

/// Bony remainder `Ṙ(u,v) = Σ_j Σ_{|k-j|≤1} Δ̇_j u · Δ̇_k v`.
pub fn remainder(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let us = u.to_sparse();
    let vs = v.to_sparse();
    let ju = active_levels(&us);
    let jv: std::collections::BTreeSet<i64> = active_levels(&vs).into_iter().collect();
    let mut acc: BTreeMap<Mode, Complex64> = BTreeMap::new();
    for &j in &ju {
        let uj = block(&us, j, true);
        if is_zero(&uj) {
            continue;
        }
        for k in (j - 1)..=(j + 1) {
            if !jv.contains(&k) {
                continue;
            }
            let vk = block(&vs, k, true);
            if is_zero(&vk) {
                continue;
            }
            accumulate(&mut acc, &sparse_convolve(&uj, &vk, true)?);
        }
    }
    assemble(u, v, acc)
}

fn is_zero(f: &SpectralField) -> bool {
    f.iter_coeffs().all(|(_, c)| c == Complex64::ZERO)
}

fn accumulate(acc: &mut BTreeMap<Mode, Complex64>, f: &SpectralField) {
    for (k, c) in f.iter_coeffs() {
        *acc.entry(k).or_insert(Complex64::ZERO) += c;
    }
}

fn assemble(
    u: &SpectralField,
    v: &SpectralField,
    acc: BTreeMap<Mode, Complex64>,
) -> Result<SpectralField> {
    if acc.is_empty() {
        let mut z = zero_like(&u.to_sparse());
        z.set_real(u.is_real() && v.is_real());
        return Ok(z);
    }
    let band = acc.keys().map(|k| k.max_abs()).max().unwrap_or(0);
    let lattice = if band > u.lattice().band_limit() {
        u.lattice().with_band_limit(band)?
    } else {
        *u.lattice()
    };
    SpectralField::from_sorted_sparse(
        lattice,
        acc.into_iter().collect(),
        u.is_real() && v.is_real(),
    )
}
