use crate::lp::partition::smooth_step;
use crate::spectral::{FrequencyLattice, Mode};

/// Radial bump profile: 1 for `r ≤ 1/4`, 0 for `r ≥ 1/2`, smooth-step glue
/// between, values in `[0, 1]`. Coefficients outside radius 1/2 are exactly
/// zero on the lattice.
pub fn bump(r: f64) -> f64 {
    if r <= 0.25 {
        1.0
    } else if r >= 0.5 {
        0.0
    } else {
        smooth_step(2.0 - 4.0 * r)
    }
}

/// Lattice samples of `χ(ξ - center)`: the integer modes within radius
/// `L/2` of the lattice center, with their profile values.
pub fn sampled_bump(lattice: &FrequencyLattice, center: [i64; 3]) -> Vec<(Mode, f64)> {
    let l = lattice.inverse_spacing();
    let dim = lattice.dim();
    let half = l / 2; // bump radius in lattice units
    let mut out = Vec::new();
    let mut offset = [0i64; 3];
    for a in offset.iter_mut().take(dim) {
        *a = -half;
    }
    loop {
        let r2: i64 = offset[..dim].iter().map(|&o| o * o).sum();
        let r = (r2 as f64).sqrt() / l as f64;
        let v = bump(r);
        if v > 0.0 {
            let mut k = [0i64; 3];
            for a in 0..dim {
                k[a] = center[a] + offset[a];
            }
            out.push((Mode(k), v));
        }
        let mut a = 0;
        loop {
            if a == dim {
                return out;
            }
            offset[a] += 1;
            if offset[a] <= half {
                break;
            }
            offset[a] = -half;
            a += 1;
        }
    }
}

/// `χ̌(0) = Σ_k χ(k/L)` on the lattice (the peak value of the bump kernel).
pub fn bump_kernel_at_zero(lattice: &FrequencyLattice) -> f64 {
    sampled_bump(lattice, [0, 0, 0]).iter().map(|(_, v)| v).sum()
}
