//! The dyadic partition of unity.
//!
//! All multipliers are radial and built from one smooth step
//! `s(x) = b(x)/(b(x) + b(1-x))`, `b(x) = e^{-1/x}`, so that
//! `s(x) + s(1-x) = 1` exactly. The low-pass profile is 1 on `|ξ| ≤ 1` and 0
//! on `|ξ| ≥ 4/3`; the annulus bump `φ(ξ) = χ_L(ξ/2) - χ_L(ξ)` is then
//! supported in `{1 ≤ |ξ| ≤ 8/3}` with `φ ≡ 1` on `{4/3 ≤ |ξ| ≤ 2}`, and
//! `Σ_j φ(2^{-j}ξ) = 1` telescopes by construction. Dyadic rescaling is an
//! exact f64 operation, so partition sums cancel bitwise.

/// `s: [0,1] → [0,1]`, smooth, `s(0) = 0`, `s(1) = 1`, `s(x)+s(1-x) = 1`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Radial low-pass profile `χ_L`: 1 for `r ≤ 1`, 0 for `r ≥ 4/3`.
/// This is also the paper's `Ψ` (level-0 low cut).
pub fn low_pass(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 4.0 / 3.0 {
        0.0
    } else {
        smooth_step(4.0 - 3.0 * r)
    }
}

/// Radial annulus bump `φ(r) = χ_L(r/2) - χ_L(r)`.
pub fn annulus_bump(r: f64) -> f64 {
    low_pass(0.5 * r) - low_pass(r)
}

/// `φ(2^{-j} r)`; the dyadic rescale is exact in f64.
pub fn annulus_bump_at_level(j: i64, r: f64) -> f64 {
    annulus_bump(scale_exp2(r, -j))
}

/// `χ_L(2^{-j} r)`.
pub fn low_pass_at_level(j: i64, r: f64) -> f64 {
    low_pass(scale_exp2(r, -j))
}

/// `r · 2^e` without rounding (exponent arithmetic only).
pub fn scale_exp2(r: f64, e: i64) -> f64 {
    r * f64::powi(2.0, e as i32)
}

/// `Σ_j φ(2^{-j} r)` over every level that can contribute.
pub fn partition_sum(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let j0 = r.log2().floor() as i64;
    let mut sum = 0.0;
    for j in (j0 - 3)..=(j0 + 2) {
        sum += annulus_bump_at_level(j, r);
    }
    sum
}

/// Dyadic level range `[j_min, j_max]` whose annuli can intersect the radial
/// interval `[lo, hi]` (`0 < lo ≤ hi`).
pub fn level_range(lo: f64, hi: f64) -> (i64, i64) {
    let j_min = (lo.log2() - (8.0f64 / 3.0).log2()).floor() as i64;
    let j_max = hi.log2().floor() as i64 + 1;
    (j_min, j_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_a_partition_of_two() {
        for &x in &[0.001, 0.1, 0.25, 0.5, 0.77, 0.999] {
            assert_eq!(smooth_step(x) + smooth_step(1.0 - x), 1.0);
        }
        assert_eq!(smooth_step(0.5), 0.5);
    }

    #[test]
    fn bump_support_and_plateau() {
        assert_eq!(annulus_bump(0.999), 0.0);
        assert_eq!(annulus_bump(1.0), 0.0);
        assert_eq!(annulus_bump(4.0 / 3.0), 1.0);
        assert_eq!(annulus_bump(1.7), 1.0);
        assert_eq!(annulus_bump(2.0), 1.0);
        assert_eq!(annulus_bump(8.0 / 3.0), 0.0);
        assert_eq!(annulus_bump(3.0), 0.0);
        for &r in &[1.1, 1.25, 2.2, 2.5] {
            let v = annulus_bump(r);
            assert!(v > 0.0 && v <= 1.0, "phi({r}) = {v}");
        }
    }

    #[test]
    fn telescoping_sum_is_one() {
        // Deterministic sweep over 21 binades.
        let mut r = 9.5367431640625e-7; // 2^-20
        while r <= 1048576.0 {
            for &frac in &[1.0, 1.1, 1.37, 1.5, 1.9] {
                let x = r * frac;
                let dev = (partition_sum(x) - 1.0).abs();
                assert!(dev <= 1e-12, "sum at {x} deviates by {dev:.2e}");
            }
            r *= 2.0;
        }
    }
}
