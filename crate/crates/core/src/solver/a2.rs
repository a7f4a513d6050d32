use crate::error::{Error, Result};
use crate::spectral::{Mode, SpectralField};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Closed-form second Picard iterate on sparse data.
///
/// From the Duhamel integral, the coefficient of `A_2(f)(t)` at `ξ = η + μ`
/// is
///
/// ```text
///   Σ_{η+μ=ξ} (iη)·(iμ) f̂(η) f̂(μ) · e^{-t|ξ|²} (1 - e^{-tD})/D,
///   D = |η|² + |μ|² - |ξ|²,
/// ```
///
/// realized as a weighted sparse self-convolution. The kernel is evaluated
/// overflow-free for either sign of `D` as `(e^{-t|ξ|²} - e^{-t(|η|²+|μ|²)})/D`,
/// switching to the series `e^{-t|ξ|²}·t·(1 - tD/2 + (tD)²/6)` for
/// `|tD| < 1e-4`; `D = 0` gives exactly `t`.
pub fn a2_exact(f: &SpectralField, t: f64) -> Result<SpectralField> {
    if f.is_dense() {
        return Err(Error::SparseRequired);
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let lattice = *f.lattice();
    let entries: Vec<(Mode, Complex64)> = f.iter_coeffs().collect();
    let mut map: BTreeMap<Mode, Complex64> = BTreeMap::new();
    for (eta, c_eta) in &entries {
        let xi_eta = lattice.freq(eta.0);
        let eta_sq = lattice.freq_norm_sq(eta.0);
        for (mu, c_mu) in &entries {
            let k = eta.add(mu);
            let slot = map.entry(k).or_insert(Complex64::ZERO);
            if t == 0.0 {
                continue;
            }
            let xi_mu = lattice.freq(mu.0);
            let mu_sq = lattice.freq_norm_sq(mu.0);
            // (iη)·(iμ) = -η·μ.
            let weight =
                -(xi_eta[0] * xi_mu[0] + xi_eta[1] * xi_mu[1] + xi_eta[2] * xi_mu[2]);
            if weight == 0.0 {
                continue;
            }
            let out_sq = lattice.freq_norm_sq(k.0);
            let kern = duhamel_kernel(t, t * out_sq, t * (eta_sq + mu_sq));
            *slot += c_eta * c_mu * weight * kern;
        }
    }
    let band = map.keys().map(|k| k.max_abs()).max().unwrap_or(0);
    let lattice = if band > lattice.band_limit() {
        lattice.with_band_limit(band)?
    } else {
        lattice
    };
    SpectralField::from_sorted_sparse(lattice, map.into_iter().collect(), f.is_real())
}

/// `e^{-a}·(1 - e^{-(b-a)})/D` with `a = t|ξ|²`, `b = t(|η|²+|μ|²)`,
/// `D = (b-a)/t`. Both `e^{-a}` and `e^{-b}` lie in `(0, 1]`, so the
/// difference form never overflows; the series takes over when the
/// exponents nearly cancel.
pub(crate) fn duhamel_kernel(t: f64, a: f64, b: f64) -> f64 {
    let z = b - a;
    if z.abs() < 1e-4 {
        (-a).exp() * t * (1.0 - 0.5 * z + z * z / 6.0)
    } else {
        t * ((-a).exp() - (-b).exp()) / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_limits() {
        // D = 0 gives exactly t·e^{-a}.
        assert_eq!(duhamel_kernel(0.25, 0.5, 0.5), 0.25 * (-0.5f64).exp());
        // Matches the naive formula away from the cancellation zone.
        let (t, a, b): (f64, f64, f64) = (0.3, 0.2, 1.7);
        let d = (b - a) / t;
        let naive = (-a).exp() * (1.0 - (-(b - a)).exp()) / d;
        assert!((duhamel_kernel(t, a, b) - naive).abs() < 1e-15);
        // Large negative tD stays finite.
        let huge = duhamel_kernel(1.0, 1e6, 0.0);
        assert!(huge.is_finite() && huge > 0.0);
    }

    #[test]
    fn kernel_branches_agree_at_the_switch() {
        // Series and difference form evaluated at the same z near 1e-4.
        let t = 0.7;
        let a = 0.3;
        for &z in &[0.95e-4, 1.05e-4, -0.95e-4, -1.05e-4] {
            let b = a + z;
            let series = (-a as f64).exp() * t * (1.0 - 0.5 * z + z * z / 6.0);
            let diff = t * ((-a as f64).exp() - (-b as f64).exp()) / z;
            assert!(
                (series - diff).abs() <= 1e-11 * diff.abs(),
                "branch mismatch at z = {z}: {series} vs {diff}"
            );
        }
    }
}
