use super::config::SolverConfig;
use super::nonlin::grad_square_sum;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use num_complex::Complex64;

/// Second-order exponential integrator (two-stage ETD Runge-Kutta) for the
/// mild formulation `u(t) = e^{tΔ}u0 + ∫_0^t e^{(t-τ)Δ}|∇u|² dτ`.
///
/// Per step of size `h`, with diagonal symbols `z = -h|ξ|²`:
///
/// ```text
///   a     = e^{hΔ}u_n + h·φ₁(hΔ)·N(u_n)
///   u_{n+1} = a + h·φ₂(hΔ)·(N(a) - N(u_n)),    N(u) = Σ_i (∂_i u)²
/// ```
///
/// The nonlinearity is evaluated dealiased (the product grid satisfies the
/// 3/2 rule for the simulation band, which is `u0`'s dense extent).
/// Returns snapshots at step-aligned times nearest the configured log-spaced
/// schedule, always including the final time.
pub fn mild_solve(u0: &SpectralField, cfg: &SolverConfig) -> Result<Vec<(f64, SpectralField)>> {
    if !u0.is_dense() {
        return Err(Error::DenseRequired);
    }
    cfg.validate()?;
    let band = u0.band();
    let h = cfg.t_final / cfg.steps as f64;

    // Per-mode stiff multipliers.
    let dim = u0.dim();
    let n_per_axis = (2 * band + 1) as usize;
    let total = n_per_axis.pow(dim as u32);
    let mut e_h = vec![0.0f64; total];
    let mut p1 = vec![0.0f64; total];
    let mut p2 = vec![0.0f64; total];
    for flat in 0..total {
        let mut rem = flat;
        let mut k = [0i64; 3];
        for a in (0..dim).rev() {
            k[a] = (rem % n_per_axis) as i64 - band;
            rem /= n_per_axis;
        }
        let z = -h * u0.lattice().freq_norm_sq(k);
        e_h[flat] = z.exp();
        p1[flat] = h * phi1(z);
        p2[flat] = h * phi2(z);
    }

    let snap_steps = snapshot_steps(cfg);
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut u = dense_vec(u0);
    let guard = cfg.exp_guard * 10.0;
    for step in 0..cfg.steps {
        let nu = nonlinearity(u0, &u, band)?;
        let mut a = vec![Complex64::ZERO; total];
        for i in 0..total {
            a[i] = e_h[i] * u[i] + p1[i] * nu[i];
        }
        let na = nonlinearity(u0, &a, band)?;
        for i in 0..total {
            u[i] = a[i] + p2[i] * (na[i] - nu[i]);
        }
        let worst = u.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if !worst.is_finite() || worst > guard {
            return Err(Error::ExpOverflow { sup: worst, limit: guard });
        }
        if snap_steps.binary_search(&(step + 1)).is_ok() {
            let t = (step + 1) as f64 * h;
            snapshots.push((t, rebuild(u0, band, &u)?));
        }
    }
    Ok(snapshots)
}

fn nonlinearity(proto: &SpectralField, coeffs: &[Complex64], band: i64) -> Result<Vec<Complex64>> {
    let field = rebuild(proto, band, coeffs)?;
    let n = grad_square_sum(&field, band)?;
    Ok(dense_vec(&n))
}

fn rebuild(proto: &SpectralField, band: i64, coeffs: &[Complex64]) -> Result<SpectralField> {
    SpectralField::from_dense_parts(*proto.lattice(), band, coeffs.to_vec(), proto.is_real())
}

fn dense_vec(f: &SpectralField) -> Vec<Complex64> {
    let band = f.band();
    let dim = f.dim();
    let n = (2 * band + 1) as usize;
    let mut out = vec![Complex64::ZERO; n.pow(dim as u32)];
    for (k, c) in f.iter_coeffs() {
        let mut idx = 0usize;
        for a in 0..dim {
            idx = idx * n + (k.0[a] + band) as usize;
        }
        out[idx] = c;
    }
    out
}

/// Step indices (1-based) closest to the configured log-spaced times.
fn snapshot_steps(cfg: &SolverConfig) -> Vec<usize> {
    let h = cfg.t_final / cfg.steps as f64;
    let mut steps: Vec<usize> = cfg
        .snapshot_times()
        .iter()
        .map(|t| ((t / h).round() as usize).clamp(1, cfg.steps))
        .collect();
    steps.push(cfg.steps);
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// `(e^z - 1)/z`, stable near zero.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z)/z²`, stable near zero.
fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        0.5 + z / 6.0 + z * z / 24.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}
