use crate::error::Result;
use crate::lp::{besov_norm, sobolev_norm, BesovKind, QIndex};
use crate::spectral::{partial_derivative, samples_on_grid, SpectralField};
use serde::Serialize;

/// One monitored instant: the `H^s` norm and the running continuation
/// integrals `∫_0^t ‖∇u‖²_{L^∞} dτ` and `∫_0^t ‖∇u‖²_{Ḃ⁰_{∞,2}} dτ`.
#[derive(Debug, Clone, Serialize)]
pub struct MonitorRow {
    pub t: f64,
    pub hs: f64,
    pub grad_sup_sq_integral: f64,
    pub grad_besov_sq_integral: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorReport {
    pub s: f64,
    /// Set when `s ≤ 1 + d/2`, where the monitored criteria lose meaning.
    pub s_below_threshold: bool,
    pub rows: Vec<MonitorRow>,
}

/// Track the `H^s` energy and the blow-up-criterion integrals along a
/// snapshot trajectory (trapezoid on the snapshot grid). Rows are flagged
/// once either integral exceeds `budget`.
pub fn hs_energy_monitor(
    snapshots: &[(f64, SpectralField)],
    s: f64,
    budget: f64,
) -> Result<MonitorReport> {
    let dim = snapshots.first().map(|(_, f)| f.dim()).unwrap_or(1);
    let s_below_threshold = s <= 1.0 + dim as f64 / 2.0;
    let mut rows: Vec<MonitorRow> = Vec::with_capacity(snapshots.len());
    let mut int_sup = 0.0f64;
    let mut int_besov = 0.0f64;
    let mut prev: Option<(f64, f64, f64)> = None;
    for (t, u) in snapshots {
        let hs = sobolev_norm(u, s);
        let g_sup_sq = grad_sup(u)?.powi(2);
        let g_besov_sq = grad_besov_b0_inf2(u)?.powi(2);
        if let Some((tp, sp, bp)) = prev {
            int_sup += 0.5 * (g_sup_sq + sp) * (t - tp);
            int_besov += 0.5 * (g_besov_sq + bp) * (t - tp);
        }
        prev = Some((*t, g_sup_sq, g_besov_sq));
        rows.push(MonitorRow {
            t: *t,
            hs,
            grad_sup_sq_integral: int_sup,
            grad_besov_sq_integral: int_besov,
            flagged: int_sup > budget || int_besov > budget,
        });
    }
    Ok(MonitorReport { s, s_below_threshold, rows })
}

/// `‖∇u‖_{L^∞}` (Euclidean magnitude over axes) on an oversampled grid.
pub fn grad_sup(u: &SpectralField) -> Result<f64> {
    let dim = u.dim();
    let ext = u.support_extent();
    let mut m = [1usize; 3];
    for a in 0..dim {
        m[a] = (4 * (2 * ext[a].unsigned_abs() as usize + 1)).next_power_of_two().max(8);
    }
    let total: usize = m[..dim].iter().product();
    let mut sq = vec![0.0f64; total];
    for axis in 0..dim {
        let d = partial_derivative(u, axis)?;
        let samples = samples_on_grid(&d, m);
        for (slot, v) in sq.iter_mut().zip(&samples) {
            *slot += v.norm_sqr();
        }
    }
    Ok(sq.iter().copied().fold(0.0, f64::max).sqrt())
}

/// `‖∇u‖_{Ḃ⁰_{∞,2}}` as the ℓ² over axes of per-axis block norms.
fn grad_besov_b0_inf2(u: &SpectralField) -> Result<f64> {
    let mut acc = 0.0;
    for axis in 0..u.dim() {
        let d = partial_derivative(u, axis)?;
        let v = besov_norm(&d, 0.0, QIndex::Finite(2.0), &BesovKind::Homogeneous).value;
        acc += v * v;
    }
    Ok(acc.sqrt())
}
