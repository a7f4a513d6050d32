use super::block::{active_levels, block};
use super::partition::{annulus_bump_at_level, scale_exp2};
use crate::error::{Error, Result};
use crate::spectral::{partial_derivative, samples_on_grid, sup_norm, SpectralField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Summability index `q ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QIndex {
    Finite(f64),
    Inf,
}

impl QIndex {
    pub fn parse(text: &str) -> Result<QIndex> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(QIndex::Inf);
        }
        let v: f64 = t.parse().map_err(|e| Error::InvalidParameter {
            key: "q".into(),
            message: format!("{e}"),
        })?;
        if v < 1.0 {
            return Err(Error::InvalidParameter {
                key: "q".into(),
                message: format!("q = {v} must be >= 1"),
            });
        }
        Ok(QIndex::Finite(v))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, QIndex::Inf)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            QIndex::Finite(v) => *v,
            QIndex::Inf => f64::INFINITY,
        }
    }

    /// `ℓ^q` aggregation of nonnegative values.
    pub fn ell(&self, values: impl Iterator<Item = f64>) -> f64 {
        match self {
            QIndex::Inf => values.fold(0.0, f64::max),
            QIndex::Finite(q) => values.map(|v| v.powf(*q)).sum::<f64>().powf(1.0 / *q),
        }
    }
}

impl std::fmt::Display for QIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QIndex::Inf => write!(f, "inf"),
            QIndex::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for QIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        QIndex::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// A norm value together with its per-level breakdown
/// (entries are the pre-aggregation terms `2^{js}·m_j`).
#[derive(Debug, Clone, Serialize)]
pub struct BlockedNorm {
    pub value: f64,
    pub per_block: Vec<(i64, f64)>,
}

impl BlockedNorm {
    fn scalar(value: f64) -> Self {
        Self { value, per_block: Vec::new() }
    }
}

/// Which family of blocks a Besov norm aggregates.
#[derive(Debug, Clone, PartialEq)]
pub enum BesovKind {
    Inhomogeneous,
    Homogeneous,
    /// `ℓ^q` over an explicit level set only.
    Restricted(BTreeSet<i64>),
}

/// `B^s_{∞,q}`-type norm: `ℓ^q` over levels of `2^{js}·‖Δ_j f‖_{L^∞}`.
pub fn besov_norm(f: &SpectralField, s: f64, q: QIndex, kind: &BesovKind) -> BlockedNorm {
    let js: Vec<i64> = match kind {
        BesovKind::Homogeneous => active_levels(f),
        BesovKind::Inhomogeneous => {
            let mut v = vec![-1];
            v.extend(active_levels(f).into_iter().filter(|&j| j >= 0));
            v
        }
        BesovKind::Restricted(set) => set.iter().copied().collect(),
    };
    let homogeneous = !matches!(kind, BesovKind::Inhomogeneous);
    let per_block: Vec<(i64, f64)> = js
        .par_iter()
        .map(|&j| {
            let bj = block(f, j, homogeneous);
            let nonzero = bj.iter_coeffs().any(|(_, c)| c.norm_sqr() > 0.0);
            let m = if nonzero { sup_norm(&bj) } else { 0.0 };
            (j, dyadic_weight(m, s, j))
        })
        .collect();
    let value = q.ell(per_block.iter().map(|(_, v)| *v));
    BlockedNorm { value, per_block }
}

/// `2^{js}·m`, rounding-free when `s` is a small integer.
fn dyadic_weight(m: f64, s: f64, j: i64) -> f64 {
    if s == 0.0 {
        m
    } else if s == s.trunc() && s.abs() < 60.0 {
        scale_exp2(m, j * s as i64)
    } else {
        m * (2.0f64).powf(s * j as f64)
    }
}

/// Homogeneous Fourier-Besov norm `ḞB^s_{1,r}`:
/// `ℓ^r` over levels of `2^{js}·L^{-d}Σ_k|φ(2^{-j}ξ)c_k|`.
pub fn fourier_besov_norm(f: &SpectralField, s: f64, r: QIndex) -> BlockedNorm {
    let weight = f.lattice().cell_weight();
    let mut per_level: BTreeMap<i64, f64> = BTreeMap::new();
    for (k, c) in f.iter_coeffs() {
        let rad = f.lattice().freq_norm(k.0);
        if rad == 0.0 {
            continue;
        }
        let a = c.norm();
        if a == 0.0 {
            continue;
        }
        let j0 = rad.log2().floor() as i64;
        for j in (j0 - 3)..=(j0 + 2) {
            let w = annulus_bump_at_level(j, rad);
            if w > 0.0 {
                *per_level.entry(j).or_insert(0.0) += w * a * weight;
            }
        }
    }
    let per_block: Vec<(i64, f64)> = per_level
        .into_iter()
        .map(|(j, m)| (j, dyadic_weight(m, s, j)))
        .collect();
    let value = r.ell(per_block.iter().map(|(_, v)| *v));
    BlockedNorm { value, per_block }
}

/// Discrete Sobolev norm `(Σ_k (1+|ξ|²)^s |c_k|²)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let mut sum = 0.0;
    for (k, c) in f.iter_coeffs() {
        let r2 = f.lattice().freq_norm_sq(k.0);
        sum += (1.0 + r2).powf(s) * c.norm_sqr();
    }
    sum.sqrt()
}

/// Time integrability inside a Chemin-Lerner norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeNorm {
    /// `L¹(0,T)` by trapezoid over the snapshot grid.
    L1,
    /// `L^∞(0,T)` as the max over snapshots.
    LInf,
}

/// Per-level time series of `L^{-d}Σ|φ(2^{-j}ξ)ĉ|`, fed snapshot by
/// snapshot. This is the memory-light path behind [`chemin_lerner_norm`];
/// experiments stream into it instead of materializing snapshot lists.
#[derive(Debug, Clone, Default)]
pub struct BlockSeriesAccumulator {
    times: Vec<f64>,
    series: BTreeMap<i64, Vec<f64>>,
}

impl BlockSeriesAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, f: &SpectralField) {
        let weight = f.lattice().cell_weight();
        let idx = self.times.len();
        self.times.push(t);
        for series in self.series.values_mut() {
            series.push(0.0);
        }
        for (k, c) in f.iter_coeffs() {
            let rad = f.lattice().freq_norm(k.0);
            if rad == 0.0 {
                continue;
            }
            let a = c.norm();
            if a == 0.0 {
                continue;
            }
            let j0 = rad.log2().floor() as i64;
            for j in (j0 - 3)..=(j0 + 2) {
                let w = annulus_bump_at_level(j, rad);
                if w > 0.0 {
                    let entry =
                        self.series.entry(j).or_insert_with(|| vec![0.0; idx + 1]);
                    if entry.len() < idx + 1 {
                        entry.resize(idx + 1, 0.0);
                    }
                    entry[idx] += w * a * weight;
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Aggregate into the Chemin-Lerner norm `L̃^λ_T(ḞB^s_{1,r})`.
    pub fn chemin_lerner(&self, lambda: TimeNorm, s: f64, r: QIndex) -> BlockedNorm {
        let per_block: Vec<(i64, f64)> = self
            .series
            .iter()
            .map(|(&j, vals)| {
                let m = match lambda {
                    TimeNorm::LInf => vals.iter().copied().fold(0.0, f64::max),
                    TimeNorm::L1 => trapezoid(&self.times, vals),
                };
                (j, dyadic_weight(m, s, j))
            })
            .collect();
        let value = r.ell(per_block.iter().map(|(_, v)| *v));
        BlockedNorm { value, per_block }
    }
}

fn trapezoid(times: &[f64], vals: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..times.len().min(vals.len()) {
        acc += 0.5 * (vals[i] + vals[i - 1]) * (times[i] - times[i - 1]);
    }
    acc
}

/// Chemin-Lerner norm of a snapshot list. Times must ascend within `[0, T]`.
pub fn chemin_lerner_norm(
    snapshots: &[(f64, SpectralField)],
    lambda: TimeNorm,
    s: f64,
    r: QIndex,
    t_final: f64,
) -> Result<BlockedNorm> {
    if snapshots.len() < 2 {
        return Err(Error::BadSnapshotTimes);
    }
    for w in snapshots.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::BadSnapshotTimes);
        }
    }
    if snapshots[0].0 < 0.0 || snapshots.last().unwrap().0 > t_final {
        return Err(Error::BadSnapshotTimes);
    }
    let mut acc = BlockSeriesAccumulator::new();
    for (t, f) in snapshots {
        acc.push(*t, f);
    }
    Ok(acc.chemin_lerner(lambda, s, r))
}

/// `D = ḞB⁰_{1,2}`.
pub fn d_norm(f: &SpectralField) -> f64 {
    fourier_besov_norm(f, 0.0, QIndex::Finite(2.0)).value
}

/// `S = max( L̃^∞_T ḞB⁰_{1,2}, L̃¹_T ḞB²_{1,2} )` over a snapshot set.
pub fn s_norm(acc: &BlockSeriesAccumulator) -> f64 {
    let a = acc.chemin_lerner(TimeNorm::LInf, 0.0, QIndex::Finite(2.0)).value;
    let b = acc.chemin_lerner(TimeNorm::L1, 2.0, QIndex::Finite(2.0)).value;
    a.max(b)
}

/// Ball-sampling parameters for the BMO and parabolic-cylinder norms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallSampling {
    pub centers_per_axis: usize,
    /// Dyadic radius levels: radii are `R_max · 2^{-p}`, `p = 0..levels`.
    pub radius_levels: usize,
    /// Cap on the evaluation grid per axis.
    pub max_grid: usize,
}

impl Default for BallSampling {
    fn default() -> Self {
        Self { centers_per_axis: 16, radius_levels: 8, max_grid: 1 << 16 }
    }
}

impl BallSampling {
    pub fn dyadic_radii(&self, r_max: f64) -> Vec<f64> {
        (0..self.radius_levels).map(|p| r_max * scale_exp2(1.0, -(p as i64))).collect()
    }
}

/// Sampled lower approximation of the BMO norm: max over sampled balls
/// `B(x,R)` of the mean of `|f - mean_B f|` over the ball.
///
/// Dense fields (and sparse ones whose Nyquist grid fits `max_grid`) use a
/// shared global grid; wider sparse fields fall back to direct evaluation
/// on a fixed number of points per ball, so the ball means stay honest at
/// any bandwidth.
pub fn bmo_norm_approx(f: &SpectralField, sampling: &BallSampling) -> f64 {
    let dim = f.dim();
    let ext = f.support_extent();
    let needs = (2 * (2 * ext[..dim].iter().map(|e| e.unsigned_abs()).max().unwrap_or(0) as usize
        + 1))
        .next_power_of_two();
    if f.is_sparse() && needs > sampling.max_grid.next_power_of_two() {
        return bmo_sampled_points(f, sampling);
    }
    let m = bounded_grid(f, sampling.max_grid);
    let samples = samples_on_grid(f, m);
    let reals: Vec<f64> = samples.iter().map(|c| c.re).collect();
    let period = f.lattice().period();
    let radii = sampling.dyadic_radii(period / 2.0);
    let dims = &m[..dim];
    let mut worst = 0.0f64;
    for ci in ball_centers(dims, sampling.centers_per_axis) {
        for &radius in &radii {
            let idxs = ball_indices(dims, &ci, radius, period);
            if idxs.is_empty() {
                continue;
            }
            let mean: f64 = idxs.iter().map(|&i| reals[i]).sum::<f64>() / idxs.len() as f64;
            let osc: f64 =
                idxs.iter().map(|&i| (reals[i] - mean).abs()).sum::<f64>() / idxs.len() as f64;
            worst = worst.max(osc);
        }
    }
    worst
}

/// Parabolic-cylinder norm: `sup_t t^{1/2}‖∇u(t)‖_∞` plus the sampled
/// Carleson part `max_{x,R≤√T} |B(x,R)|^{-1/2}·‖∇u‖_{L²([0,R²]×B(x,R))}`.
pub fn xt_norm(
    snapshots: &[(f64, SpectralField)],
    t_final: f64,
    sampling: &BallSampling,
) -> Result<f64> {
    let (sup_term, carleson) = xt_norm_parts(snapshots, t_final, sampling)?;
    Ok(sup_term + carleson)
}

/// The two constituents of [`xt_norm`]: `(sup_t √t‖∇u‖_∞, Carleson part)`.
pub fn xt_norm_parts(
    snapshots: &[(f64, SpectralField)],
    t_final: f64,
    sampling: &BallSampling,
) -> Result<(f64, f64)> {
    if snapshots.is_empty() {
        return Err(Error::EmptySnapshots);
    }
    let dim = snapshots[0].1.dim();
    let period = snapshots[0].1.lattice().period();

    // sup_t √t‖∇u‖_∞ and per-snapshot |∇u|² samples on a shared grid.
    let m = snapshots
        .iter()
        .map(|(_, f)| bounded_grid(f, sampling.max_grid))
        .fold([8usize, 1, 1], |acc, g| {
            let mut out = acc;
            for a in 0..3 {
                out[a] = out[a].max(g[a]);
            }
            out
        });
    let mut sup_term = 0.0f64;
    let mut grad_sq: Vec<Vec<f64>> = Vec::with_capacity(snapshots.len());
    for (t, f) in snapshots {
        let mut sq: Vec<f64> = vec![0.0; m[..dim].iter().product()];
        for axis in 0..dim {
            let d = partial_derivative(f, axis)?;
            let s = samples_on_grid(&d, m);
            for (slot, v) in sq.iter_mut().zip(&s) {
                *slot += v.norm_sqr();
            }
        }
        let grad_sup = sq.iter().copied().fold(0.0f64, f64::max).sqrt();
        if *t > 0.0 {
            sup_term = sup_term.max(t.sqrt() * grad_sup);
        }
        grad_sq.push(sq);
    }

    // Carleson part over sampled centers and dyadic radii R ≤ √T.
    let dims = &m[..dim];
    let cell_vol = (period / m[0] as f64).powi(dim as i32);
    let mut carleson = 0.0f64;
    for &radius in &sampling.dyadic_radii(t_final.sqrt()) {
        let t_cut = radius * radius;
        for ci in ball_centers(dims, sampling.centers_per_axis) {
            let idxs = ball_indices(dims, &ci, radius, period);
            if idxs.is_empty() {
                continue;
            }
            // Space integral per snapshot, then trapezoid in time over
            // [0, t_cut]; the initial segment [0, t_first] uses the first
            // snapshot's value.
            let mut prev: Option<(f64, f64)> = None;
            let mut acc = 0.0f64;
            for ((t, _), sq) in snapshots.iter().zip(&grad_sq) {
                if *t > t_cut {
                    break;
                }
                let space: f64 = idxs.iter().map(|&i| sq[i]).sum::<f64>() * cell_vol;
                match prev {
                    None => acc += space * *t,
                    Some((tp, sp)) => acc += 0.5 * (space + sp) * (*t - tp),
                }
                prev = Some((*t, space));
            }
            let vol = ball_volume(dim, radius);
            carleson = carleson.max((acc / vol).sqrt());
        }
    }
    Ok((sup_term, carleson))
}

/// Point-sampled ball oscillations for sparse fields too wide for a global
/// grid: a fixed number of evenly spaced points per ball, evaluated by
/// direct summation.
fn bmo_sampled_points(f: &SpectralField, sampling: &BallSampling) -> f64 {
    let dim = f.dim();
    let period = f.lattice().period();
    let radii = sampling.dyadic_radii(period / 2.0);
    let per_axis = match dim {
        1 => 1024usize,
        2 => 40,
        _ => 12,
    };
    let centers = sampling.centers_per_axis.max(1);
    let mut worst = 0.0f64;
    for flat_center in 0..centers.pow(dim as u32) {
        let mut rem = flat_center;
        let mut x0 = [0.0f64; 3];
        for a in 0..dim {
            x0[a] = period * (rem % centers) as f64 / centers as f64;
            rem /= centers;
        }
        for &radius in &radii {
            let mut vals = Vec::new();
            for flat in 0..per_axis.pow(dim as u32) {
                let mut rem = flat;
                let mut x = x0;
                let mut r2 = 0.0;
                for a in 0..dim {
                    let off = radius * (2.0 * (rem % per_axis) as f64 / per_axis as f64 - 1.0);
                    rem /= per_axis;
                    x[a] += off;
                    r2 += off * off;
                }
                if r2 <= radius * radius {
                    vals.push(crate::spectral::eval_at_point(f, x).re);
                }
            }
            if vals.is_empty() {
                continue;
            }
            let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
            let osc: f64 =
                vals.iter().map(|v| (v - mean).abs()).sum::<f64>() / vals.len() as f64;
            worst = worst.max(osc);
        }
    }
    worst
}

/// `Y_T = X_T + L^∞_T(BMO)`.
pub fn yt_norm(
    snapshots: &[(f64, SpectralField)],
    t_final: f64,
    sampling: &BallSampling,
) -> Result<f64> {
    let xt = xt_norm(snapshots, t_final, sampling)?;
    let bmo = snapshots
        .iter()
        .map(|(_, f)| bmo_norm_approx(f, sampling))
        .fold(0.0f64, f64::max);
    Ok(xt + bmo)
}

fn ball_volume(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0 * r,
        2 => std::f64::consts::PI * r * r,
        _ => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
    }
}

fn bounded_grid(f: &SpectralField, max_grid: usize) -> [usize; 3] {
    let ext = f.support_extent();
    let mut m = [1usize; 3];
    for a in 0..f.dim() {
        let nyq = 2 * ext[a].unsigned_abs() as usize + 1;
        m[a] = (2 * nyq).next_power_of_two().clamp(8, max_grid.next_power_of_two());
    }
    m
}

fn ball_centers(dims: &[usize], centers_per_axis: usize) -> Vec<Vec<usize>> {
    let per_axis: Vec<Vec<usize>> = dims
        .iter()
        .map(|&m| {
            let c = centers_per_axis.min(m).max(1);
            (0..c).map(|i| i * m / c).collect()
        })
        .collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for axis in per_axis {
        let mut next = Vec::new();
        for base in &out {
            for &v in &axis {
                let mut b = base.clone();
                b.push(v);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Flat indices of grid points within Euclidean distance `radius` of the
/// center (torus metric).
fn ball_indices(dims: &[usize], center: &[usize], radius: f64, period: f64) -> Vec<usize> {
    let dim = dims.len();
    let dx: Vec<f64> = dims.iter().map(|&m| period / m as f64).collect();
    let half: Vec<i64> = dx.iter().map(|&d| (radius / d).floor() as i64).collect();
    let mut out = Vec::new();
    let mut offsets = vec![0i64; dim];
    loop {
        let dist_sq: f64 =
            offsets.iter().zip(&dx).map(|(&o, &d)| (o as f64 * d).powi(2)).sum();
        if dist_sq <= radius * radius {
            let mut flat = 0usize;
            for a in 0..dim {
                let idx = (center[a] as i64 + offsets[a]).rem_euclid(dims[a] as i64) as usize;
                flat = flat * dims[a] + idx;
            }
            out.push(flat);
        }
        // Odometer over the bounding box.
        let mut a = 0;
        loop {
            if a == dim {
                out.sort_unstable();
                out.dedup();
                return out;
            }
            offsets[a] += 1;
            if offsets[a] <= half[a] {
                break;
            }
            offsets[a] = -half[a];
            a += 1;
        }
    }
}

/// Norm selector for instantaneous (single-field) norms.
#[derive(Debug, Clone)]
pub enum NormSpec {
    Besov { s: f64, q: QIndex },
    BesovHomogeneous { s: f64, q: QIndex },
    BesovRestricted { s: f64, q: QIndex, index_set: BTreeSet<i64> },
    FourierBesov { s: f64, r: QIndex },
    Sobolev { s: f64 },
    BmoApprox(BallSampling),
    /// `D = ḞB⁰_{1,2}`.
    D,
}

impl NormSpec {
    pub fn evaluate(&self, f: &SpectralField) -> BlockedNorm {
        match self {
            NormSpec::Besov { s, q } => besov_norm(f, *s, *q, &BesovKind::Inhomogeneous),
            NormSpec::BesovHomogeneous { s, q } => besov_norm(f, *s, *q, &BesovKind::Homogeneous),
            NormSpec::BesovRestricted { s, q, index_set } => {
                besov_norm(f, *s, *q, &BesovKind::Restricted(index_set.clone()))
            }
            NormSpec::FourierBesov { s, r } => fourier_besov_norm(f, *s, *r),
            NormSpec::Sobolev { s } => BlockedNorm::scalar(sobolev_norm(f, *s)),
            NormSpec::BmoApprox(sampling) => BlockedNorm::scalar(bmo_norm_approx(f, sampling)),
            NormSpec::D => BlockedNorm::scalar(d_norm(f)),
        }
    }
}
