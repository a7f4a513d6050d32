use super::bump::sampled_bump;
use crate::error::{Error, Result};
use crate::lp::QIndex;
use crate::lp::partition::scale_exp2;
use crate::spectral::{FrequencyLattice, Mode, SpectralField};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeSet;

/// One modulated bump of a construction.
#[derive(Debug, Clone, Serialize)]
pub struct Atom {
    /// Lattice center of the bump.
    pub center: [i64; 3],
    /// Dyadic index (the summation index of its family).
    pub level: u32,
    /// Principal sign (`±2^N` for the paired family, `±2^j` otherwise).
    pub mu: i8,
    /// Secondary sign (`±2^ℓ`; 0 for the single-sign family).
    pub nu: i8,
    /// Spatial-shift phase scale: the coefficient at `ξ` carries
    /// `e^{i·phase_scale·ξ·ê}` (0 = no phase).
    pub phase_scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum ConstructionKind {
    /// `f̂(ξ) = (δ/√N)·Σ_{j=N}^{2N}[χ(ξ-2^jē) + χ(ξ+2^jē)]`, `ē = (1,..,1)`.
    HighQ { n: u32, delta: f64 },
    /// `f̂(ξ) = (δ/N^{1/2q})·Σ_{ℓ∈ℕ(N)}Σ_{μν} e^{i2^{ℓ+1}ξ·ē₁}χ(ξ-μ2^Nē₁-ν2^ℓē₁)`.
    LowQ { n: u32, delta: f64, q: f64, snap_displacement: f64 },
}

/// A built data family: the field plus enough atom metadata for the exact
/// support certificates.
#[derive(Debug, Clone)]
pub struct Construction {
    pub field: SpectralField,
    pub atoms: Vec<Atom>,
    pub kind: ConstructionKind,
    /// Per-atom normalization (`δ/√N` or `δ/N^{1/2q}`).
    pub amplitude: f64,
    /// Modulation direction scaled to the lattice (`ē·L` or the snapped
    /// `ē₁·L`), integer components.
    pub direction: [i64; 3],
}

impl Construction {
    /// Rebuild a single atom as a sparse field (with the construction's
    /// amplitude and phase convention).
    pub fn atom_field(&self, atom: &Atom) -> Result<SpectralField> {
        let lattice = *self.field.lattice();
        let l = lattice.inverse_spacing() as f64;
        let entries: Vec<(Mode, Complex64)> = sampled_bump(&lattice, atom.center)
            .into_iter()
            .map(|(k, v)| {
                let phase: f64 = (0..lattice.dim())
                    .map(|a| atom.phase_scale * (k.0[a] as f64 / l) * (self.direction[a] as f64 / l))
                    .sum();
                (k, Complex64::new(phase.cos(), phase.sin()) * self.amplitude * v)
            })
            .collect();
        SpectralField::from_modes(lattice, entries, false)
    }
}

/// Parameters of the single-sign high-frequency family.
#[derive(Debug, Clone, Serialize)]
pub struct HighQParams {
    pub n: u32,
    pub delta: f64,
    pub dim: usize,
    /// Lattice inverse spacing; 8 resolves the bump and puts every center
    /// on the lattice.
    pub lattice_l: i64,
}

impl HighQParams {
    pub fn new(n: u32, delta: f64, dim: usize) -> Self {
        Self { n, delta, dim, lattice_l: 8 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter {
                key: "N".into(),
                message: format!("N = {} must be >= 2", self.n),
            });
        }
        if self.n > 28 {
            return Err(Error::InvalidParameter {
                key: "N".into(),
                message: format!("N = {} exceeds the representable band (N <= 28)", self.n),
            });
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidParameter {
                key: "delta".into(),
                message: "delta must be positive".into(),
            });
        }
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter {
                key: "d".into(),
                message: format!("d = {} not in 1..=3", self.dim),
            });
        }
        Ok(())
    }
}

/// Build the high-frequency family: bumps at `±2^j·ē`, `j = N..=2N`,
/// amplitude `δ/√N`, real-valued by symmetry.
pub fn build_f_high(p: &HighQParams) -> Result<Construction> {
    p.validate()?;
    let l = p.lattice_l;
    let band = (1i64 << (2 * p.n)) * l + l;
    let lattice = FrequencyLattice::new(p.dim, l, band)?;
    let amp = p.delta / (p.n as f64).sqrt();
    let mut entries: Vec<(Mode, Complex64)> = Vec::new();
    let mut atoms = Vec::new();
    let mut direction = [0i64; 3];
    for a in direction.iter_mut().take(p.dim) {
        *a = l;
    }
    for j in p.n..=(2 * p.n) {
        for mu in [1i8, -1] {
            let mut center = [0i64; 3];
            for a in 0..p.dim {
                center[a] = mu as i64 * (1i64 << j) * l;
            }
            for (k, v) in sampled_bump(&lattice, center) {
                entries.push((k, Complex64::new(amp * v, 0.0)));
            }
            atoms.push(Atom { center, level: j, mu, nu: 0, phase_scale: 0.0 });
        }
    }
    let field = SpectralField::from_modes(lattice, entries, true)?;
    Ok(Construction {
        field,
        atoms,
        kind: ConstructionKind::HighQ { n: p.n, delta: p.delta },
        amplitude: amp,
        direction,
    })
}

/// Parameters of the paired (low-q) family.
#[derive(Debug, Clone, Serialize)]
pub struct LowQParams {
    /// Must be a multiple of 16.
    pub n: u32,
    pub delta: f64,
    /// Besov index `q ∈ [1, 2]` entering the normalization `δ/N^{1/2q}`.
    pub q: f64,
    pub dim: usize,
    /// Lattice inverse spacing; must be a multiple of 24 so the direction
    /// `17/(24√d)·(1,..,1)` snaps exactly in one dimension.
    pub lattice_l: i64,
}

impl LowQParams {
    pub fn new(n: u32, delta: f64, q: f64, dim: usize) -> Self {
        Self { n, delta, q, dim, lattice_l: 24 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 16 != 0 {
            return Err(Error::InvalidParameter {
                key: "N".into(),
                message: format!("N = {} rejected: N ∈ 16ℕ = {{16, 32, 48, …}}", self.n),
            });
        }
        if self.n > 56 {
            return Err(Error::InvalidParameter {
                key: "N".into(),
                message: format!("N = {} exceeds the representable band (N <= 56)", self.n),
            });
        }
        if !(1.0..=2.0).contains(&self.q) {
            return Err(Error::InvalidParameter {
                key: "q".into(),
                message: format!("q = {} must lie in [1, 2]", self.q),
            });
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidParameter {
                key: "delta".into(),
                message: "delta must be positive".into(),
            });
        }
        if self.lattice_l % 24 != 0 || self.lattice_l <= 0 {
            return Err(Error::InvalidParameter {
                key: "L".into(),
                message: format!("L = {} must be a positive multiple of 24", self.lattice_l),
            });
        }
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter {
                key: "d".into(),
                message: format!("d = {} not in 1..=3", self.dim),
            });
        }
        Ok(())
    }
}

/// The index set `ℕ(N) = {k ∈ 8ℕ : N/4 ≤ k ≤ N/2}` (requires `N ∈ 16ℕ`).
pub fn index_set(n: u32) -> Result<BTreeSet<i64>> {
    if n == 0 || n % 16 != 0 {
        return Err(Error::InvalidParameter {
            key: "N".into(),
            message: format!("N = {n} rejected: N ∈ 16ℕ"),
        });
    }
    let lo = (n as i64 + 3) / 4;
    let hi = n as i64 / 2;
    Ok((1..).map(|m| 8 * m).take_while(|&k| k <= hi).filter(|&k| k >= lo).collect())
}

/// Build the paired family: atoms `e^{i2^{ℓ+1}ξ·ē₁}·χ(ξ - μ2^Nē₁ - ν2^ℓē₁)`
/// for `ℓ ∈ ℕ(N)`, `μ,ν ∈ {±}`, amplitude `δ/N^{1/2q}`. The direction
/// `ē₁ = 17/(24√d)(1,..,1)` is snapped to the nearest lattice vector for
/// `d ≥ 2` (exact in one dimension); the displacement is recorded.
pub fn build_f_low(p: &LowQParams) -> Result<Construction> {
    p.validate()?;
    let l = p.lattice_l;
    let true_dir = 17.0 / (24.0 * (p.dim as f64).sqrt());
    let w = (true_dir * l as f64).round() as i64;
    let snap_displacement = (w as f64 / l as f64 - true_dir).abs();
    let band = ((1i64 << p.n) + (1i64 << (p.n / 2))) * w + l;
    let lattice = FrequencyLattice::new(p.dim, l, band)?;
    let amp = p.delta / (p.n as f64).powf(1.0 / (2.0 * p.q));
    let mut direction = [0i64; 3];
    for a in direction.iter_mut().take(p.dim) {
        *a = w;
    }
    let lf = l as f64;
    let mut entries: Vec<(Mode, Complex64)> = Vec::new();
    let mut atoms = Vec::new();
    for &ell in index_set(p.n)?.iter() {
        let phase_scale = scale_exp2(1.0, ell + 1);
        for mu in [1i8, -1] {
            for nu in [1i8, -1] {
                let mut center = [0i64; 3];
                for a in 0..p.dim {
                    center[a] =
                        mu as i64 * (1i64 << p.n) * direction[a] + nu as i64 * (1i64 << ell) * direction[a];
                }
                for (k, v) in sampled_bump(&lattice, center) {
                    let phase: f64 = (0..p.dim)
                        .map(|a| phase_scale * (k.0[a] as f64 / lf) * (direction[a] as f64 / lf))
                        .sum();
                    entries.push((
                        k,
                        Complex64::new(phase.cos(), phase.sin()) * (amp * v),
                    ));
                }
                atoms.push(Atom {
                    center,
                    level: ell as u32,
                    mu,
                    nu,
                    phase_scale,
                });
            }
        }
    }
    let field = SpectralField::from_modes(lattice, entries, true)?;
    Ok(Construction {
        field,
        atoms,
        kind: ConstructionKind::LowQ {
            n: p.n,
            delta: p.delta,
            q: p.q,
            snap_displacement,
        },
        amplitude: amp,
        direction,
    })
}

/// The blow-up time scale of each family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InflationCase {
    HighQ,
    LowQ,
}

impl InflationCase {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "highq" | "high-q" | "high" => Ok(InflationCase::HighQ),
            "lowq" | "low-q" | "low" => Ok(InflationCase::LowQ),
            other => Err(Error::InvalidParameter {
                key: "case".into(),
                message: format!("unknown case {other:?}"),
            }),
        }
    }
}

/// `t_N = 2^{-N}` for the high-frequency family, `t = δ·2^{-2N}` for the
/// paired family.
pub fn inflation_time(case: InflationCase, n: u32, delta: f64) -> f64 {
    match case {
        InflationCase::HighQ => scale_exp2(1.0, -(n as i64)),
        InflationCase::LowQ => scale_exp2(delta, -2 * (n as i64)),
    }
}

/// Besov-index gate for each family (`q > 2` incl. ∞ vs `q ∈ [1,2]`).
pub fn case_admits_q(case: InflationCase, q: QIndex) -> bool {
    match (case, q) {
        (InflationCase::HighQ, QIndex::Inf) => true,
        (InflationCase::HighQ, QIndex::Finite(v)) => v > 2.0,
        (InflationCase::LowQ, QIndex::Finite(v)) => (1.0..=2.0).contains(&v),
        (InflationCase::LowQ, QIndex::Inf) => false,
    }
}
