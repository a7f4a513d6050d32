use super::lattice::FrequencyLattice;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Integer frequency index. Components beyond the lattice dimension are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode(pub [i64; 3]);

impl Mode {
    pub fn zero() -> Self {
        Mode([0, 0, 0])
    }

    pub fn neg(&self) -> Self {
        Mode([-self.0[0], -self.0[1], -self.0[2]])
    }

    pub fn add(&self, other: &Mode) -> Self {
        Mode([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|k| k.abs()).max().unwrap()
    }
}

/// Coefficient storage.
#[derive(Debug, Clone)]
pub enum Repr {
    /// Row-major array over `k ∈ [-band, band]^d`.
    Dense(Vec<Complex64>),
    /// Sorted, key-unique `(k, c)` list. May contain explicit zeros (exact
    /// support bookkeeping for convolutions).
    Sparse(Vec<(Mode, Complex64)>),
}

/// A band-limited function represented by its Fourier coefficients,
/// `u(x) = Σ_k c_k e^{i(k/L)·x}`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    lattice: FrequencyLattice,
    /// Max `|k_i|` the representation covers (dense array half-extent; bound
    /// on sparse keys). Always `≤ lattice.band_limit()`.
    band: i64,
    repr: Repr,
    /// Hermitian-symmetry promise: `c_{-k} = conj(c_k)`.
    real: bool,
}

impl SpectralField {
    pub fn zero_dense(lattice: FrequencyLattice, band: i64) -> Result<Self> {
        check_band(&lattice, band)?;
        let n = dense_len(lattice.dim(), band);
        Ok(Self { lattice, band, repr: Repr::Dense(vec![Complex64::ZERO; n]), real: true })
    }

    pub fn zero_sparse(lattice: FrequencyLattice) -> Self {
        Self { lattice, band: 0, repr: Repr::Sparse(Vec::new()), real: true }
    }

    /// Assemble a dense field from a prepared coefficient array
    /// (row-major over `k ∈ [-band, band]^d`).
    pub fn from_dense_parts(
        lattice: FrequencyLattice,
        band: i64,
        coeffs: Vec<Complex64>,
        real: bool,
    ) -> Result<Self> {
        check_band(&lattice, band)?;
        if coeffs.len() != dense_len(lattice.dim(), band) {
            return Err(Error::InvalidLattice(format!(
                "dense array length {} does not match band {band}",
                coeffs.len()
            )));
        }
        Ok(Self { lattice, band, repr: Repr::Dense(coeffs), real })
    }

    /// Build a sparse field from mode/coefficient pairs. Duplicate keys are
    /// accumulated; keys are sorted lexicographically.
    pub fn from_modes(
        lattice: FrequencyLattice,
        entries: impl IntoIterator<Item = (Mode, Complex64)>,
        real: bool,
    ) -> Result<Self> {
        let mut map: BTreeMap<Mode, Complex64> = BTreeMap::new();
        for (k, c) in entries {
            if !lattice.contains(k.0) {
                return Err(Error::BandOverflow { mode: k.0, limit: lattice.band_limit() });
            }
            *map.entry(k).or_insert(Complex64::ZERO) += c;
        }
        let band = map.keys().map(|k| k.max_abs()).max().unwrap_or(0);
        Ok(Self { lattice, band, repr: Repr::Sparse(map.into_iter().collect()), real })
    }

    pub fn from_sorted_sparse(
        lattice: FrequencyLattice,
        entries: Vec<(Mode, Complex64)>,
        real: bool,
    ) -> Result<Self> {
        let mut band = 0;
        for w in entries.windows(2) {
            debug_assert!(w[0].0 < w[1].0, "sparse keys must be sorted and unique");
        }
        for (k, _) in &entries {
            if !lattice.contains(k.0) {
                return Err(Error::BandOverflow { mode: k.0, limit: lattice.band_limit() });
            }
            band = band.max(k.max_abs());
        }
        Ok(Self { lattice, band, repr: Repr::Sparse(entries), real })
    }

    /// Constant field (single `k = 0` coefficient).
    pub fn constant(lattice: FrequencyLattice, c: Complex64) -> Self {
        let real = c.im == 0.0;
        Self {
            lattice,
            band: 0,
            repr: Repr::Sparse(vec![(Mode::zero(), c)]),
            real,
        }
    }

    /// A real cosine `a·cos((k/L)·x)` stored as the Hermitian pair `±k`.
    pub fn cosine(lattice: FrequencyLattice, k: [i64; 3], amplitude: f64) -> Result<Self> {
        let half = Complex64::new(amplitude / 2.0, 0.0);
        Self::from_modes(lattice, [(Mode(k), half), (Mode(k).neg(), half)], true)
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn band(&self) -> i64 {
        self.band
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn is_sparse(&self) -> bool {
        !self.is_dense()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Number of stored coefficients.
    pub fn stored_len(&self) -> usize {
        match &self.repr {
            Repr::Dense(v) => v.len(),
            Repr::Sparse(v) => v.len(),
        }
    }

    /// Coefficient at `k` (zero outside the stored set).
    pub fn coeff(&self, k: Mode) -> Complex64 {
        match &self.repr {
            Repr::Dense(v) => {
                if k.max_abs() > self.band {
                    Complex64::ZERO
                } else {
                    v[dense_index(self.dim(), self.band, k)]
                }
            }
            Repr::Sparse(v) => match v.binary_search_by(|(m, _)| m.cmp(&k)) {
                Ok(i) => v[i].1,
                Err(_) => Complex64::ZERO,
            },
        }
    }

    /// Iterate stored `(mode, coefficient)` pairs. Dense iteration skips
    /// exact zeros.
    pub fn iter_coeffs(&self) -> Box<dyn Iterator<Item = (Mode, Complex64)> + '_> {
        match &self.repr {
            Repr::Dense(v) => {
                let dim = self.dim();
                let band = self.band;
                Box::new(
                    v.iter()
                        .enumerate()
                        .filter(|(_, c)| **c != Complex64::ZERO)
                        .map(move |(i, c)| (dense_mode(dim, band, i), *c)),
                )
            }
            Repr::Sparse(v) => Box::new(v.iter().map(|(k, c)| (*k, *c))),
        }
    }

    /// Per-axis max `|k_i|` over stored nonzero coefficients.
    pub fn support_extent(&self) -> [i64; 3] {
        let mut ext = [0i64; 3];
        for (k, c) in self.iter_coeffs() {
            if c != Complex64::ZERO {
                for a in 0..3 {
                    ext[a] = ext[a].max(k.0[a].abs());
                }
            }
        }
        ext
    }

    /// Min and max `|ξ|` over stored nonzero coefficients with `k ≠ 0`.
    /// Returns `None` when no such mode exists.
    pub fn freq_range(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (k, c) in self.iter_coeffs() {
            if c == Complex64::ZERO || k == Mode::zero() {
                continue;
            }
            let r = self.lattice.freq_norm(k.0);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if hi == 0.0 {
            None
        } else {
            Some((lo, hi))
        }
    }

    /// Convert to sparse, keeping only nonzero coefficients.
    pub fn to_sparse(&self) -> SpectralField {
        match &self.repr {
            Repr::Sparse(_) => self.clone(),
            Repr::Dense(_) => {
                let entries: Vec<_> = self.iter_coeffs().collect();
                SpectralField {
                    lattice: self.lattice,
                    band: entries.iter().map(|(k, _)| k.max_abs()).max().unwrap_or(0),
                    repr: Repr::Sparse(entries),
                    real: self.real,
                }
            }
        }
    }

    /// Convert to a dense array of half-extent `band` (coefficients outside
    /// are dropped only if exactly zero; otherwise an error).
    pub fn to_dense(&self, band: i64) -> Result<SpectralField> {
        check_band(&self.lattice, band)?;
        let mut out = vec![Complex64::ZERO; dense_len(self.dim(), band)];
        for (k, c) in self.iter_coeffs() {
            if k.max_abs() > band {
                if c != Complex64::ZERO {
                    return Err(Error::BandOverflow { mode: k.0, limit: band });
                }
                continue;
            }
            out[dense_index(self.dim(), band, k)] = c;
        }
        Ok(SpectralField { lattice: self.lattice, band, repr: Repr::Dense(out), real: self.real })
    }

    /// Apply a real multiplier `m(ξ)`; representation kind is preserved.
    pub fn apply_multiplier(&self, m: impl Fn([f64; 3]) -> f64) -> SpectralField {
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Dense(v) => {
                let dim = self.dim();
                let band = self.band;
                for (i, c) in v.iter_mut().enumerate() {
                    if *c != Complex64::ZERO {
                        *c *= m(self.lattice.freq(dense_mode(dim, band, i).0));
                    }
                }
            }
            Repr::Sparse(v) => {
                for (k, c) in v.iter_mut() {
                    *c *= m(self.lattice.freq(k.0));
                }
            }
        }
        out
    }

    /// Apply a complex multiplier. `preserves_reality` should be set when
    /// `m(-ξ) = conj(m(ξ))`.
    pub fn apply_multiplier_complex(
        &self,
        m: impl Fn([f64; 3]) -> Complex64,
        preserves_reality: bool,
    ) -> SpectralField {
        let mut out = self.clone();
        out.real = self.real && preserves_reality;
        match &mut out.repr {
            Repr::Dense(v) => {
                let dim = self.dim();
                let band = self.band;
                for (i, c) in v.iter_mut().enumerate() {
                    if *c != Complex64::ZERO {
                        *c *= m(self.lattice.freq(dense_mode(dim, band, i).0));
                    }
                }
            }
            Repr::Sparse(v) => {
                for (k, c) in v.iter_mut() {
                    *c *= m(self.lattice.freq(k.0));
                }
            }
        }
        out
    }

    /// Coefficient-wise linear combination `self + s·other`.
    pub fn add_scaled(&self, other: &SpectralField, s: Complex64) -> Result<SpectralField> {
        let mut map: BTreeMap<Mode, Complex64> = self.iter_coeffs().collect();
        for (k, c) in other.iter_coeffs() {
            *map.entry(k).or_insert(Complex64::ZERO) += s * c;
        }
        let real = self.real && other.real && s.im == 0.0;
        let lattice = if other.lattice.band_limit() > self.lattice.band_limit() {
            other.lattice
        } else {
            self.lattice
        };
        let mut f =
            SpectralField::from_sorted_sparse(lattice, map.into_iter().collect(), real)?;
        if self.is_dense() && other.is_dense() {
            f = f.to_dense(self.band.max(other.band))?;
        }
        Ok(f)
    }

    pub fn scale(&self, s: Complex64) -> SpectralField {
        let mut out = self.clone();
        out.real = self.real && s.im == 0.0;
        match &mut out.repr {
            Repr::Dense(v) => v.iter_mut().for_each(|c| *c *= s),
            Repr::Sparse(v) => v.iter_mut().for_each(|(_, c)| *c *= s),
        }
        out
    }

    /// `Σ_k |c_k|`.
    pub fn coeff_l1(&self) -> f64 {
        match &self.repr {
            Repr::Dense(v) => v.iter().map(|c| c.norm()).sum(),
            Repr::Sparse(v) => v.iter().map(|(_, c)| c.norm()).sum(),
        }
    }

    /// `Σ_k |c_k|²`.
    pub fn coeff_l2_sq(&self) -> f64 {
        match &self.repr {
            Repr::Dense(v) => v.iter().map(|c| c.norm_sqr()).sum(),
            Repr::Sparse(v) => v.iter().map(|(_, c)| c.norm_sqr()).sum(),
        }
    }

    /// Max coefficient-wise difference `max_k |self_k - other_k|`.
    pub fn coeff_max_diff(&self, other: &SpectralField) -> f64 {
        let mut keys: BTreeMap<Mode, Complex64> = self.iter_coeffs().collect();
        for (k, c) in other.iter_coeffs() {
            *keys.entry(k).or_insert(Complex64::ZERO) -= c;
        }
        keys.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// ℓ¹ coefficient distance `Σ_k |self_k - other_k|`.
    pub fn coeff_l1_diff(&self, other: &SpectralField) -> f64 {
        let mut keys: BTreeMap<Mode, Complex64> = self.iter_coeffs().collect();
        for (k, c) in other.iter_coeffs() {
            *keys.entry(k).or_insert(Complex64::ZERO) -= c;
        }
        keys.values().map(|c| c.norm()).sum()
    }

    /// Truncate to `|k_i| ≤ band`, dropping outside coefficients.
    /// Representation kind is preserved.
    pub fn truncated(&self, band: i64) -> Result<SpectralField> {
        let lattice = if band <= self.lattice.band_limit() {
            self.lattice
        } else {
            self.lattice.with_band_limit(band)?
        };
        match &self.repr {
            Repr::Dense(_) => {
                let mut out = vec![Complex64::ZERO; dense_len(self.dim(), band)];
                for (k, c) in self.iter_coeffs() {
                    if k.max_abs() <= band {
                        out[dense_index(self.dim(), band, k)] = c;
                    }
                }
                SpectralField::from_dense_parts(lattice, band, out, self.real)
            }
            Repr::Sparse(v) => {
                let entries: Vec<(Mode, Complex64)> =
                    v.iter().filter(|(k, _)| k.max_abs() <= band).cloned().collect();
                SpectralField::from_sorted_sparse(lattice, entries, self.real)
            }
        }
    }

    /// Largest violation of Hermitian symmetry `|c_{-k} - conj(c_k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in self.iter_coeffs() {
            let mirror = self.coeff(k.neg());
            worst = worst.max((mirror - c.conj()).norm());
        }
        worst
    }
}

pub(crate) fn check_band(lattice: &FrequencyLattice, band: i64) -> Result<()> {
    if band < 0 || band > lattice.band_limit() {
        return Err(Error::BandOverflow {
            mode: [band, 0, 0],
            limit: lattice.band_limit(),
        });
    }
    Ok(())
}

pub(crate) fn dense_len(dim: usize, band: i64) -> usize {
    let n = (2 * band + 1) as usize;
    n.pow(dim as u32)
}

pub(crate) fn dense_index(dim: usize, band: i64, k: Mode) -> usize {
    let n = (2 * band + 1) as usize;
    let mut idx = 0usize;
    for a in 0..dim {
        idx = idx * n + (k.0[a] + band) as usize;
    }
    idx
}

pub(crate) fn dense_mode(dim: usize, band: i64, mut idx: usize) -> Mode {
    let n = (2 * band + 1) as usize;
    let mut k = [0i64; 3];
    for a in (0..dim).rev() {
        k[a] = (idx % n) as i64 - band;
        idx /= n;
    }
    Mode(k)
}
