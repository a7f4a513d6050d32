use super::families::{Atom, Construction, ConstructionKind};
use crate::error::{Error, Result};
use crate::lp::block;
use crate::spectral::{partial_derivative, sparse_convolve, Mode, SpectralField};
use num_complex::Complex64;
use serde::Serialize;

/// Frequency-support facts verified with zero tolerance by exact sparse
/// convolution of the construction's atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SupportFact {
    /// Same-sign and level-mismatched cross products of the single-sign
    /// family avoid the ball `B(0, 1/2)`.
    Hq33,
    /// Level-mismatched plus-major × minus-major products with
    /// `max{ℓ,m} > j` land in the annulus `{3·2^j ≤ |ξ| ≤ 2^{N+j}}`.
    Lq39,
    /// The same products with `max{ℓ,m} < j` land in `2^j·B(0, 1/2)`.
    Lq310,
    /// The same-level block identity: `Δ_j` of the four mixed products
    /// equals the two annulus-supported ones, coefficient-exactly.
    Lq311,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub mode: [i64; 3],
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub fact: SupportFact,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

impl CertificateReport {
    fn new(fact: SupportFact, pairs_checked: usize, violations: Vec<Violation>) -> Self {
        let passed = violations.is_empty();
        Self { fact, pairs_checked, violations, passed }
    }
}

/// Verify one support fact against the atoms of a built construction.
pub fn support_certificate(c: &Construction, fact: SupportFact) -> Result<CertificateReport> {
    match (fact, &c.kind) {
        (SupportFact::Hq33, ConstructionKind::HighQ { .. }) => hq_33(c),
        (SupportFact::Lq39, ConstructionKind::LowQ { n, .. }) => lq_cross(c, *n, fact),
        (SupportFact::Lq310, ConstructionKind::LowQ { n, .. }) => lq_cross(c, *n, fact),
        (SupportFact::Lq311, ConstructionKind::LowQ { n, .. }) => lq_311(c, *n),
        _ => Err(Error::InvalidParameter {
            key: "fact".into(),
            message: format!("{fact:?} does not apply to this construction"),
        }),
    }
}

/// Run every fact applicable to the construction.
pub fn certify_all(c: &Construction) -> Result<Vec<CertificateReport>> {
    match &c.kind {
        ConstructionKind::HighQ { .. } => Ok(vec![support_certificate(c, SupportFact::Hq33)?]),
        ConstructionKind::LowQ { .. } => Ok(vec![
            support_certificate(c, SupportFact::Lq39)?,
            support_certificate(c, SupportFact::Lq310)?,
            support_certificate(c, SupportFact::Lq311)?,
        ]),
    }
}

fn hq_33(c: &Construction) -> Result<CertificateReport> {
    let l = c.field.lattice().inverse_spacing() as f64;
    let mut pairs = 0usize;
    let mut violations = Vec::new();
    for (i, a) in c.atoms.iter().enumerate() {
        for b in &c.atoms[i..] {
            let same_sign = a.mu == b.mu;
            let mismatched = a.mu != b.mu && a.level != b.level;
            if !(same_sign || mismatched) {
                continue;
            }
            pairs += 1;
            let conv = sparse_convolve(&c.atom_field(a)?, &c.atom_field(b)?, true)?;
            collect_violations(&conv, &mut violations, |k| norm_over(k, l) < 0.5);
        }
    }
    Ok(CertificateReport::new(SupportFact::Hq33, pairs, violations))
}

fn lq_cross(c: &Construction, n: u32, fact: SupportFact) -> Result<CertificateReport> {
    let l = c.field.lattice().inverse_spacing() as f64;
    let levels: Vec<u32> = {
        let mut v: Vec<u32> = c.atoms.iter().map(|a| a.level).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut pairs = 0usize;
    let mut violations = Vec::new();
    for &j in &levels {
        for &la in &levels {
            for &lb in &levels {
                if la == lb {
                    continue;
                }
                let max_lm = la.max(lb);
                let applies = match fact {
                    SupportFact::Lq39 => max_lm > j,
                    SupportFact::Lq310 => max_lm < j,
                    _ => unreachable!(),
                };
                if !applies {
                    continue;
                }
                for nu_a in [1i8, -1] {
                    for nu_b in [1i8, -1] {
                        let a = find_atom(c, la, 1, nu_a)?;
                        let b = find_atom(c, lb, -1, nu_b)?;
                        pairs += 1;
                        let da = partial_derivative(&c.atom_field(a)?, 0)?;
                        let db = partial_derivative(&c.atom_field(b)?, 0)?;
                        let conv = sparse_convolve(&da, &db, true)?;
                        let lo = 3.0 * (2.0f64).powi(j as i32);
                        let hi = (2.0f64).powi((n + j) as i32);
                        match fact {
                            SupportFact::Lq39 => collect_violations(&conv, &mut violations, |k| {
                                let r = norm_over(k, l);
                                !(lo..=hi).contains(&r)
                            }),
                            SupportFact::Lq310 => {
                                let cut = (2.0f64).powi(j as i32 - 1);
                                collect_violations(&conv, &mut violations, |k| {
                                    norm_over(k, l) >= cut
                                })
                            }
                            _ => unreachable!(),
                        }
                    }
                }
            }
        }
    }
    Ok(CertificateReport::new(fact, pairs, violations))
}

fn lq_311(c: &Construction, _n: u32) -> Result<CertificateReport> {
    let levels: Vec<u32> = {
        let mut v: Vec<u32> = c.atoms.iter().map(|a| a.level).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut pairs = 0usize;
    let mut violations = Vec::new();
    for &j in &levels {
        // The four mixed same-level products and the two that survive Δ_j.
        let combos = [(1i8, 1i8, -1i8, 1i8), (1, 1, -1, -1), (1, -1, -1, 1), (1, -1, -1, -1)];
        let keep = [(1i8, 1i8, -1i8, 1i8), (1, -1, -1, -1)];
        let four = sum_products(c, j, &combos)?;
        let two = sum_products(c, j, &keep)?;
        pairs += combos.len();
        let blocked = block(&four, j as i64, false);
        let mut diff_keys: std::collections::BTreeMap<Mode, Complex64> =
            blocked.iter_coeffs().collect();
        for (k, v) in two.iter_coeffs() {
            *diff_keys.entry(k).or_insert(Complex64::ZERO) -= v;
        }
        for (k, v) in diff_keys {
            if v != Complex64::ZERO {
                violations.push(Violation { mode: k.0, magnitude: v.norm() });
            }
        }
    }
    Ok(CertificateReport::new(SupportFact::Lq311, pairs, violations))
}

/// `Σ ∂Φ^{μν}·∂Φ^{μ'ν'}` over the listed sign combinations at level `j`,
/// accumulated in a fixed order so identical sub-sums agree bitwise.
fn sum_products(
    c: &Construction,
    j: u32,
    combos: &[(i8, i8, i8, i8)],
) -> Result<SpectralField> {
    let mut acc: Option<SpectralField> = None;
    for &(mu_a, nu_a, mu_b, nu_b) in combos {
        let a = find_atom(c, j, mu_a, nu_a)?;
        let b = find_atom(c, j, mu_b, nu_b)?;
        let da = partial_derivative(&c.atom_field(a)?, 0)?;
        let db = partial_derivative(&c.atom_field(b)?, 0)?;
        let prod = sparse_convolve(&da, &db, true)?;
        acc = Some(match acc {
            None => prod,
            Some(s) => s.add_scaled(&prod, Complex64::new(1.0, 0.0))?,
        });
    }
    acc.ok_or_else(|| Error::InvalidParameter {
        key: "combos".into(),
        message: "empty product list".into(),
    })
}

fn find_atom<'a>(c: &'a Construction, level: u32, mu: i8, nu: i8) -> Result<&'a Atom> {
    c.atoms
        .iter()
        .find(|a| a.level == level && a.mu == mu && a.nu == nu)
        .ok_or_else(|| Error::InvalidParameter {
            key: "atom".into(),
            message: format!("no atom at level {level} with signs ({mu}, {nu})"),
        })
}

fn collect_violations(
    conv: &SpectralField,
    out: &mut Vec<Violation>,
    forbidden: impl Fn(&Mode) -> bool,
) {
    for (k, v) in conv.iter_coeffs() {
        if v != Complex64::ZERO && forbidden(&k) {
            out.push(Violation { mode: k.0, magnitude: v.norm() });
        }
    }
}

fn norm_over(k: &Mode, l: f64) -> f64 {
    let x = k.0[0] as f64 / l;
    let y = k.0[1] as f64 / l;
    let z = k.0[2] as f64 / l;
    (x * x + y * y + z * z).sqrt()
}
