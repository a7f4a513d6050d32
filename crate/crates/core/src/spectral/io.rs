use super::field::{Mode, SpectralField};
use super::lattice::FrequencyLattice;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

/// Serialize a field as text: one line per stored mode,
/// `k_1 ... k_d re im`, sorted lexicographically by mode. Floats use the
/// shortest round-trip representation, so dumps are byte-deterministic.
pub fn write_coefficient_dump(field: &SpectralField) -> String {
    let dim = field.dim();
    let mut out = String::new();
    for (k, c) in field.iter_coeffs() {
        for a in 0..dim {
            let _ = write!(out, "{} ", k.0[a]);
        }
        let _ = writeln!(out, "{} {}", c.re, c.im);
    }
    out
}

/// Snapshot dump: the coefficient format preceded by a `# t <time>` header.
pub fn write_snapshot_dump(t: f64, field: &SpectralField) -> String {
    format!("# t {t}\n{}", write_coefficient_dump(field))
}

/// Parse a snapshot dump; returns the header time and the field.
pub fn parse_snapshot_dump(
    text: &str,
    lattice: FrequencyLattice,
) -> Result<(f64, SpectralField)> {
    let header = text.lines().next().unwrap_or("");
    let t = header
        .strip_prefix("# t ")
        .and_then(|v| v.trim().parse::<f64>().ok())
        .ok_or_else(|| Error::InvalidParameter {
            key: "snapshot header".into(),
            message: format!("expected `# t <time>`, got {header:?}"),
        })?;
    let field = parse_coefficient_dump(text, lattice)?;
    Ok((t, field))
}

/// Parse the text format written by [`write_coefficient_dump`].
pub fn parse_coefficient_dump(text: &str, lattice: FrequencyLattice) -> Result<SpectralField> {
    let dim = lattice.dim();
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != dim + 2 {
            return Err(Error::InvalidParameter {
                key: format!("line {}", lineno + 1),
                message: format!("expected {} fields, got {}", dim + 2, parts.len()),
            });
        }
        let mut k = [0i64; 3];
        for a in 0..dim {
            k[a] = parts[a].parse().map_err(|e| Error::InvalidParameter {
                key: format!("line {}", lineno + 1),
                message: format!("bad mode index: {e}"),
            })?;
        }
        let re: f64 = parts[dim].parse().map_err(|e| Error::InvalidParameter {
            key: format!("line {}", lineno + 1),
            message: format!("bad re: {e}"),
        })?;
        let im: f64 = parts[dim + 1].parse().map_err(|e| Error::InvalidParameter {
            key: format!("line {}", lineno + 1),
            message: format!("bad im: {e}"),
        })?;
        entries.push((Mode(k), Complex64::new(re, im)));
    }
    let mut f = SpectralField::from_modes(lattice, entries, false)?;
    let real = f.hermitian_defect() == 0.0;
    f.set_real(real);
    Ok(f)
}
