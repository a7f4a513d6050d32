//! Flat `key = value` configuration files. Keys mirror the experiment
//! configuration fields; command-line flags override file values.

use std::collections::BTreeMap;

pub const KNOWN_KEYS: &[&str] = &[
    "case",
    "N",
    "delta",
    "q",
    "d",
    "T",
    "steps",
    "snapshot_count",
    "snapshot_span",
    "seed",
    "tolerance",
    "out_dir",
    "stretch",
    "compute_y",
    "trials",
    "lemma",
    "amplitude",
    "sobolev_s",
    "centers_per_axis",
    "radius_levels",
    "max_grid",
    "flat",
];

/// Parse `key = value` lines (blank lines and `#` comments allowed).
/// Unknown keys are rejected by name.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(format!("config line {}: unknown key {key:?}", lineno + 1));
        }
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}
