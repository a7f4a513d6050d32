use super::fit::FitResult;
use crate::error::Result;
use crate::lp::QIndex;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const REPORT_SCHEMA: &str = "hjlab-report/1";

/// One parameter point of an inflation sweep. Optional entries are absent
/// where a case does not produce them (empty CSV cells).
#[derive(Debug, Clone, Serialize)]
pub struct InflationRow {
    pub case: String,
    pub d: usize,
    pub q: QIndex,
    pub n: u32,
    pub delta: f64,
    pub t: f64,
    pub norm_in_besov: f64,
    pub norm_in_fb12: f64,
    pub norm_in_bmo: f64,
    pub norm_in_hs: f64,
    pub a2_block_norm: Option<f64>,
    pub a2_restricted_norm: Option<f64>,
    pub u_norm: Option<f64>,
    pub remainder_s: Option<f64>,
    pub remainder_y: Option<f64>,
    /// `‖u - A₁‖_S` (the quadratic remainder), where computed.
    pub remainder1_s: Option<f64>,
    /// Paired-family constituents, where computed.
    pub lemma31_min_ratio: Option<f64>,
    pub lemma32_value: Option<f64>,
    pub lemma33_value: Option<f64>,
    pub lemma34_ratio: Option<f64>,
    pub i1_closed_rel_err: Option<f64>,
    pub decomposition_rel_err: Option<f64>,
    pub certificates_passed: Option<bool>,
}

/// Report of a full sweep: rows, fitted exponents, pass flags, and the
/// parameter echo. Serialization is byte-deterministic for a fixed seed and
/// build.
#[derive(Debug, Clone, Serialize)]
pub struct InflationReport {
    pub schema: String,
    pub case: String,
    pub version: String,
    pub seed: u64,
    pub params: Value,
    pub rows: Vec<InflationRow>,
    pub fits: BTreeMap<String, FitResult>,
    pub passes: BTreeMap<String, bool>,
}

impl InflationReport {
    pub fn new(case: &str, seed: u64, params: Value) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            case: case.into(),
            version: code_version(),
            seed,
            params,
            rows: Vec::new(),
            fits: BTreeMap::new(),
            passes: BTreeMap::new(),
        }
    }

    /// Fixed-order CSV: the documented columns, then one `fit_*` column per
    /// fitted exponent (the per-sweep value repeated on every row).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header = String::from(
            "case,d,q,N,delta,t,norm_in_besov,norm_in_fb12,norm_in_bmo,\
             a2_block_norm,a2_restricted_norm,u_norm,remainder_S,remainder_Y",
        );
        for name in self.fits.keys() {
            let _ = write!(header, ",fit_{name}");
        }
        out.push_str(&header);
        out.push('\n');
        for row in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                row.case,
                row.d,
                row.q,
                row.n,
                fmt(row.delta),
                fmt(row.t),
                fmt(row.norm_in_besov),
                fmt(row.norm_in_fb12),
                fmt(row.norm_in_bmo),
                opt(row.a2_block_norm),
                opt(row.a2_restricted_norm),
                opt(row.u_norm),
                opt(row.remainder_s),
                opt(row.remainder_y),
            );
            for fit in self.fits.values() {
                let _ = write!(out, ",{}", fmt(fit.slope));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Result<Value> {
        Ok(serde_json::to_value(self)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()?)?;
        s.push('\n');
        Ok(s)
    }

    /// Write `report.csv` / `report.json` under `dir` per the requested
    /// formats; returns the written paths.
    pub fn emit(&self, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for fmt in formats {
            match fmt {
                ReportFormat::Csv => {
                    let path = dir.join("report.csv");
                    std::fs::write(&path, self.to_csv())?;
                    written.push(path);
                }
                ReportFormat::Json => {
                    let path = dir.join("report.json");
                    std::fs::write(&path, self.to_json_string()?)?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

pub fn code_version() -> String {
    format!("hjlab-{}", env!("CARGO_PKG_VERSION"))
}

/// Validate a JSON report against the `hjlab-report/1` schema. Returns a
/// list of violations (empty = valid).
pub fn validate_report_json(v: &Value) -> std::result::Result<(), String> {
    let obj = v.as_object().ok_or("report must be a JSON object")?;
    let schema = obj.get("schema").and_then(Value::as_str).ok_or("missing schema")?;
    if schema != REPORT_SCHEMA {
        return Err(format!("schema {schema:?} != {REPORT_SCHEMA:?}"));
    }
    for key in ["case", "version"] {
        if !obj.get(key).map(Value::is_string).unwrap_or(false) {
            return Err(format!("missing string field {key:?}"));
        }
    }
    if !obj.get("seed").map(Value::is_u64).unwrap_or(false) {
        return Err("missing u64 field \"seed\"".into());
    }
    let rows = obj.get("rows").and_then(Value::as_array).ok_or("missing rows array")?;
    for (i, row) in rows.iter().enumerate() {
        let r = row.as_object().ok_or_else(|| format!("row {i} must be an object"))?;
        for key in ["case", "q"] {
            if !r.get(key).map(Value::is_string).unwrap_or(false) {
                return Err(format!("row {i}: missing string {key:?}"));
            }
        }
        for key in ["d", "n"] {
            if !r.get(key).map(Value::is_u64).unwrap_or(false) {
                return Err(format!("row {i}: missing integer {key:?}"));
            }
        }
        for key in ["delta", "t", "norm_in_besov", "norm_in_fb12", "norm_in_bmo", "norm_in_hs"] {
            if !r.get(key).map(Value::is_number).unwrap_or(false) {
                return Err(format!("row {i}: missing number {key:?}"));
            }
        }
    }
    let fits = obj.get("fits").and_then(Value::as_object).ok_or("missing fits object")?;
    for (name, fit) in fits {
        let f = fit.as_object().ok_or_else(|| format!("fit {name:?} must be an object"))?;
        for key in ["slope", "intercept", "stderr"] {
            if !f.get(key).map(Value::is_number).unwrap_or(false) {
                return Err(format!("fit {name:?}: missing number {key:?}"));
            }
        }
    }
    let passes = obj.get("passes").and_then(Value::as_object).ok_or("missing passes object")?;
    for (name, flag) in passes {
        if !flag.is_boolean() {
            return Err(format!("pass flag {name:?} must be boolean"));
        }
    }
    Ok(())
}
