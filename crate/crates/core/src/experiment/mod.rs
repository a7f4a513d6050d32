//! Experiment orchestration: the two inflation sweeps, the inequality
//! verifiers, the solver cross-validation, exponent fits, and report
//! emission.

mod config;
mod crossval;
mod fit;
mod highq;
mod lowq;
mod report;
mod verify;

#[cfg(test)]
mod tests;

pub use config::{ExperimentCase, ExperimentConfig};
pub use crossval::{cross_validate_solvers, CrossValReport, CrossValRow};
pub use fit::{fit_loglog, FitResult};
pub use highq::run_highq_inflation;
pub use lowq::run_lowq_inflation;
pub use report::{
    code_version, validate_report_json, InflationReport, InflationRow, ReportFormat,
    REPORT_SCHEMA,
};
pub use verify::{
    verify_bilinear_24, verify_lemma, verify_log_interpolation_26, verify_smoothing_21,
    RatioReport,
};
