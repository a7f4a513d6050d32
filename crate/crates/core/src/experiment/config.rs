use crate::error::{Error, Result};
use crate::lp::{BallSampling, QIndex};
use crate::solver::SolverConfig;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExperimentCase {
    HighQ,
    LowQ,
    Verify,
    Solve,
}

/// Shared sweep configuration; the CLI mirrors these fields as flags and
/// flat config-file keys.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub case: ExperimentCase,
    pub n_list: Vec<u32>,
    pub delta_list: Vec<f64>,
    pub q_list: Vec<QIndex>,
    pub dim: usize,
    pub solver: SolverConfig,
    pub sampling: BallSampling,
    /// Sobolev exponent for the reported `H^s` norms (`s > 1 + d/2`).
    pub sobolev_s: f64,
    /// Where reports land. Run environment, not an experiment parameter:
    /// excluded from the serialized parameter echo so identical sweeps
    /// produce identical reports wherever they write.
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Run the dense full-solution check on the paired family (slow).
    pub stretch: bool,
    /// Compute the parabolic-cylinder remainder norm (slow).
    pub compute_y: bool,
    /// Verifier trial count.
    pub trials: usize,
    /// Verifier selector ("2.4", "2.1-smoothing", "2.6").
    pub lemma: String,
    /// Initial amplitude for the solver cross-validation case.
    pub amplitude: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            case: ExperimentCase::HighQ,
            n_list: vec![4, 5, 6, 7, 8, 9],
            delta_list: vec![0.1],
            q_list: vec![QIndex::Inf],
            dim: 1,
            solver: SolverConfig::default(),
            sampling: BallSampling::default(),
            sobolev_s: 2.1,
            out_dir: PathBuf::from("out"),
            seed: 42,
            stretch: false,
            compute_y: false,
            trials: 200,
            lemma: "2.4".into(),
            amplitude: 0.3,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::InvalidParameter {
                key: "N".into(),
                message: "empty N list".into(),
            });
        }
        if self.delta_list.is_empty() {
            return Err(Error::InvalidParameter {
                key: "delta".into(),
                message: "empty delta list".into(),
            });
        }
        if self.q_list.is_empty() {
            return Err(Error::InvalidParameter {
                key: "q".into(),
                message: "empty q list".into(),
            });
        }
        match self.case {
            ExperimentCase::HighQ => {
                for q in &self.q_list {
                    if !crate::construct::case_admits_q(crate::construct::InflationCase::HighQ, *q)
                    {
                        return Err(Error::InvalidParameter {
                            key: "q".into(),
                            message: format!("q = {q} rejected: the single-sign family needs q > 2 (or inf)"),
                        });
                    }
                }
            }
            ExperimentCase::LowQ => {
                for q in &self.q_list {
                    if !crate::construct::case_admits_q(crate::construct::InflationCase::LowQ, *q) {
                        return Err(Error::InvalidParameter {
                            key: "q".into(),
                            message: format!("q = {q} rejected: the paired family needs q ∈ [1, 2]"),
                        });
                    }
                }
                for &n in &self.n_list {
                    if n == 0 || n % 16 != 0 {
                        return Err(Error::InvalidParameter {
                            key: "N".into(),
                            message: format!("N = {n} rejected: N ∈ 16ℕ = {{16, 32, 48, …}}"),
                        });
                    }
                }
            }
            _ => {}
        }
        self.solver.validate()
    }
}
