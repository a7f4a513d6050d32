use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Shared solver parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Final time `T`.
    pub t_final: f64,
    /// Number of log-spaced snapshot times.
    pub snapshot_count: usize,
    /// Ratio `t_min/T` of the snapshot schedule.
    pub snapshot_span: f64,
    /// Gauss-Legendre nodes per time panel before doubling.
    pub quad_base_nodes: usize,
    /// Relative ℓ¹ change at which node doubling stops.
    pub quad_tol: f64,
    /// Doublings allowed before the quadrature reports failure.
    pub quad_max_doublings: usize,
    /// Uniform step count for the mild stepper.
    pub steps: usize,
    /// Sup-norm guard for exponentials.
    pub exp_guard: f64,
    /// Spectral-tail tolerance for pointwise maps.
    pub trunc_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            snapshot_count: 48,
            snapshot_span: 1.0 / 256.0,
            quad_base_nodes: 16,
            quad_tol: 1e-10,
            quad_max_doublings: 6,
            steps: 256,
            exp_guard: 30.0,
            trunc_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_final <= 0.0 {
            return Err(Error::InvalidParameter {
                key: "t_final".into(),
                message: format!("{} must be > 0", self.t_final),
            });
        }
        if self.quad_base_nodes < 2 {
            return Err(Error::InvalidParameter {
                key: "quad_base_nodes".into(),
                message: "need at least 2 quadrature nodes".into(),
            });
        }
        if self.quad_tol <= 0.0 {
            return Err(Error::InvalidParameter {
                key: "quad_tol".into(),
                message: "tolerance must be positive".into(),
            });
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter {
                key: "steps".into(),
                message: "need at least one step".into(),
            });
        }
        Ok(())
    }

    /// Log-spaced snapshot times on `(span·T, T]`, ascending, ending at `T`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        log_spaced(self.t_final, self.snapshot_span, self.snapshot_count)
    }
}

pub fn log_spaced(t_final: f64, span: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![t_final];
    }
    (0..count)
        .map(|i| t_final * span.powf(1.0 - i as f64 / (count - 1) as f64))
        .collect()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
