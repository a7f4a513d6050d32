use crate::error::{Error, Result};
use serde::Serialize;

/// Least-squares power-law fit `y = e^intercept · x^slope` on log-log axes.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub points: usize,
}

pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::FitUnderdetermined { need: 3, got: xs.len().min(ys.len()) });
    }
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::InvalidParameter {
                key: "fit".into(),
                message: format!("log-log fit needs positive data, got ({x}, {y})"),
            });
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            key: "fit".into(),
            message: "degenerate abscissae".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (lx.len() - 2).max(1) as f64;
    let stderr = (ss_res / dof / sxx).sqrt();
    Ok(FitResult { slope, intercept, stderr, points: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_synthetic_exponents() {
        let xs: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        for &alpha in &[-0.5, 0.0, 1.7, 3.5] {
            let ys: Vec<f64> = xs.iter().map(|x| 2.3 * x.powf(alpha)).collect();
            let fit = fit_loglog(&xs, &ys).unwrap();
            assert!((fit.slope - alpha).abs() <= 1e-6, "alpha {alpha}: got {}", fit.slope);
            assert!(fit.stderr <= 1e-6);
        }
    }

    #[test]
    fn rejects_underdetermined_and_nonpositive() {
        assert!(fit_loglog(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_loglog(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
    }
}
