use super::*;
use crate::lp::QIndex;
use crate::solver::SolverConfig;

fn quick_highq(n_list: Vec<u32>, delta_list: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        case: ExperimentCase::HighQ,
        n_list,
        delta_list,
        q_list: vec![QIndex::Inf],
        solver: SolverConfig { snapshot_count: 24, ..Default::default() },
        ..Default::default()
    }
}

fn quick_lowq(delta_list: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        case: ExperimentCase::LowQ,
        n_list: vec![16],
        delta_list,
        q_list: vec![QIndex::Finite(1.0)],
        ..Default::default()
    }
}

#[test]
fn empty_report_has_header_only_csv() {
    let report = InflationReport::new("highq", 42, serde_json::json!({}));
    let csv = report.to_csv();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("case,d,q,N,delta,t,"));
}

#[test]
fn report_json_passes_the_schema_validator() {
    let cfg = quick_highq(vec![4, 5, 6], vec![0.1]);
    let report = run_highq_inflation(&cfg).unwrap();
    let json = report.to_json_value().unwrap();
    validate_report_json(&json).unwrap();
    // Round-trip through text.
    let text = report.to_json_string().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    validate_report_json(&parsed).unwrap();
}

#[test]
fn schema_validator_rejects_malformed_reports() {
    assert!(validate_report_json(&serde_json::json!({"schema": "other/1"})).is_err());
    assert!(validate_report_json(&serde_json::json!({
        "schema": REPORT_SCHEMA, "case": "x", "version": "v", "seed": 1,
        "rows": [{"case": "x"}], "fits": {}, "passes": {}
    }))
    .is_err());
}

#[test]
fn identical_runs_are_byte_identical() {
    let cfg = quick_highq(vec![4, 5], vec![0.1]);
    let a = run_highq_inflation(&cfg).unwrap();
    let b = run_highq_inflation(&cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
}

#[test]
fn highq_rows_carry_the_expected_columns() {
    let cfg = quick_highq(vec![4, 5, 6], vec![0.1]);
    let report = run_highq_inflation(&cfg).unwrap();
    assert_eq!(report.rows.len(), 3);
    for row in &report.rows {
        assert!(row.norm_in_besov > 0.0);
        assert!(row.norm_in_fb12 > 0.0);
        assert!(row.norm_in_bmo > 0.0);
        assert!(row.a2_block_norm.unwrap() > 0.0);
        assert!(row.u_norm.unwrap() > 0.0);
        assert!(row.remainder_s.unwrap() > 0.0);
        assert!(row.remainder1_s.unwrap() > row.remainder_s.unwrap());
    }
    assert!(report.fits.contains_key("input_besov_vs_n"));
    assert!(report.fits.contains_key("a2_block_over_d2_vs_n"));
    // Input norm strictly decreasing in N.
    let vals: Vec<f64> = report.rows.iter().map(|r| r.norm_in_besov).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
}

#[test]
fn highq_delta_halving_quarters_the_block_norm_exactly() {
    let cfg = quick_highq(vec![4], vec![0.1, 0.05]);
    let report = run_highq_inflation(&cfg).unwrap();
    let hi = report.rows[0].a2_block_norm.unwrap();
    let lo = report.rows[1].a2_block_norm.unwrap();
    assert!((hi / lo - 4.0).abs() <= 1e-12, "ratio {}", hi / lo);
    assert_eq!(report.passes.iter().filter(|(k, _)| k.starts_with("a2_quarter")).count(), 1);
    assert!(report.passes.iter().filter(|(k, _)| k.starts_with("a2_quarter")).all(|(_, v)| *v));
}

#[test]
fn highq_rejects_low_q_indices() {
    let mut cfg = quick_highq(vec![4], vec![0.1]);
    cfg.q_list = vec![QIndex::Finite(1.5)];
    assert!(run_highq_inflation(&cfg).is_err());
}

#[test]
fn lowq_single_point_constituents() {
    let cfg = quick_lowq(vec![0.1]);
    let report = run_lowq_inflation(&cfg).unwrap();
    assert_eq!(report.rows.len(), 1);
    let row = &report.rows[0];
    assert!(row.certificates_passed.unwrap());
    assert!(row.i1_closed_rel_err.unwrap() <= 1e-8, "I1 err {:?}", row.i1_closed_rel_err);
    assert!(row.decomposition_rel_err.unwrap() <= 1e-10);
    assert!(row.lemma31_min_ratio.unwrap() >= 0.05);
    assert!(row.lemma34_ratio.unwrap() >= 0.02);
    assert!(report.passes["certificates_pass"]);
    assert!(report.passes["i1_closed_form"]);
    assert!(report.passes["decomposition_identity"]);
}

#[test]
fn lowq_delta_exponents() {
    let cfg = quick_lowq(vec![0.05, 0.1, 0.2]);
    let report = run_lowq_inflation(&cfg).unwrap();
    assert!(report.passes["lemma31_delta_exponent_flat"]);
    assert!(report.passes["lemma32_delta_exponent"], "{:?}", report.fits.get("lemma32_vs_delta"));
    assert!(report.passes["lemma33_delta_exponent"], "{:?}", report.fits.get("lemma33_vs_delta"));
    assert!(report.passes["lemma34_ratio_min"]);
}

#[test]
fn lowq_rejects_bad_n_and_q() {
    let mut cfg = quick_lowq(vec![0.1]);
    cfg.n_list = vec![17];
    let err = run_lowq_inflation(&cfg).unwrap_err();
    assert!(format!("{err}").contains("16ℕ"), "{err}");
    let mut cfg = quick_lowq(vec![0.1]);
    cfg.q_list = vec![QIndex::Inf];
    assert!(run_lowq_inflation(&cfg).is_err());
}

#[test]
fn verifier_24_is_scale_invariant_and_stable() {
    let report = verify_bilinear_24(40, 7, QIndex::Finite(2.0)).unwrap();
    assert_eq!(report.scaling_invariance_err, 0.0);
    assert!(report.max_ratio.is_finite() && report.max_ratio > 0.0);
    assert!(report.drift < 0.10, "drift {:.3}", report.drift);
    assert_eq!(report.skipped, 0);
}

#[test]
fn verifier_21_ratios_are_stable() {
    let report = verify_smoothing_21(20, 11).unwrap();
    assert!(report.max_ratio.is_finite() && report.max_ratio > 0.0);
    assert!(report.drift < 0.10, "drift {:.3}", report.drift);
}

#[test]
fn verifier_26_holdout_respects_the_fitted_constant() {
    let report = verify_log_interpolation_26(60, 3, 2.1).unwrap();
    assert!(report.fitted_c.unwrap() > 0.0);
    assert!(report.holdout_margin.unwrap() <= 1.1, "margin {:?}", report.holdout_margin);
}

#[test]
fn verifier_dispatch_rejects_unknown_lemma() {
    let cfg = ExperimentConfig { lemma: "9.9".into(), ..Default::default() };
    assert!(verify_lemma(&cfg).is_err());
}

#[test]
fn cross_validation_orders() {
    let cfg = ExperimentConfig {
        case: ExperimentCase::Solve,
        amplitude: 0.2,
        solver: SolverConfig {
            t_final: 0.05,
            steps: 128,
            snapshot_count: 6,
            trunc_tol: 1e-12,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = cross_validate_solvers(&cfg).unwrap();
    assert!(report.passes["mild_halving_second_order"], "factor {}", report.mild_halving_factor);
    assert!(
        report.passes["cubic_remainder_order"],
        "amp ratio {}",
        report.cubic_amp_ratio
    );
    assert!(report.rows.iter().all(|r| r.gap_mild < 1e-5 && r.gap_picard3 < 1e-2));
}

#[test]
fn emitted_files_are_deterministic() {
    let cfg = quick_highq(vec![4], vec![0.1]);
    let report = run_highq_inflation(&cfg).unwrap();
    let dir = std::env::temp_dir().join("hjlab-test-emit");
    let _ = std::fs::remove_dir_all(&dir);
    let paths =
        report.emit(&dir, &[ReportFormat::Csv, ReportFormat::Json]).unwrap();
    assert_eq!(paths.len(), 2);
    let csv1 = std::fs::read(&paths[0]).unwrap();
    let json1 = std::fs::read(&paths[1]).unwrap();
    let report2 = run_highq_inflation(&cfg).unwrap();
    let paths2 = report2.emit(&dir, &[ReportFormat::Csv, ReportFormat::Json]).unwrap();
    assert_eq!(std::fs::read(&paths2[0]).unwrap(), csv1);
    assert_eq!(std::fs::read(&paths2[1]).unwrap(), json1);
    let _ = std::fs::remove_dir_all(&dir);
}
