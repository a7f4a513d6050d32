//! Acceptance suite: every gate criterion as its own test, each printing one
//! pass/fail line with its measured quantities and runtime budget.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Expensive sweeps run once behind `OnceLock`s and are shared by their
//! sub-criteria.

use hjlab_core::construct::{build_f_high, inflation_time, HighQParams, InflationCase};
use hjlab_core::experiment::{
    run_highq_inflation, run_lowq_inflation, verify_bilinear_24, verify_log_interpolation_26,
    verify_smoothing_21, ExperimentCase, ExperimentConfig, InflationReport,
};
use hjlab_core::lp::partition::partition_sum;
use hjlab_core::lp::{paraproduct, remainder, QIndex};
use hjlab_core::solver::{a2_exact, cole_hopf_solve, mild_solve, picard_a, SolverConfig};
use hjlab_core::spectral::{sup_norm, FrequencyLattice, Mode, SpectralField};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn report_line(name: &str, ok: bool, detail: &str, elapsed: Duration, budget: Duration) {
    println!(
        "criterion {name}: {} ({detail}) [{:.2}s < {:.0}s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
}

fn check(name: &str, ok: bool, detail: &str, elapsed: Duration, budget: Duration) {
    report_line(name, ok, detail, elapsed, budget);
    assert!(ok, "criterion {name} failed: {detail}");
    assert!(
        elapsed < budget,
        "criterion {name} exceeded its runtime budget: {:.2}s >= {:.0}s",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
}

#[test]
fn c1_partition_of_unity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let r = (2.0f64).powf(rng.gen_range(-20.0..20.0));
        worst = worst.max((partition_sum(r) - 1.0).abs());
    }
    check(
        "1 (partition of unity)",
        worst <= 1e-12,
        &format!("max deviation {worst:.2e} over 1e4 samples"),
        start.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn c2_bony_identity() {
    let start = Instant::now();
    let lattice = FrequencyLattice::new(1, 1, 512).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_ratio = 0.0f64;
    for _ in 0..100 {
        let mut field = |rng: &mut ChaCha8Rng| {
            let mut entries = Vec::new();
            for _ in 0..12 {
                let k = rng.gen_range(1..=256i64);
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                entries.push((Mode([k, 0, 0]), c));
                entries.push((Mode([-k, 0, 0]), c.conj()));
            }
            SpectralField::from_modes(lattice, entries, true).unwrap()
        };
        let u = field(&mut rng);
        let v = field(&mut rng);
        let uv = hjlab_core::spectral::sparse_convolve(&u, &v, true).unwrap();
        let mut bony = paraproduct(&u, &v).unwrap();
        bony = bony
            .add_scaled(&paraproduct(&v, &u).unwrap(), Complex64::new(1.0, 0.0))
            .unwrap();
        bony = bony
            .add_scaled(&remainder(&u, &v).unwrap(), Complex64::new(1.0, 0.0))
            .unwrap();
        let gap = uv.add_scaled(&bony, Complex64::new(-1.0, 0.0)).unwrap();
        let defect = sup_norm(&gap) / (sup_norm(&u) * sup_norm(&v));
        worst_ratio = worst_ratio.max(defect);
    }
    check(
        "2 (Bony identity)",
        worst_ratio <= 1e-10,
        &format!("max defect {worst_ratio:.2e} over 100 pairs"),
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn c3_solver_oracle_agreement() {
    let start = Instant::now();
    let lattice = FrequencyLattice::new(1, 1, 48).unwrap();
    let u0 = SpectralField::cosine(lattice, [1, 0, 0], 0.3).unwrap().to_dense(24).unwrap();
    let cfg = SolverConfig { t_final: 0.1, steps: 256, trunc_tol: 1e-12, ..Default::default() };
    let oracle = cole_hopf_solve(&u0, 0.1, &cfg).unwrap().truncated(24).unwrap();
    let gap = |steps: usize| {
        let c = SolverConfig { steps, ..cfg.clone() };
        let u = mild_solve(&u0, &c).unwrap().pop().unwrap().1;
        let diff = u.add_scaled(&oracle, Complex64::new(-1.0, 0.0)).unwrap();
        sup_norm(&diff) / sup_norm(&oracle)
    };
    let g256 = gap(256);
    let g512 = gap(512);
    let factor = g256 / g512;
    check(
        "3 (solver oracle agreement)",
        g256 <= 1e-6 && factor >= 3.5,
        &format!("gap {g256:.2e} at 256 steps, halving factor {factor:.2}"),
        start.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn c4_picard_kernel_equivalence() {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for n in 4..=6u32 {
        let c = build_f_high(&HighQParams::new(n, 0.1, 1)).unwrap();
        let t = inflation_time(InflationCase::HighQ, n, 0.1);
        let exact = a2_exact(&c.field, t).unwrap();
        let quad = picard_a(&c.field, 2, t, &cfg).unwrap();
        let rel = exact.coeff_l1_diff(&quad) / exact.coeff_l1();
        worst = worst.max(rel);
    }
    let lattice = FrequencyLattice::new(1, 4, 4096).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let mut entries = Vec::new();
        for _ in 0..20 {
            let k = rng.gen_range(1..=2000i64);
            let c = Complex64::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
            entries.push((Mode([k, 0, 0]), c));
            entries.push((Mode([-k, 0, 0]), c.conj()));
        }
        let f = SpectralField::from_modes(lattice, entries, true).unwrap();
        let t = 1e-4;
        let exact = a2_exact(&f, t).unwrap();
        let quad = picard_a(&f, 2, t, &cfg).unwrap();
        let rel = exact.coeff_l1_diff(&quad) / exact.coeff_l1();
        worst = worst.max(rel);
    }
    check(
        "4 (Picard kernel equivalence)",
        worst <= 1e-10,
        &format!("max relative gap {worst:.2e}"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

static HIGHQ_SWEEP: OnceLock<(InflationReport, Duration)> = OnceLock::new();

fn highq_sweep() -> &'static (InflationReport, Duration) {
    HIGHQ_SWEEP.get_or_init(|| {
        let start = Instant::now();
        let cfg = ExperimentConfig {
            case: ExperimentCase::HighQ,
            n_list: vec![4, 5, 6, 7, 8, 9],
            delta_list: vec![0.1],
            q_list: vec![QIndex::Inf],
            ..Default::default()
        };
        let report = run_highq_inflation(&cfg).expect("high-q sweep");
        (report, start.elapsed())
    })
}

const C5_BUDGET: Duration = Duration::from_secs(300);

#[test]
fn c5a_input_norm_slope() {
    let (report, elapsed) = highq_sweep();
    let fit = &report.fits["input_besov_vs_n"];
    check(
        "5a (input-norm slope -0.5 ± 0.15)",
        report.passes["input_slope_minus_half"],
        &format!("slope {:.4} ± {:.4}", fit.slope, fit.stderr),
        *elapsed,
        C5_BUDGET,
    );
}

#[test]
fn c5b_a2_block_band_and_exponent() {
    let (report, elapsed) = highq_sweep();
    let fit = &report.fits["a2_block_over_d2_vs_n"];
    let min_ratio = report
        .rows
        .iter()
        .map(|r| r.a2_block_norm.unwrap() / (r.delta * r.delta))
        .fold(f64::INFINITY, f64::min);
    report_line(
        "5b-min (low-block response ≥ 0.05·δ²)",
        report.passes["a2_min_ratio"],
        &format!("min ratio {min_ratio:.3}"),
        *elapsed,
        C5_BUDGET,
    );
    assert!(report.passes["a2_min_ratio"]);
    // The exact lattice value of the column is 10·(1+1/N)·δ²·e^{-2^{-N}/64}:
    // the (N+1)/N bump count against the 1/N normalization forces a fitted
    // slope of -0.145 over N = 4..9. The ±0.1 gate cannot be met by the
    // pinned construction at desk scale (it flattens only as N → ∞); the
    // assertion is kept as stated and this sub-check is expected to fail.
    check(
        "5b-exponent (fitted N-exponent within ±0.1 of 0)",
        report.passes["a2_exponent_flat"],
        &format!(
            "fitted exponent {:.4} ± {:.4}; exact finite-size value is ln(1+1/N)-curved",
            fit.slope, fit.stderr
        ),
        *elapsed,
        C5_BUDGET,
    );
}

#[test]
fn c5c_full_solution_lower_bound_and_monotone_ratio() {
    let (report, elapsed) = highq_sweep();
    let min_u = report.rows.iter().map(|r| r.u_norm.unwrap()).fold(f64::INFINITY, f64::min);
    let min_a2 =
        report.rows.iter().map(|r| r.a2_block_norm.unwrap()).fold(f64::INFINITY, f64::min);
    let ok = report.passes["u_lower_bound"] && report.passes["u_input_ratio_monotone"];
    check(
        "5c (full-solution lower bound, monotone inflation ratio)",
        ok,
        &format!("min ‖u‖ {min_u:.4} vs 0.5·min block {:.4}", 0.5 * min_a2),
        *elapsed,
        C5_BUDGET,
    );
}

#[test]
fn c6_remainder_order_in_delta() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        case: ExperimentCase::HighQ,
        n_list: vec![6],
        delta_list: vec![0.1, 0.05],
        q_list: vec![QIndex::Inf],
        ..Default::default()
    };
    let report = run_highq_inflation(&cfg).expect("remainder sweep");
    let rem1: Vec<f64> = report.rows.iter().map(|r| r.remainder1_s.unwrap()).collect();
    let rem2: Vec<f64> = report.rows.iter().map(|r| r.remainder_s.unwrap()).collect();
    let f1 = rem1[0] / rem1[1];
    let f2 = rem2[0] / rem2[1];
    let ok = (3.5..=4.5).contains(&f1) && (7.0..=9.0).contains(&f2);
    check(
        "6 (remainder order under δ-halving)",
        ok,
        &format!("‖u-A₁‖_S factor {f1:.2} ∈ [3.5,4.5], ‖u-A₁-A₂‖_S factor {f2:.2} ∈ [7,9]"),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

static LOWQ_SWEEP: OnceLock<(InflationReport, Duration)> = OnceLock::new();

fn lowq_sweep() -> &'static (InflationReport, Duration) {
    LOWQ_SWEEP.get_or_init(|| {
        let start = Instant::now();
        let cfg = ExperimentConfig {
            case: ExperimentCase::LowQ,
            n_list: vec![16],
            delta_list: vec![0.05, 0.1, 0.2],
            q_list: vec![QIndex::Finite(1.0)],
            ..Default::default()
        };
        let report = run_lowq_inflation(&cfg).expect("low-q sweep");
        (report, start.elapsed())
    })
}

const C7_BUDGET: Duration = Duration::from_secs(180);

#[test]
fn c7a_support_certificates() {
    let (report, elapsed) = lowq_sweep();
    check(
        "7a (support certificates, coefficient-exact)",
        report.passes["certificates_pass"],
        "facts (3.3)-type, annulus, inner-ball, block identity",
        *elapsed,
        C7_BUDGET,
    );
}

#[test]
fn c7b_same_level_closed_form() {
    let (report, elapsed) = lowq_sweep();
    let worst = report
        .rows
        .iter()
        .map(|r| r.i1_closed_rel_err.unwrap())
        .fold(0.0f64, f64::max);
    check(
        "7b (289/288d closed form vs direct evaluation)",
        report.passes["i1_closed_form"],
        &format!("worst relative error {worst:.2e} ≤ 1e-8"),
        *elapsed,
        C7_BUDGET,
    );
}

#[test]
fn c7c_product_block_lower_bound() {
    let (report, elapsed) = lowq_sweep();
    let fit = &report.fits["lemma31_ratio_vs_delta"];
    let ok = report.passes["lemma31_ratio_min"] && report.passes["lemma31_delta_exponent_flat"];
    check(
        "7c (product block lower bound, flat δ-exponent)",
        ok,
        &format!("min ratio covered, δ-exponent {:.3} ∈ ±0.1", fit.slope),
        *elapsed,
        C7_BUDGET,
    );
}

#[test]
fn c7d_tail_terms_are_quartic() {
    let (report, elapsed) = lowq_sweep();
    let f32_ = report.fits["lemma32_vs_delta"].slope;
    let f33 = report.fits["lemma33_vs_delta"].slope;
    let ok = report.passes["lemma32_delta_exponent"] && report.passes["lemma33_delta_exponent"];
    check(
        "7d (Taylor tail and semigroup-difference δ-exponents ≥ 3.5)",
        ok,
        &format!("exponents {f32_:.2}, {f33:.2}"),
        *elapsed,
        C7_BUDGET,
    );
}

#[test]
fn c7e_assembled_restricted_norm() {
    let (report, elapsed) = lowq_sweep();
    let min34 = report
        .rows
        .iter()
        .map(|r| r.lemma34_ratio.unwrap())
        .fold(f64::INFINITY, f64::min);
    let worst_split = report
        .rows
        .iter()
        .map(|r| r.decomposition_rel_err.unwrap())
        .fold(0.0f64, f64::max);
    let ok = report.passes["lemma34_ratio_min"] && report.passes["decomposition_identity"];
    check(
        "7e (assembled norm ≥ 0.02·δ³; exact three-term split)",
        ok,
        &format!("min ratio {min34:.3}, split defect {worst_split:.2e}"),
        *elapsed,
        C7_BUDGET,
    );
}

#[test]
fn c8_lemma_verifiers() {
    let start = Instant::now();
    let r24 = verify_bilinear_24(200, 1234, QIndex::Finite(2.0)).unwrap();
    let r21 = verify_smoothing_21(200, 1234).unwrap();
    let r26 = verify_log_interpolation_26(100, 1234, 2.1).unwrap();
    let ok = r24.passed && r21.passed && r26.passed;
    check(
        "8 (inequality verifiers: drift and fitted constant)",
        ok,
        &format!(
            "2.4 drift {:.1}%, 2.1 drift {:.1}%, 2.6 holdout margin {:.3}",
            r24.drift * 100.0,
            r21.drift * 100.0,
            r26.holdout_margin.unwrap()
        ),
        start.elapsed(),
        Duration::from_secs(180),
    );
}

#[test]
fn c9_cli_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_hjlab");
    let base = std::env::temp_dir().join(format!("hjlab-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    // Bit-identical invocations: same arguments, same output directory,
    // snapshotting the files between the two runs.
    let run = |dir: &str, args: &[&str]| {
        let out_dir = base.join(dir);
        let status = std::process::Command::new(bin)
            .args(args)
            .arg("--out-dir")
            .arg(&out_dir)
            .arg("--flat")
            .output()
            .expect("spawn hjlab");
        assert!(status.status.success(), "hjlab failed: {:?}", status);
        out_dir
    };
    let sweep = ["inflate-highq", "--N", "4,5", "--delta", "0.1", "--q", "inf", "--seed", "42"];
    let dir = run("sweep", &sweep);
    let csv1 = std::fs::read(dir.join("report.csv")).unwrap();
    let json1 = std::fs::read(dir.join("report.json")).unwrap();
    run("sweep", &sweep);
    let csv_same = std::fs::read(dir.join("report.csv")).unwrap() == csv1;
    let json_same = std::fs::read(dir.join("report.json")).unwrap() == json1;

    let verify = ["verify", "--lemma", "2.4", "--trials", "60", "--seed", "7"];
    let vdir = run("verify", &verify);
    let v1 = std::fs::read(vdir.join("verify-2.4.json")).unwrap();
    run("verify", &verify);
    let verify_same = std::fs::read(vdir.join("verify-2.4.json")).unwrap() == v1;
    let _ = std::fs::remove_dir_all(&base);
    check(
        "9 (CLI determinism)",
        csv_same && json_same && verify_same,
        "two identical invocations, byte-identical CSV/JSON",
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn cli_help_and_config_equivalence() {
    // --help exits 0 and lists every subcommand; a config-file run equals
    // the flag run byte-for-byte.
    let bin = env!("CARGO_BIN_EXE_hjlab");
    let help = std::process::Command::new(bin).arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["inflate-highq", "inflate-lowq", "verify", "solve", "norms", "dump-construction"]
    {
        assert!(text.contains(sub), "--help misses {sub}");
    }

    let base = std::env::temp_dir().join(format!("hjlab-config-eq-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();
    let cfg_path = base.join("sweep.cfg");
    std::fs::write(&cfg_path, "N = 4,5\ndelta = 0.1\nq = inf\nd = 1\nseed = 42\n").unwrap();
    let flag_dir = base.join("flags");
    let file_dir = base.join("file");
    let run = |args: &[&str], dir: &std::path::Path| {
        let out = std::process::Command::new(bin)
            .args(args)
            .arg("--out-dir")
            .arg(dir)
            .arg("--flat")
            .output()
            .unwrap();
        assert!(out.status.success(), "{:?}", out);
    };
    run(
        &["inflate-highq", "--N", "4,5", "--delta", "0.1", "--q", "inf", "--d", "1", "--seed", "42"],
        &flag_dir,
    );
    run(&["inflate-highq", "--config", cfg_path.to_str().unwrap()], &file_dir);
    assert_eq!(
        std::fs::read(flag_dir.join("report.csv")).unwrap(),
        std::fs::read(file_dir.join("report.csv")).unwrap(),
        "config-file run differs from flag run"
    );
    let _ = std::fs::remove_dir_all(&base);
}

#[test]
fn cli_rejects_bad_lowq_n_with_exit_2() {
    let bin = env!("CARGO_BIN_EXE_hjlab");
    let out = std::process::Command::new(bin)
        .args(["inflate-lowq", "--N", "17", "--delta", "0.1", "--q", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("16ℕ"), "diagnostic should cite the 16ℕ constraint: {msg}");
}
