//! `hjlab`: norm-inflation experiments and solvers for `u_t - Δu = |∇u|²`
//! on a periodic torus.
//!
//! Exit codes: 0 success, 2 parameter/validation error, 3 numerical failure.

mod config_file;

use clap::{ArgAction, Args, Parser, Subcommand};
use hjlab_core::construct::{
    build_f_high, build_f_low, inflation_time, HighQParams, InflationCase, LowQParams,
};
use hjlab_core::error::Error as CoreError;
use hjlab_core::experiment::{
    cross_validate_solvers, run_highq_inflation, run_lowq_inflation, verify_lemma,
    ExperimentCase, ExperimentConfig, ReportFormat,
};
use hjlab_core::lp::{
    besov_norm, bmo_norm_approx, d_norm, sobolev_norm, BesovKind, QIndex,
};
use hjlab_core::solver::hs_energy_monitor;
use hjlab_core::spectral::{
    parse_coefficient_dump, sup_norm, write_coefficient_dump, FrequencyLattice,
};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hjlab",
    version,
    about = "Spectral laboratory for norm inflation in the viscous Hamilton-Jacobi equation",
    after_help = "Config files are flat `key = value` text; keys mirror the sweep flags \
                  (case, N, delta, q, d, T, steps, snapshot_count, snapshot_span, seed, \
                  tolerance, out_dir, stretch, compute_y, trials, lemma, amplitude, \
                  sobolev_s, centers_per_axis, radius_levels, max_grid, flat). \
                  Explicit flags override config values."
)]
struct Cli {
    /// Flat key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (reports land in a timestamped subdirectory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Write into --out-dir directly, without a timestamped subdirectory.
    #[arg(long, global = true)]
    flat: bool,
    /// Increase progress chatter on stderr.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inflation sweep of the high-frequency family (Besov index q > 2).
    InflateHighq(SweepArgs),
    /// Inflation sweep of the paired family (q in [1,2], N in 16N).
    InflateLowq(SweepArgs),
    /// Run an inequality verifier (2.4, 2.1-smoothing, or 2.6).
    Verify {
        #[arg(long)]
        lemma: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cross-validate the three solvers on cosine data and monitor energy.
    Solve {
        /// Initial amplitude (at most 0.5).
        #[arg(long)]
        amplitude: Option<f64>,
        /// Final time.
        #[arg(long = "T")]
        t_final: Option<f64>,
        /// Mild-stepper step count.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the norm suite of a construction or a coefficient dump.
    Norms {
        #[arg(long)]
        case: Option<String>,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        /// Read coefficients from a dump file instead of building a family.
        #[arg(long, conflicts_with_all = ["case", "n", "delta"])]
        coeffs: Option<PathBuf>,
        /// Lattice inverse spacing for --coeffs.
        #[arg(long, requires = "coeffs")]
        l: Option<i64>,
        /// Sobolev exponent for the H^s row.
        #[arg(long)]
        sobolev_s: Option<f64>,
    },
    /// Write a construction's coefficients in the text dump format.
    DumpConstruction {
        #[arg(long)]
        case: Option<String>,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        /// Output fileened; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    /// Comma-separated N values.
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<u32>>,
    /// Comma-separated delta values.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Comma-separated Besov indices ("inf" allowed).
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<String>>,
    /// Spatial dimension (1..=3).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature / spectral-tail tolerance override.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Snapshot count for the remainder norms.
    #[arg(long)]
    snapshots: Option<usize>,
    /// Run the dense full-solution stretch check (paired family).
    #[arg(long)]
    stretch: bool,
}

enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. }
            | CoreError::InvalidLattice(_)
            | CoreError::AxisOutOfRange { .. }
            | CoreError::NegativeTime(_)
            | CoreError::BadSnapshotTimes
            | CoreError::FitUnderdetermined { .. } => CliError::Validation(format!("{e}")),
            other => CliError::Numerical(format!("{other}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
            config_file::parse(&text).map_err(CliError::Validation)?
        }
        None => BTreeMap::new(),
    };

    match &cli.command {
        Command::InflateHighq(args) => {
            let cfg = build_sweep_config(&cli, args, &file_cfg, ExperimentCase::HighQ)?;
            if cli.verbose > 0 {
                eprintln!("high-q sweep: N = {:?}, delta = {:?}", cfg.n_list, cfg.delta_list);
            }
            let report = run_highq_inflation(&cfg)?;
            let dir = output_dir(&cli, &file_cfg, &cfg.out_dir)?;
            let paths = report.emit(&dir, &[ReportFormat::Csv, ReportFormat::Json])?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            print_passes(&report.passes);
            Ok(())
        }
        Command::InflateLowq(args) => {
            let cfg = build_sweep_config(&cli, args, &file_cfg, ExperimentCase::LowQ)?;
            if cli.verbose > 0 {
                eprintln!("low-q sweep: N = {:?}, delta = {:?}", cfg.n_list, cfg.delta_list);
            }
            let report = run_lowq_inflation(&cfg)?;
            let dir = output_dir(&cli, &file_cfg, &cfg.out_dir)?;
            let paths = report.emit(&dir, &[ReportFormat::Csv, ReportFormat::Json])?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            print_passes(&report.passes);
            Ok(())
        }
        Command::Verify { lemma, trials, seed } => {
            let mut cfg = base_config(&file_cfg)?;
            cfg.case = ExperimentCase::Verify;
            if let Some(l) = lemma.clone().or_else(|| file_cfg.get("lemma").cloned()) {
                cfg.lemma = l;
            }
            if let Some(t) = trials.or_else(|| parse_from(&file_cfg, "trials"))
            {
                cfg.trials = t;
            }
            if cfg.trials < 10 {
                return Err(CliError::Validation(format!(
                    "trials = {} rejected: verifiers need at least 10",
                    cfg.trials
                )));
            }
            if let Some(s) = seed.or_else(|| parse_from(&file_cfg, "seed")) {
                cfg.seed = s;
            }
            let report = verify_lemma(&cfg)?;
            let dir = output_dir(&cli, &file_cfg, &cfg.out_dir)?;
            std::fs::create_dir_all(&dir).map_err(io_err)?;
            let path = dir.join(format!("verify-{}.json", cfg.lemma.replace('/', "-")));
            let mut text = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Numerical(format!("{e}")))?;
            text.push('\n');
            std::fs::write(&path, text).map_err(io_err)?;
            println!("wrote {}", path.display());
            println!(
                "lemma {}: trials {}, max ratio {:.6e}, median {:.6e}, drift {:.3}%, passed {}",
                report.lemma,
                report.trials,
                report.max_ratio,
                report.median_ratio,
                report.drift * 100.0,
                report.passed
            );
            Ok(())
        }
        Command::Solve { amplitude, t_final, steps, seed } => {
            let mut cfg = base_config(&file_cfg)?;
            cfg.case = ExperimentCase::Solve;
            if let Some(a) = amplitude.or_else(|| parse_from(&file_cfg, "amplitude")) {
                cfg.amplitude = a;
            }
            if let Some(t) = t_final.or_else(|| parse_from(&file_cfg, "T")) {
                cfg.solver.t_final = t;
            }
            if let Some(s) = steps.or_else(|| parse_from(&file_cfg, "steps")) {
                cfg.solver.steps = s;
            }
            if let Some(s) = seed.or_else(|| parse_from(&file_cfg, "seed")) {
                cfg.seed = s;
            }
            let report = cross_validate_solvers(&cfg)?;
            // Energy monitoring along the oracle trajectory.
            let lattice = FrequencyLattice::new(1, 1, 48).map_err(CliError::from)?;
            let u0 = hjlab_core::spectral::SpectralField::cosine(lattice, [1, 0, 0], cfg.amplitude)
                .map_err(CliError::from)?
                .to_dense(24)
                .map_err(CliError::from)?;
            let mut snaps = Vec::new();
            for i in 1..=8 {
                let t = cfg.solver.t_final * i as f64 / 8.0;
                snaps.push((
                    t,
                    hjlab_core::solver::cole_hopf_solve(&u0, t, &cfg.solver)
                        .map_err(CliError::from)?,
                ));
            }
            let monitor = hs_energy_monitor(&snaps, cfg.sobolev_s, 1e6)?;
            let dir = output_dir(&cli, &file_cfg, &cfg.out_dir)?;
            std::fs::create_dir_all(&dir).map_err(io_err)?;
            let path = dir.join("solve.json");
            let value = serde_json::json!({
                "cross_validation": report,
                "energy_monitor": monitor,
            });
            let mut text = serde_json::to_string_pretty(&value)
                .map_err(|e| CliError::Numerical(format!("{e}")))?;
            text.push('\n');
            std::fs::write(&path, text).map_err(io_err)?;
            println!("wrote {}", path.display());
            println!(
                "mild halving factor {:.2}, cubic amplitude ratio {:.2}",
                report.mild_halving_factor, report.cubic_amp_ratio
            );
            print_passes(&report.passes);
            Ok(())
        }
        Command::Norms { case, n, delta, q, d, coeffs, l, sobolev_s } => {
            let s = sobolev_s.or_else(|| parse_from(&file_cfg, "sobolev_s")).unwrap_or(2.1);
            let q_idx = match q.clone().or_else(|| file_cfg.get("q").cloned()) {
                Some(text) => QIndex::parse(&text).map_err(CliError::from)?,
                None => QIndex::Inf,
            };
            let field = if let Some(path) = coeffs {
                let l = l.ok_or_else(|| {
                    CliError::Validation("--coeffs requires --l (lattice inverse spacing)".into())
                })?;
                let dim = d.unwrap_or(1);
                let text = std::fs::read_to_string(path).map_err(io_err)?;
                // Band limit wide enough for any dump the toolkit writes.
                let lattice = FrequencyLattice::new(dim, l, i64::MAX / 4)
                    .map_err(CliError::from)?;
                parse_coefficient_dump(&text, lattice).map_err(CliError::from)?
            } else {
                build_construction(case.as_deref(), *n, *delta, q_idx, *d, &file_cfg)?.0
            };
            println!("coefficients: {}", field.stored_len());
            println!("besov_b0_q        = {:.12e}", besov_norm(&field, 0.0, q_idx, &BesovKind::Inhomogeneous).value);
            println!("fourier_besov_012 = {:.12e}", d_norm(&field));
            println!("sobolev_h{s}      = {:.12e}", sobolev_norm(&field, s));
            println!("bmo_approx        = {:.12e}", bmo_norm_approx(&field, &Default::default()));
            println!("sup               = {:.12e}", sup_norm(&field));
            Ok(())
        }
        Command::DumpConstruction { case, n, delta, q, d, out } => {
            let q_idx = match q.clone().or_else(|| file_cfg.get("q").cloned()) {
                Some(text) => QIndex::parse(&text).map_err(CliError::from)?,
                None => QIndex::Inf,
            };
            let (field, t) = build_construction(case.as_deref(), *n, *delta, q_idx, *d, &file_cfg)?;
            let mut text = format!("# t {t}\n");
            text.push_str(&write_coefficient_dump(&field));
            match out {
                Some(path) => {
                    std::fs::write(path, text).map_err(io_err)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

/// Build a construction from CLI/nonconfig parameters; returns the field and
/// its inflation time.
fn build_construction(
    case: Option<&str>,
    n: Option<u32>,
    delta: Option<f64>,
    q: QIndex,
    d: Option<usize>,
    file_cfg: &BTreeMap<String, String>,
) -> Result<(hjlab_core::spectral::SpectralField, f64), CliError> {
    let case_text = case
        .map(str::to_string)
        .or_else(|| file_cfg.get("case").cloned())
        .ok_or_else(|| CliError::Validation("missing --case (highq or lowq)".into()))?;
    let case = InflationCase::parse(&case_text).map_err(CliError::from)?;
    let n = n
        .or_else(|| parse_from(file_cfg, "N"))
        .ok_or_else(|| CliError::Validation("missing --N".into()))?;
    let delta = delta.or_else(|| parse_from(file_cfg, "delta")).unwrap_or(0.1);
    let dim = d.or_else(|| parse_from(file_cfg, "d")).unwrap_or(1);
    match case {
        InflationCase::HighQ => {
            let c = build_f_high(&HighQParams::new(n, delta, dim)).map_err(CliError::from)?;
            Ok((c.field, inflation_time(case, n, delta)))
        }
        InflationCase::LowQ => {
            let qv = match q {
                QIndex::Finite(v) if (1.0..=2.0).contains(&v) => v,
                _ => 1.0,
            };
            let c = build_f_low(&LowQParams::new(n, delta, qv, dim)).map_err(CliError::from)?;
            Ok((c.field, inflation_time(case, n, delta)))
        }
    }
}

fn base_config(file_cfg: &BTreeMap<String, String>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(v) = parse_from::<f64>(file_cfg, "sobolev_s") {
        cfg.sobolev_s = v;
    }
    if let Some(v) = parse_from::<u64>(file_cfg, "seed") {
        cfg.seed = v;
    }
    if let Some(v) = parse_from::<f64>(file_cfg, "T") {
        cfg.solver.t_final = v;
    }
    if let Some(v) = parse_from::<usize>(file_cfg, "steps") {
        cfg.solver.steps = v;
    }
    if let Some(v) = parse_from::<usize>(file_cfg, "snapshot_count") {
        cfg.solver.snapshot_count = v;
    }
    if let Some(v) = parse_from::<f64>(file_cfg, "snapshot_span") {
        cfg.solver.snapshot_span = v;
    }
    if let Some(v) = parse_from::<f64>(file_cfg, "tolerance") {
        cfg.solver.quad_tol = v;
        cfg.solver.trunc_tol = v;
    }
    if let Some(v) = parse_from::<usize>(file_cfg, "centers_per_axis") {
        cfg.sampling.centers_per_axis = v;
    }
    if let Some(v) = parse_from::<usize>(file_cfg, "radius_levels") {
        cfg.sampling.radius_levels = v;
    }
    if let Some(v) = parse_from::<usize>(file_cfg, "max_grid") {
        cfg.sampling.max_grid = v;
    }
    if let Some(v) = file_cfg.get("out_dir") {
        cfg.out_dir = PathBuf::from(v);
    }
    if let Some(v) = parse_from::<bool>(file_cfg, "stretch") {
        cfg.stretch = v;
    }
    if let Some(v) = parse_from::<bool>(file_cfg, "compute_y") {
        cfg.compute_y = v;
    }
    if let Some(v) = parse_from::<f64>(file_cfg, "amplitude") {
        cfg.amplitude = v;
    }
    Ok(cfg)
}

fn build_sweep_config(
    cli: &Cli,
    args: &SweepArgs,
    file_cfg: &BTreeMap<String, String>,
    case: ExperimentCase,
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = base_config(file_cfg)?;
    cfg.case = case;
    if let Some(list) = file_cfg.get("N") {
        cfg.n_list = parse_list(list, "N")?;
    }
    if let Some(list) = file_cfg.get("delta") {
        cfg.delta_list = parse_list(list, "delta")?;
    }
    if let Some(list) = file_cfg.get("q") {
        cfg.q_list = parse_q_list(&list.split(',').map(str::to_string).collect::<Vec<_>>())?;
    }
    if let Some(v) = parse_from::<usize>(file_cfg, "d") {
        cfg.dim = v;
    }

    if let Some(n) = &args.n {
        cfg.n_list = n.clone();
    }
    if let Some(d) = &args.delta {
        cfg.delta_list = d.clone();
    }
    if let Some(q) = &args.q {
        cfg.q_list = parse_q_list(q)?;
    } else if file_cfg.get("q").is_none() {
        cfg.q_list = match case {
            ExperimentCase::HighQ => vec![QIndex::Inf],
            _ => vec![QIndex::Finite(1.0)],
        };
    }
    if let Some(d) = args.d {
        cfg.dim = d;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tolerance {
        cfg.solver.quad_tol = tol;
        cfg.solver.trunc_tol = tol;
    }
    if let Some(snaps) = args.snapshots {
        cfg.solver.snapshot_count = snaps;
    }
    cfg.stretch |= args.stretch;
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_list<T: std::str::FromStr>(text: &str, key: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|_| CliError::Validation(format!("{key}: bad entry {part:?}")))
        })
        .collect()
}

fn parse_q_list(parts: &[String]) -> Result<Vec<QIndex>, CliError> {
    parts.iter().map(|p| QIndex::parse(p).map_err(CliError::from)).collect()
}

fn parse_from<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Option<T> {
    map.get(key).and_then(|v| v.parse().ok())
}

/// Resolve the output directory: `out_dir` (flag > config > default) plus a
/// unix-seconds subdirectory unless `--flat`.
fn output_dir(
    cli: &Cli,
    file_cfg: &BTreeMap<String, String>,
    cfg_dir: &Path,
) -> Result<PathBuf, CliError> {
    let base = cli
        .out_dir
        .clone()
        .or_else(|| file_cfg.get("out_dir").map(PathBuf::from))
        .unwrap_or_else(|| cfg_dir.to_path_buf());
    let flat = cli.flat || parse_from::<bool>(file_cfg, "flat").unwrap_or(false);
    if flat {
        return Ok(base);
    }
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(base.join(format!("run-{stamp}")))
}

fn print_passes(passes: &BTreeMap<String, bool>) {
    for (name, ok) in passes {
        println!("{}: {}", name, if *ok { "pass" } else { "FAIL" });
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Numerical(format!("io: {e}"))
}
