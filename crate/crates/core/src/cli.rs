//! Command-line front end. [`dispatch`] parses arguments, runs the command
//! and returns the process exit code: 0 on success, 2 for invalid
//! arguments or inputs, 1 for runtime failures.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::experiments::{self, Algo, ExperimentConfig, TrialRecord};
use crate::la::{bernoulli_matrix, rip_constant_exhaustive};
use crate::solvers::{self, SolverOptions};

#[derive(Parser)]
#[command(
    name = "ridgerec",
    version,
    about = "Recover ridge and radial functions from point queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coordinate differences on the cube
    #[command(name = "algo-a")]
    AlgoA(AlgoArgs),
    /// Coordinate differences on the ball with noisy values
    #[command(name = "algo-a-noisy")]
    AlgoANoisy(AlgoArgs),
    /// Bernoulli differences with basis pursuit
    #[command(name = "algo-b")]
    AlgoB(AlgoArgs),
    /// Noisy Bernoulli differences with the Dantzig selector
    #[command(name = "algo-c")]
    AlgoC(AlgoArgs),
    /// Symmetric coordinate differences for radial functions
    #[command(name = "algo-d")]
    AlgoD(AlgoArgs),
    /// Compressed radial recovery with a quadratic constraint
    #[command(name = "algo-d-cs")]
    AlgoDCs(AlgoArgs),
    /// Compressed radial recovery from noisy values
    #[command(name = "algo-d-noisy")]
    AlgoDNoisy(AlgoArgs),
    /// Error against step size for dense ridge directions
    #[command(name = "repro-fig1")]
    ReproFig1(ReproArgs),
    /// Phase transition in (d, m) for sparse ridge directions
    #[command(name = "repro-fig2")]
    ReproFig2(ReproArgs),
    /// Error against step size under noise
    #[command(name = "repro-fig3")]
    ReproFig3(ReproArgs),
    /// Radial recovery with sparse poles
    #[command(name = "repro-fig4")]
    ReproFig4(ReproArgs),
    /// Run an experiment described by a TOML file
    Run(RunArgs),
    /// Restricted isometry constants of a random Bernoulli matrix
    #[command(name = "rip-check")]
    RipCheck(RipArgs),
    /// Solve one sparse recovery program from CSV inputs
    Solve(SolveArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct AlgoArgs {
    /// Dimensions, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    dim: Vec<usize>,
    /// Measurement counts, comma separated
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Step sizes, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    h: Vec<f64>,
    /// Noise levels, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0")]
    sigma: Vec<f64>,
    /// Nonzeros of the hidden direction (dense when omitted)
    #[arg(long)]
    sparsity: Option<usize>,
    /// linear, tanh, tanh-shift or recip [default: tanh-shift, recip for radial]
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-trial CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregate CSV
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Accept queries in the cube around the ball
    #[arg(long)]
    allow_exterior: bool,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = crate::recovery::DEFAULT_TABLE_SIZE)]
    table_size: usize,
    #[arg(long, default_value_t = 10)]
    probes: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Bound on the l1 norm of the pole (algo-d-cs)
    #[arg(long)]
    radius: Option<f64>,
    /// Constraint radius override (algo-d-cs)
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 256)]
    sup_points: usize,
    #[arg(long, default_value_t = 1e-2)]
    success_threshold: f64,
}

#[derive(Args)]
struct ReproArgs {
    /// Aggregate CSV; per-trial files are written next to it
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Full grids and trial counts
    #[arg(long)]
    full: bool,
    /// Override the trial count of every grid
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Per-trial CSV (overrides `output` in the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregate CSV
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RipArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    /// Largest order to report
    #[arg(long)]
    sparsity: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Program {
    /// min ‖w‖₁ subject to Φw = y
    Eq,
    /// min ‖w‖₁ subject to ‖Φw − y‖₂ ≤ eta
    Qc,
    /// min ‖w‖₁ subject to ‖Φᵀ(y − Φw)‖∞ ≤ thresh
    Ds,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SolveArgs {
    #[arg(long, value_enum)]
    kind: Program,
    /// Matrix as CSV, one row per line, no header
    #[arg(long)]
    matrix: PathBuf,
    /// Right-hand side as CSV, one value per line or a single row
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    thresh: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Solution file, one value per line (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Config(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("RIDGEREC_LOG", "warn"))
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::AlgoA(a) => algo(Algo::A, a),
        Command::AlgoANoisy(a) => algo(Algo::ANoisy, a),
        Command::AlgoB(a) => algo(Algo::B, a),
        Command::AlgoC(a) => algo(Algo::C, a),
        Command::AlgoD(a) => algo(Algo::D, a),
        Command::AlgoDCs(a) => algo(Algo::DCs, a),
        Command::AlgoDNoisy(a) => algo(Algo::DNoisy, a),
        Command::ReproFig1(a) => repro(1, a),
        Command::ReproFig2(a) => repro(2, a),
        Command::ReproFig3(a) => repro(3, a),
        Command::ReproFig4(a) => repro(4, a),
        Command::Run(a) => run_config(a),
        Command::RipCheck(a) => rip_check(a),
        Command::Solve(a) => solve(a),
    }
}

fn mean_error(records: &[TrialRecord]) -> f64 {
    let ok: Vec<f64> = records
        .iter()
        .filter(|r| !r.failed())
        .map(|r| r.primary_error())
        .collect();
    if ok.is_empty() {
        f64::NAN
    } else {
        ok.iter().sum::<f64>() / ok.len() as f64
    }
}

fn display(path: Option<&Path>) -> String {
    path.map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn report(name: &str, cfg: &ExperimentConfig, records: &[TrialRecord], out: Option<&Path>) {
    let points = experiments::grid_points(cfg).len();
    let failed = records.iter().filter(|r| r.failed()).count();
    let norm = if cfg.algo.uses_l1_error() { "l1" } else { "l2" };
    println!(
        "{name}: {points} grid points x {} trials, {failed} failed, mean {norm} error {:.6e}, output {}",
        cfg.trials,
        mean_error(records),
        display(out)
    );
}

fn algo(which: Algo, a: AlgoArgs) -> Result<()> {
    let default_profile = if which == Algo::D || which == Algo::DCs || which == Algo::DNoisy {
        "recip"
    } else {
        "tanh-shift"
    };
    let mut cfg = ExperimentConfig::single(
        which,
        a.profile.as_deref().unwrap_or(default_profile),
        1,
        1.0,
        a.seed,
    );
    cfg.dims = a.dim;
    cfg.measurements = a.m;
    cfg.steps = a.h;
    cfg.sigmas = a.sigma;
    cfg.sparsity = a.sparsity;
    cfg.trials = a.trials;
    cfg.allow_exterior = a.allow_exterior;
    cfg.table_size = a.table_size;
    cfg.sign_probes = a.probes;
    cfg.solver_tol = a.tol;
    cfg.radius = a.radius;
    cfg.eta = a.eta;
    cfg.sup_error_points = a.sup_points;
    cfg.success_threshold = a.success_threshold;
    cfg.check_grid()?;
    let records = experiments::run_grid(&cfg, a.jobs)?;
    if let Some(p) = &a.out {
        experiments::write_trials_file(p, &records)?;
    }
    if let Some(p) = &a.summary {
        experiments::write_aggregate_file(
            p,
            &experiments::summarize(&cfg.profile, &records, cfg.success_threshold),
        )?;
    }
    report(
        &format!("algo-{}", which.as_str().to_lowercase()),
        &cfg,
        &records,
        a.out.as_deref(),
    );
    Ok(())
}

/// `dir/stem.trials-k.csv` for an aggregate file `dir/stem.csv`.
pub fn trials_path(aggregate: &Path, k: usize) -> PathBuf {
    let stem = aggregate
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    aggregate.with_file_name(format!("{stem}.trials-{k}.csv"))
}

fn repro(figure: usize, a: ReproArgs) -> Result<()> {
    let mut cfgs = experiments::preset(figure, a.seed, a.full)
        .ok_or_else(|| Error::Config(format!("no preset {figure}")))?;
    if let Some(t) = a.trials {
        cfgs.iter_mut().for_each(|c| c.trials = t);
    }
    let mut rows = Vec::new();
    let mut all = Vec::new();
    for (k, cfg) in cfgs.iter().enumerate() {
        cfg.validate()?;
        let records = experiments::run_grid(cfg, a.jobs)?;
        experiments::write_trials_file(&trials_path(&a.out, k + 1), &records)?;
        rows.extend(experiments::summarize(
            &cfg.profile,
            &records,
            cfg.success_threshold,
        ));
        all.extend(records);
    }
    experiments::write_aggregate_file(&a.out, &rows)?;
    let failed = all.iter().filter(|r| r.failed()).count();
    println!(
        "repro-fig{figure}: {} grid points, {} runs, {failed} failed, mean error {:.6e}, output {}",
        rows.len(),
        all.len(),
        mean_error(&all),
        a.out.display()
    );
    Ok(())
}

fn run_config(a: RunArgs) -> Result<()> {
    let cfg = ExperimentConfig::from_file(&a.config)?;
    let records = experiments::run_grid(&cfg, a.jobs)?;
    let out = a.out.or_else(|| cfg.output.clone());
    if let Some(p) = &out {
        experiments::write_trials_file(p, &records)?;
    }
    if let Some(p) = &a.summary {
        experiments::write_aggregate_file(
            p,
            &experiments::summarize(&cfg.profile, &records, cfg.success_threshold),
        )?;
    }
    report("run", &cfg, &records, out.as_deref());
    Ok(())
}

fn rip_check(a: RipArgs) -> Result<()> {
    let phi = bernoulli_matrix(a.rows, a.cols, a.seed)?;
    let mut line = format!("rip-check: m={} d={} seed={}", a.rows, a.cols, a.seed);
    for s in 1..=a.sparsity {
        let est = rip_constant_exhaustive(phi.matrix(), s)?;
        line.push_str(&format!(" delta_{s}={:.6}", est.delta));
    }
    println!("{line}");
    Ok(())
}

/// Numbers from a CSV file without header, one row per record.
pub fn read_number_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: i as u64 + 1,
                        message: format!("'{}': {e}", v.trim()),
                    })
                })
                .collect()
        })
        .collect()
}

fn solve(a: SolveArgs) -> Result<()> {
    let rows = read_number_rows(&a.matrix)?;
    let m = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != d) {
        return Err(Error::Parse {
            line: i as u64 + 1,
            message: format!("expected {d} columns, found {}", rows[i].len()),
        });
    }
    let phi = DMatrix::from_row_iterator(m, d, rows.into_iter().flatten());
    let y: Vec<f64> = read_number_rows(&a.rhs)?.into_iter().flatten().collect();
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1), got {}",
            a.tol
        )));
    }
    let opts = SolverOptions::with_tol(a.tol);
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for this program")))
    };
    let (name, rep) = match a.kind {
        Program::Eq => ("eq", solvers::solve_l1_eq(&phi, &y, &opts)?),
        Program::Qc => (
            "qc",
            solvers::solve_l1_qc(&phi, &y, need(a.eta, "eta")?, &opts)?,
        ),
        Program::Ds => (
            "ds",
            solvers::solve_dantzig(&phi, &y, need(a.thresh, "thresh")?, &opts)?,
        ),
    };
    let body: String = rep.solution.iter().map(|v| format!("{v}\n")).collect();
    println!(
        "solve {name}: m={m} d={d} objective={:.12e} residual={:.3e} iterations={} converged={} output {}",
        rep.objective,
        rep.residual,
        rep.iterations,
        rep.converged,
        display(a.out.as_deref())
    );
    match &a.out {
        Some(p) => fs::write(p, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    if rep.converged {
        Ok(())
    } else {
        Err(Error::Solver(format!(
            "no convergence to tolerance {}",
            a.tol
        )))
    }
}
