use std::time::Instant;

use rayon::prelude::*;

use super::config::{Algo, ExperimentConfig};
use crate::error::{Error, Result};
use crate::models::{
    make_direction, make_profile, DirectionMode, FunctionOracle, GroundTruth, NoiseSpec, NormKind,
};
use crate::recovery::{self, CompressedRadial, RecoveryOptions, RecoveryResult};
use crate::rng::derive_seed;
use crate::solvers::SolverOptions;

/// Outcome of one recovery run. Failed runs carry `NaN` errors and zero
/// queries.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algo: Algo,
    pub d: usize,
    pub m: usize,
    pub s: usize,
    pub h: f64,
    pub sigma: f64,
    pub trial: usize,
    pub seed: u64,
    pub err_l1: f64,
    pub err_l2: f64,
    pub sup_err: f64,
    pub queries: u64,
    pub wall_ms: f64,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.err_l1.is_nan() || self.err_l2.is_nan()
    }

    /// The error the algorithm is analysed in.
    pub fn primary_error(&self) -> f64 {
        if self.algo.uses_l1_error() {
            self.err_l1
        } else {
            self.err_l2
        }
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub d: usize,
    pub m: usize,
    pub h: f64,
    pub sigma: f64,
    /// Index of the `(d, m)` instance this point draws its problems from.
    pub instance: usize,
}

/// Grid points in output order: `d`, then `m`, then `h`, then `σ`.
pub fn grid_points(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let mut points = Vec::new();
    let mut instance = 0;
    for &d in &cfg.dims {
        for m in cfg.measurements_for(d) {
            for &h in &cfg.steps {
                for &sigma in &cfg.sigmas {
                    points.push(GridPoint {
                        d,
                        m,
                        h,
                        sigma,
                        instance,
                    });
                }
            }
            instance += 1;
        }
    }
    points
}

/// Seed of trial `trial` on instance `instance`.
///
/// Grid points sharing `(d, m)` differ only in `h` and `σ`, and reuse the
/// same direction, matrix and noise draws so that their errors are directly
/// comparable.
pub fn trial_seed(master: u64, instance: usize, trial: usize) -> u64 {
    derive_seed(&[master, instance as u64, trial as u64])
}

fn recover(cfg: &ExperimentConfig, p: &GridPoint, seed: u64) -> Result<RecoveryResult> {
    let kind = cfg.algo.model_kind();
    let mode = match cfg.sparsity {
        Some(s) if s < p.d => DirectionMode::Sparse(s),
        Some(s) if s > p.d => {
            return Err(Error::InvalidInput(format!(
                "sparsity {s} exceeds dimension {}",
                p.d
            )))
        }
        _ => DirectionMode::DenseGaussian,
    };
    let a = make_direction(
        p.d,
        mode,
        NormKind::for_model(kind),
        derive_seed(&[seed, 1]),
    )?;
    let truth = GroundTruth::new(kind, a, make_profile(&cfg.profile)?)?;
    let mut o = FunctionOracle::new(truth, NoiseSpec::gaussian(p.sigma), derive_seed(&[seed, 2]))?
        .with_exterior(cfg.allow_exterior);
    let opts = RecoveryOptions {
        table_size: cfg.table_size,
        sign_probes: cfg.sign_probes,
        solver: SolverOptions::with_tol(cfg.solver_tol),
    };
    let mseed = derive_seed(&[seed, 3]);
    let mut res = match cfg.algo {
        Algo::A => recovery::algo_a(&mut o, p.h, &opts),
        Algo::ANoisy => recovery::algo_a_noisy(&mut o, p.h, &opts),
        Algo::B => recovery::algo_b(&mut o, p.m, p.h, mseed, &opts),
        Algo::C => recovery::algo_c(&mut o, p.m, p.h, mseed, &opts),
        Algo::D => recovery::algo_d(&mut o, p.h, mseed, &opts),
        Algo::DCs => {
            let s = cfg.sparsity.unwrap_or(p.d).min(p.d);
            let params = CompressedRadial {
                radius: cfg.radius.unwrap_or((s as f64).sqrt()),
                eta: cfg.eta,
            };
            recovery::algo_d_cs(&mut o, p.m, p.h, params, mseed, &opts)
        }
        Algo::DNoisy => recovery::algo_d_noisy(&mut o, p.m, p.h, mseed, &opts),
    }?;
    res.score(o.truth());
    if cfg.sup_error_points > 0 {
        res.sup_error_estimate = Some(recovery::estimate_sup_error(
            o.truth(),
            &res,
            cfg.sup_error_points,
            derive_seed(&[seed, 4]),
        ));
    }
    Ok(res)
}

/// Runs one trial. Errors from the recovery itself are logged and recorded
/// as `NaN`.
pub fn run_trial(cfg: &ExperimentConfig, p: &GridPoint, trial: usize) -> TrialRecord {
    let seed = trial_seed(cfg.master_seed, p.instance, trial);
    let start = Instant::now();
    let outcome = recover(cfg, p, seed);
    let wall_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    let mut rec = TrialRecord {
        algo: cfg.algo,
        d: p.d,
        m: p.m,
        s: cfg.sparsity.unwrap_or(p.d),
        h: p.h,
        sigma: p.sigma,
        trial,
        seed,
        err_l1: f64::NAN,
        err_l2: f64::NAN,
        sup_err: f64::NAN,
        queries: 0,
        wall_ms,
    };
    match outcome {
        Ok(res) => {
            rec.err_l1 = res.direction_error_l1.unwrap_or(f64::NAN);
            rec.err_l2 = res.direction_error_l2.unwrap_or(f64::NAN);
            rec.sup_err = res.sup_error_estimate.unwrap_or(f64::NAN);
            rec.queries = res.queries_used;
        }
        Err(e) => log::debug!(
            "{} d={} m={} h={} sigma={} trial={}: {e}",
            cfg.algo,
            p.d,
            p.m,
            p.h,
            p.sigma,
            trial
        ),
    }
    rec
}

/// Runs every trial of every grid point on `jobs` worker threads (all
/// available cores when `None`). Records come back in grid order, trials
/// innermost, whatever the scheduling.
pub fn run_grid(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let tasks: Vec<(GridPoint, usize)> = grid_points(cfg)
        .into_iter()
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    log::info!("{}: {} runs", cfg.algo, tasks.len());
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|(p, t)| run_trial(cfg, p, *t))
            .collect()
    }))
}
