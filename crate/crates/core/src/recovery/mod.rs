//! Recovery of the hidden direction and profile from oracle queries.
//!
//! Every algorithm follows the same pattern: estimate a derivative-like
//! vector from first-order differences, normalize it to get `â`, then
//! sample the oracle along `â` to tabulate the profile.
//!
//! Query order is fixed and documented per algorithm, since the oracle
//! noise depends on the query index.

mod bounds;
mod radial;
mod ridge;
mod sup;
mod table;

pub use bounds::{
    radial_direction_bound, radial_local_window, radial_sup_bound, ridge_direction_bound,
    ridge_direction_bound_sharp, ridge_sup_bound,
};
pub use radial::{
    algo_d, algo_d_cs, algo_d_noisy, compressed_noise_bound, disambiguate_sign, CompressedRadial,
};
pub use ridge::{algo_a, algo_a_noisy, algo_b, algo_c, dantzig_lambda};
pub use sup::estimate_sup_error;
pub use table::{ProfileTable, DEFAULT_TABLE_SIZE};

use crate::error::{invalid, Result};
use crate::la::{self, Vector};
use crate::models::{GroundTruth, ModelKind};
use crate::solvers::SolverOptions;

/// Tuning shared by all algorithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    /// Nodes in the profile table.
    pub table_size: usize,
    /// Probe points for sign disambiguation in the radial algorithms.
    pub sign_probes: usize,
    pub solver: SolverOptions,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            table_size: DEFAULT_TABLE_SIZE,
            sign_probes: 10,
            solver: SolverOptions::default(),
        }
    }
}

impl RecoveryOptions {
    fn validate(&self) -> Result<()> {
        if self.table_size < 2 {
            return invalid("table size must be at least 2");
        }
        Ok(())
    }
}

/// Output of a recovery run.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub kind: ModelKind,
    pub a_hat: Vector,
    pub g_hat: ProfileTable,
    pub h: f64,
    pub queries_used: u64,
    /// Whether sign disambiguation flipped the normalized estimate.
    pub sign_flipped: bool,
    pub direction_error_l1: Option<f64>,
    pub direction_error_l2: Option<f64>,
    /// `min(‖â − a‖₂, ‖â + a‖₂)`, the error before sign disambiguation.
    pub unsigned_error_l2: Option<f64>,
    pub sup_error_estimate: Option<f64>,
}

impl RecoveryResult {
    fn new(kind: ModelKind, a_hat: Vector, g_hat: ProfileTable, h: f64, queries_used: u64) -> Self {
        RecoveryResult {
            kind,
            a_hat,
            g_hat,
            h,
            queries_used,
            sign_flipped: false,
            direction_error_l1: None,
            direction_error_l2: None,
            unsigned_error_l2: None,
            sup_error_estimate: None,
        }
    }

    /// The approximant `f̂`.
    pub fn f_hat(&self, x: &[f64]) -> f64 {
        match self.kind {
            ModelKind::RidgeCube | ModelKind::RidgeBall => self.g_hat.eval(la::dot(&self.a_hat, x)),
            ModelKind::RadialBall => {
                let t: f64 = self
                    .a_hat
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                self.g_hat.eval(t)
            }
        }
    }

    /// Fills the direction errors against the true direction.
    pub fn score(&mut self, truth: &GroundTruth) {
        let a = truth.direction();
        self.direction_error_l1 = Some(la::dist_l1(&self.a_hat, a));
        self.direction_error_l2 = Some(la::dist_l2(&self.a_hat, a));
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        self.unsigned_error_l2 =
            Some(la::dist_l2(&self.a_hat, a).min(la::dist_l2(&self.a_hat, &neg)));
    }
}

fn check_step(h: f64, max: f64, what: &str) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return invalid(format!("step h must be positive and finite, got {h}"));
    }
    if h > max * (1.0 + crate::models::DOMAIN_TOL) {
        return invalid(format!("step h = {h} exceeds {max} ({what})"));
    }
    Ok(())
}

fn check_rows(m: usize, d: usize) -> Result<()> {
    if m == 0 || m > d {
        return invalid(format!("measurement count must lie in 1..={d}, got {m}"));
    }
    Ok(())
}
