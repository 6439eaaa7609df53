//! Convex programs used by the recovery algorithms: ℓ1 minimization under
//! an equality constraint, under a quadratic constraint, and the Dantzig
//! selector.
//!
//! The equality and Dantzig programs run a Mehrotra predictor-corrector
//! interior-point method on their LP form. The quadratic program follows
//! the lasso homotopy to the prescribed residual and falls back to a
//! log-barrier Newton method when the active set degenerates. All three
//! report a residual on the original (unreduced) data.

mod dantzig;
mod dense;
mod homotopy;
mod ipm;
mod l1_eq;
mod l1_qc;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::la::{self, Vector};

/// Stopping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative tolerance on residual and duality gap.
    pub tol: f64,
    /// Iteration cap (interior-point or Newton steps).
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Outcome of a solve. `converged == false` is not an error: the caller
/// gets the best iterate and decides.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vector,
    /// ℓ1 norm of the solution.
    pub objective: f64,
    /// Dual lower bound when available, else NaN.
    pub dual_bound: f64,
    pub iterations: usize,
    /// Constraint violation on the original data, relative to the data scale.
    pub residual: f64,
    pub tolerance: f64,
    pub converged: bool,
}

fn check_inputs(phi: &DMatrix<f64>, y: &[f64], opts: &SolverOptions) -> Result<()> {
    let (m, d) = phi.shape();
    if m == 0 || d == 0 {
        return invalid("matrix must be non-empty");
    }
    if y.len() != m {
        return invalid(format!(
            "rhs has length {} but matrix has {} rows",
            y.len(),
            m
        ));
    }
    if phi.iter().chain(y).any(|v| !v.is_finite()) {
        return invalid("matrix and rhs must be finite");
    }
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return invalid(format!("tolerance must lie in (0, 1), got {}", opts.tol));
    }
    if opts.max_iter == 0 {
        return invalid("iteration cap must be positive");
    }
    Ok(())
}

fn residual_eq(phi: &DMatrix<f64>, y: &[f64], w: &[f64]) -> f64 {
    let mut r = vec![0.0; y.len()];
    dense::mat_vec(phi, w, &mut r);
    let diff: f64 = r
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    diff / la::l2(y).max(1.0)
}

fn residual_qc(phi: &DMatrix<f64>, y: &[f64], eta: f64, w: &[f64]) -> f64 {
    let mut r = vec![0.0; y.len()];
    dense::mat_vec(phi, w, &mut r);
    let diff: f64 = r
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    (diff - eta).max(0.0) / la::l2(y).max(1.0)
}

fn residual_ds(phi: &DMatrix<f64>, y: &[f64], thresh: f64, w: &[f64]) -> f64 {
    let d = phi.ncols();
    let mut r = vec![0.0; y.len()];
    dense::mat_vec(phi, w, &mut r);
    for (ri, yi) in r.iter_mut().zip(y) {
        *ri = yi - *ri;
    }
    let mut c = vec![0.0; d];
    dense::mat_tr_vec(phi, &r, &mut c);
    let mut c0 = vec![0.0; d];
    dense::mat_tr_vec(phi, y, &mut c0);
    (la::linf(&c) - thresh).max(0.0) / la::linf(&c0).max(1.0)
}

fn finish(
    w: Vec<f64>,
    dual_bound: f64,
    iterations: usize,
    residual: f64,
    tol: f64,
    ok: bool,
) -> Result<SolveReport> {
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("iterate became non-finite".into()));
    }
    let objective = la::l1(&w);
    let converged = ok && residual <= tol;
    Ok(SolveReport {
        solution: Vector::new(w)?,
        objective,
        dual_bound,
        iterations,
        residual,
        tolerance: tol,
        converged,
    })
}

/// `argmin ‖w‖₁` subject to `Φw = y`.
///
/// Rank-deficient and overdetermined systems are reduced to full row rank
/// first. An inconsistent system is solved for the projection of `y` onto
/// `range(Φ)`, and the report keeps `converged == false` with the true
/// residual.
pub fn solve_l1_eq(phi: &DMatrix<f64>, y: &[f64], opts: &SolverOptions) -> Result<SolveReport> {
    check_inputs(phi, y, opts)?;
    let red = l1_eq::reduce_rows(phi, y);
    let out = l1_eq::solve_reduced(&red.phi, &red.y, opts.tol, opts.max_iter);
    let residual = residual_eq(phi, y, &out.w);
    finish(
        out.w,
        out.dual_obj,
        out.iterations,
        residual,
        opts.tol,
        out.ipm_converged,
    )
}

/// `argmin ‖w‖₁` subject to `‖Φw − y‖₂ ≤ η`.
pub fn solve_l1_qc(
    phi: &DMatrix<f64>,
    y: &[f64],
    eta: f64,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    check_inputs(phi, y, opts)?;
    if !(eta >= 0.0 && eta.is_finite()) {
        return invalid(format!("eta must be finite and non-negative, got {eta}"));
    }
    if eta == 0.0 {
        return solve_l1_eq(phi, y, opts);
    }
    if la::l2(y) <= eta {
        return finish(vec![0.0; phi.ncols()], 0.0, 0, 0.0, opts.tol, true);
    }
    let out = l1_qc::solve(phi, y, eta, opts.tol, opts.max_iter);
    let residual = residual_qc(phi, y, eta, &out.w);
    finish(
        out.w,
        out.dual_obj,
        out.iterations,
        residual,
        opts.tol,
        out.converged && out.feasible,
    )
}

/// Dantzig selector: `argmin ‖w‖₁` subject to `‖Φᵀ(y − Φw)‖∞ ≤ thresh`.
pub fn solve_dantzig(
    phi: &DMatrix<f64>,
    y: &[f64],
    thresh: f64,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    check_inputs(phi, y, opts)?;
    if !(thresh >= 0.0 && thresh.is_finite()) {
        return invalid(format!(
            "threshold must be finite and non-negative, got {thresh}"
        ));
    }
    let d = phi.ncols();
    let mut c = vec![0.0; d];
    dense::mat_tr_vec(phi, y, &mut c);
    let cinf = la::linf(&c);
    if cinf <= thresh {
        return finish(vec![0.0; d], 0.0, 0, 0.0, opts.tol, true);
    }
    if thresh == 0.0 {
        // Φᵀ(y − Φw) = 0 means Φw is the projection of y onto range(Φ).
        let red = l1_eq::reduce_rows(phi, y);
        let out = l1_eq::solve_reduced(&red.phi, &red.y, opts.tol, opts.max_iter);
        let residual = residual_ds(phi, y, 0.0, &out.w);
        return finish(
            out.w,
            out.dual_obj,
            out.iterations,
            residual,
            opts.tol,
            out.ipm_converged,
        );
    }
    let out = dantzig::solve(phi, y, thresh, opts.tol, opts.max_iter);
    let residual = residual_ds(phi, y, thresh, &out.x);
    finish(
        out.x,
        out.dual_obj,
        out.iterations,
        residual,
        opts.tol,
        out.converged,
    )
}
