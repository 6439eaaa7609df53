use super::{check_rows, check_step, ProfileTable, RecoveryOptions, RecoveryResult};
use crate::error::{invalid, Error, Result};
use crate::la::{self, bernoulli_matrix, Vector};
use crate::models::{FunctionOracle, ModelKind};
use crate::solvers::{solve_dantzig, solve_l1_eq};

/// `√(2 ln d)`, the Dantzig selector's noise multiplier.
pub fn dantzig_lambda(d: usize) -> f64 {
    (2.0 * (d as f64).ln()).max(0.0).sqrt()
}

fn require(o: &FunctionOracle, kind: ModelKind, noiseless: bool, name: &str) -> Result<()> {
    if o.kind() != kind {
        return invalid(format!(
            "{name} needs a {kind:?} oracle, got {:?}",
            o.kind()
        ));
    }
    if noiseless && o.noise().sigma != 0.0 {
        return invalid(format!(
            "{name} assumes exact function values; use a noise-aware variant"
        ));
    }
    Ok(())
}

/// `(f(h·dir) − f(0))/h` for each direction, in the given order.
fn forward_differences<'a>(
    o: &mut FunctionOracle,
    f0: f64,
    h: f64,
    dirs: impl Iterator<Item = &'a [f64]>,
) -> Result<Vec<f64>> {
    let mut x = vec![0.0; o.dim()];
    dirs.map(|dir| {
        for (xi, di) in x.iter_mut().zip(dir) {
            *xi = h * di;
        }
        Ok((o.eval(&x)? - f0) / h)
    })
    .collect()
}

fn coordinate_differences(o: &mut FunctionOracle, f0: f64, h: f64) -> Result<Vec<f64>> {
    let d = o.dim();
    let mut x = vec![0.0; d];
    (0..d)
        .map(|i| {
            x[i] = h;
            let v = o.eval(&x);
            x[i] = 0.0;
            Ok((v? - f0) / h)
        })
        .collect()
}

/// `t ↦ f(t·v)` tabulated on `[−1, 1]`.
fn ridge_table(o: &mut FunctionOracle, v: &[f64], size: usize) -> Result<ProfileTable> {
    let mut x = vec![0.0; v.len()];
    ProfileTable::build(-1.0, 1.0, size, |t| {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi = t * vi;
        }
        o.eval(&x)
    })
}

fn normalized(v: &[f64], l1: bool, what: &str) -> Result<Vector> {
    let n = if l1 {
        la::normalize_l1(v)
    } else {
        la::normalize_l2(v)
    };
    match n {
        Some(a) if a.iter().all(|x| x.is_finite()) => Vector::new(a),
        _ => Err(Error::Degenerate(format!("{what} is zero"))),
    }
}

/// Coordinate differences on the cube, `ℓ1` normalization.
///
/// Query order: `f(0)`, then `f(h·e_i)` for `i = 1..d`, then the table
/// nodes `f(t·sign(â))` in increasing `t`. Total `d + 1 + T`.
pub fn algo_a(o: &mut FunctionOracle, h: f64, opts: &RecoveryOptions) -> Result<RecoveryResult> {
    require(o, ModelKind::RidgeCube, true, "algo_a")?;
    opts.validate()?;
    check_step(h, 1.0, "h·e_i must stay in the cube")?;
    let start = o.queries();
    let f0 = o.eval_origin()?;
    let diffs = coordinate_differences(o, f0, h)?;
    let a_hat = normalized(&diffs, true, "difference vector")?;
    let signs = la::sign_vec(&a_hat);
    let table = ridge_table(o, &signs, opts.table_size)?;
    Ok(RecoveryResult::new(
        ModelKind::RidgeCube,
        a_hat,
        table,
        h,
        o.queries() - start,
    ))
}

/// Coordinate differences on the ball with noisy values, `ℓ2`
/// normalization, `ĝ(t) = f(t·â)`. Same query order as [`algo_a`].
pub fn algo_a_noisy(
    o: &mut FunctionOracle,
    h: f64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    require(o, ModelKind::RidgeBall, false, "algo_a_noisy")?;
    opts.validate()?;
    check_step(h, 1.0, "h·e_i must stay in the ball")?;
    let start = o.queries();
    let f0 = o.eval_origin()?;
    let diffs = coordinate_differences(o, f0, h)?;
    let a_hat = normalized(&diffs, false, "difference vector")?;
    let table = ridge_table(o, &a_hat, opts.table_size)?;
    Ok(RecoveryResult::new(
        ModelKind::RidgeBall,
        a_hat,
        table,
        h,
        o.queries() - start,
    ))
}

/// Differences along Bernoulli rows, basis pursuit, `ℓ1` normalization.
///
/// Query order: `f(0)`, `f(h·φ_j)` for `j = 1..m`, table nodes. Total
/// `m + 1 + T`.
pub fn algo_b(
    o: &mut FunctionOracle,
    m: usize,
    h: f64,
    seed: u64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    require(o, ModelKind::RidgeCube, true, "algo_b")?;
    opts.validate()?;
    let d = o.dim();
    check_rows(m, d)?;
    check_step(h, (m as f64).sqrt(), "h·φ_j must stay in the cube")?;
    let phi = bernoulli_matrix(m, d, seed)?;
    let start = o.queries();
    let f0 = o.eval_origin()?;
    let rows: Vec<Vector> = (0..m).map(|j| phi.row(j)).collect();
    let b = forward_differences(o, f0, h, rows.iter().map(|r| r.as_slice()))?;
    let sol = solve_l1_eq(phi.matrix(), &b, &opts.solver)?;
    if !sol.converged {
        return Err(Error::Solver(format!(
            "basis pursuit stopped at residual {:.3e}",
            sol.residual
        )));
    }
    let a_hat = normalized(&sol.solution, true, "basis pursuit solution")?;
    let signs = la::sign_vec(&a_hat);
    let table = ridge_table(o, &signs, opts.table_size)?;
    Ok(RecoveryResult::new(
        ModelKind::RidgeCube,
        a_hat,
        table,
        h,
        o.queries() - start,
    ))
}

/// Noisy differences along Bernoulli rows, Dantzig selector with threshold
/// `√(2 ln d)·σ/h`, `ℓ2` normalization, `ĝ(t) = f(t·â)`.
///
/// Query order: `f(0)` (possibly resampled), `f(h·φ_j)`, table nodes.
/// The points `h·φ_j` must lie in the ball unless the oracle accepts the
/// circumscribing cube.
pub fn algo_c(
    o: &mut FunctionOracle,
    m: usize,
    h: f64,
    seed: u64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    require(o, ModelKind::RidgeBall, false, "algo_c")?;
    opts.validate()?;
    let d = o.dim();
    check_rows(m, d)?;
    if o.allows_exterior() {
        check_step(h, (m as f64).sqrt(), "h·φ_j must stay in the cube")?;
    } else {
        check_step(
            h,
            (m as f64 / d as f64).sqrt(),
            "h·φ_j must stay in the ball",
        )?;
    }
    let phi = bernoulli_matrix(m, d, seed)?;
    let start = o.queries();
    let f0 = o.eval_origin()?;
    let rows: Vec<Vector> = (0..m).map(|j| phi.row(j)).collect();
    let b = forward_differences(o, f0, h, rows.iter().map(|r| r.as_slice()))?;
    let thresh = dantzig_lambda(d) * o.noise().sigma / h;
    let sol = solve_dantzig(phi.matrix(), &b, thresh, &opts.solver)?;
    if !sol.converged {
        return Err(Error::Solver(format!(
            "Dantzig selector stopped at residual {:.3e}",
            sol.residual
        )));
    }
    let a_hat = normalized(&sol.solution, false, "Dantzig selector solution")?;
    let table = ridge_table(o, &a_hat, opts.table_size)?;
    Ok(RecoveryResult::new(
        ModelKind::RidgeBall,
        a_hat,
        table,
        h,
        o.queries() - start,
    ))
}
