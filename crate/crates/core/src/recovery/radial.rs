use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::ridge::dantzig_lambda;
use super::{check_rows, check_step, ProfileTable, RecoveryOptions, RecoveryResult};
use crate::error::{invalid, Error, Result};
use crate::la::{self, bernoulli_matrix, Vector};
use crate::models::{FunctionOracle, ModelKind};
use crate::rng;
use crate::solvers::{solve_dantzig, solve_l1_qc};

/// Parameters of the compressed radial variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressedRadial {
    /// Bound `R ≥ ‖a‖₁`.
    pub radius: f64,
    /// Overrides the constraint radius `η` of the quadratic program.
    pub eta: Option<f64>,
}

fn require(o: &FunctionOracle, noiseless: bool, name: &str) -> Result<()> {
    if o.kind() != ModelKind::RadialBall {
        return invalid(format!(
            "{name} needs a RadialBall oracle, got {:?}",
            o.kind()
        ));
    }
    if noiseless && o.noise().sigma != 0.0 {
        return invalid(format!(
            "{name} assumes exact function values; use algo_d_noisy"
        ));
    }
    Ok(())
}

/// `(f((h/2)v) − f(−(h/2)v))/h` for each direction, querying `+` then `−`.
fn symmetric_differences<'a>(
    o: &mut FunctionOracle,
    h: f64,
    dirs: impl Iterator<Item = &'a [f64]>,
) -> Result<Vec<f64>> {
    let mut x = vec![0.0; o.dim()];
    dirs.map(|dir| {
        for (xi, di) in x.iter_mut().zip(dir) {
            *xi = 0.5 * h * di;
        }
        let plus = o.eval(&x)?;
        x.iter_mut().for_each(|v| *v = -*v);
        let minus = o.eval(&x)?;
        Ok((plus - minus) / h)
    })
    .collect()
}

/// `t ↦ f(â(1 − √t))` on `[0, 4]`.
fn radial_table(o: &mut FunctionOracle, a_hat: &[f64], size: usize) -> Result<ProfileTable> {
    let mut x = vec![0.0; a_hat.len()];
    ProfileTable::build(0.0, 4.0, size, |t| {
        let c = 1.0 - t.sqrt();
        for (xi, ai) in x.iter_mut().zip(a_hat) {
            *xi = c * ai;
        }
        o.eval(&x)
    })
}

fn unit_l2(v: &[f64], what: &str) -> Result<Vector> {
    match la::normalize_l2(v) {
        Some(a) if a.iter().all(|x| x.is_finite()) => Vector::new(a),
        _ => Err(Error::Degenerate(format!("{what} is zero"))),
    }
}

/// Uniform point in the unit ball.
fn ball_point(r: &mut rng::Rng, d: usize) -> Vec<f64> {
    let mut z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(r)).collect();
    let n = la::l2(&z);
    let radius = r.random::<f64>().powf(1.0 / d as f64);
    z.iter_mut().for_each(|v| *v *= radius / n);
    z
}

/// Chooses between `+â` and `−â` by comparing oracle values at `probes`
/// random ball points with the two candidate approximants.
///
/// The table for `−â` needs no new queries:
/// `f(−â(1 − √t)) = f(â(1 − √t'))` with `t' = (2 − √t)²`.
/// Candidates whose mean squared mismatch differs by at most `1e-12` keep
/// `+â`. Returns the chosen direction, its table, and whether it flipped.
pub fn disambiguate_sign(
    o: &mut FunctionOracle,
    a_hat: Vector,
    table: ProfileTable,
    probes: usize,
    seed: u64,
) -> Result<(Vector, ProfileTable, bool)> {
    if probes == 0 {
        return Ok((a_hat, table, false));
    }
    let d = o.dim();
    let mut r = rng::rng(seed);
    let (mut plus, mut minus) = (0.0, 0.0);
    for _ in 0..probes {
        let x = ball_point(&mut r, d);
        let v = o.eval(&x)?;
        let tp: f64 = a_hat.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
        let sum_norm: f64 = a_hat
            .iter()
            .zip(&x)
            .map(|(a, b)| (a + b) * (a + b))
            .sum::<f64>()
            .sqrt();
        let gp = table.eval(tp);
        let gm = table.eval((2.0 - sum_norm).powi(2));
        plus += (v - gp) * (v - gp);
        minus += (v - gm) * (v - gm);
    }
    plus /= probes as f64;
    minus /= probes as f64;
    if minus < plus - 1e-12 {
        let flipped = Vector::new(a_hat.iter().map(|v| -v).collect())?;
        let remapped = table.remap(|t| (2.0 - t.sqrt()).powi(2));
        Ok((flipped, remapped, true))
    } else {
        Ok((a_hat, table, false))
    }
}

fn finish(
    o: &mut FunctionOracle,
    raw: &[f64],
    what: &str,
    h: f64,
    seed: u64,
    start: u64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    let a_hat = unit_l2(raw, what)?;
    let table = radial_table(o, &a_hat, opts.table_size)?;
    let probe_seed = rng::derive_seed(&[seed, 0x5167]);
    let (a_hat, table, flipped) = disambiguate_sign(o, a_hat, table, opts.sign_probes, probe_seed)?;
    let mut res = RecoveryResult::new(ModelKind::RadialBall, a_hat, table, h, o.queries() - start);
    res.sign_flipped = flipped;
    Ok(res)
}

/// Symmetric coordinate differences around the origin, `ℓ2`
/// normalization, then sign disambiguation.
///
/// Query order: `f(±(h/2)e_i)` (plus first) for `i = 1..d`, the table
/// nodes `f(â(1 − √t))` for increasing `t ∈ [0, 4]`, then the sign probes.
/// Total `2d + T + K`. `seed` drives the probe points.
pub fn algo_d(
    o: &mut FunctionOracle,
    h: f64,
    seed: u64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    require(o, true, "algo_d")?;
    opts.validate()?;
    check_step(h, 2.0, "(h/2)·e_i must stay in the ball")?;
    let d = o.dim();
    let start = o.queries();
    let mut basis = vec![0.0; d];
    let mut diffs = Vec::with_capacity(d);
    for i in 0..d {
        basis[i] = 1.0;
        diffs.push(symmetric_differences(o, h, std::iter::once(basis.as_slice()))?[0]);
        basis[i] = 0.0;
    }
    finish(o, &diffs, "difference vector", h, seed, start, opts)
}

/// Effective step `h̃ = (h/2)·√(d/m)`, the norm of `(h/2)φ_j`.
fn effective_step(h: f64, m: usize, d: usize) -> f64 {
    0.5 * h * (d as f64 / m as f64).sqrt()
}

/// Bound `2c₁R(2Rh̃/√d + h̃²)` on the deviation of the compressed
/// differences from `−2g'(1)Φa`.
pub fn compressed_noise_bound(h: f64, m: usize, d: usize, radius: f64, c1: f64) -> f64 {
    let ht = effective_step(h, m, d);
    2.0 * c1 * radius * (2.0 * radius * ht / (d as f64).sqrt() + ht * ht)
}

fn rows_and_step(o: &FunctionOracle, m: usize, h: f64) -> Result<()> {
    let d = o.dim();
    check_rows(m, d)?;
    if o.allows_exterior() {
        check_step(
            h,
            2.0 * (m as f64).sqrt(),
            "(h/2)·φ_j must stay in the cube",
        )
    } else {
        check_step(
            h,
            2.0 * (m as f64 / d as f64).sqrt(),
            "(h/2)·φ_j must stay in the ball",
        )
    }
}

/// Symmetric differences along Bernoulli rows, `ℓ1` minimization under
/// `‖Φz − b̃‖₂ ≤ η`, `ℓ2` normalization, sign disambiguation.
///
/// Unless overridden, `η` is [`compressed_noise_bound`] with `c₁` taken on
/// the window `[1 − δ, 1 + δ]`, `δ = 2h̃ + h̃²`, touched by the queries.
/// The smoothness constants are treated as known, like `σ`.
///
/// Query order: `f(±(h/2)φ_j)` for `j = 1..m`, table nodes, sign probes.
pub fn algo_d_cs(
    o: &mut FunctionOracle,
    m: usize,
    h: f64,
    params: CompressedRadial,
    seed: u64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    require(o, true, "algo_d_cs")?;
    opts.validate()?;
    rows_and_step(o, m, h)?;
    if !(params.radius > 0.0 && params.radius.is_finite()) {
        return invalid(format!("radius must be positive, got {}", params.radius));
    }
    let d = o.dim();
    let phi = bernoulli_matrix(m, d, seed)?;
    let start = o.queries();
    let rows: Vec<Vector> = (0..m).map(|j| phi.row(j)).collect();
    let b = symmetric_differences(o, h, rows.iter().map(|r| r.as_slice()))?;
    let eta = match params.eta {
        Some(e) => e,
        None => {
            let ht = effective_step(h, m, d);
            let delta = 2.0 * ht + ht * ht;
            let c1 = o
                .truth()
                .profile()
                .lipschitz_on(1.0 - delta, 1.0 + delta)
                .c1;
            compressed_noise_bound(h, m, d, params.radius, c1)
        }
    };
    if !(eta >= 0.0) {
        return invalid(format!("eta must be non-negative, got {eta}"));
    }
    if !(eta < la::l2(&b)) {
        return Err(Error::Degenerate(format!(
            "constraint radius {eta:.3e} admits the zero vector (‖b̃‖₂ = {:.3e})",
            la::l2(&b)
        )));
    }
    let sol = solve_l1_qc(phi.matrix(), &b, eta, &opts.solver)?;
    if !sol.converged {
        return Err(Error::Solver(format!(
            "quadratic program stopped at residual {:.3e}",
            sol.residual
        )));
    }
    finish(
        o,
        &sol.solution,
        "quadratic program solution",
        h,
        seed,
        start,
        opts,
    )
}

/// Noisy compressed radial variant: the Dantzig selector replaces the
/// quadratic program.
///
/// Each measurement is the difference of two independent noisy reads, so
/// its noise has standard deviation `√2·σ/h`; the threshold is
/// `√(2 ln d)·√2·σ/h`. Same query order as [`algo_d_cs`].
pub fn algo_d_noisy(
    o: &mut FunctionOracle,
    m: usize,
    h: f64,
    seed: u64,
    opts: &RecoveryOptions,
) -> Result<RecoveryResult> {
    require(o, false, "algo_d_noisy")?;
    opts.validate()?;
    rows_and_step(o, m, h)?;
    let d = o.dim();
    let phi = bernoulli_matrix(m, d, seed)?;
    let start = o.queries();
    let rows: Vec<Vector> = (0..m).map(|j| phi.row(j)).collect();
    let b = symmetric_differences(o, h, rows.iter().map(|r| r.as_slice()))?;
    let thresh = dantzig_lambda(d) * std::f64::consts::SQRT_2 * o.noise().sigma / h;
    let sol = solve_dantzig(phi.matrix(), &b, thresh, &opts.solver)?;
    if !sol.converged {
        return Err(Error::Solver(format!(
            "Dantzig selector stopped at residual {:.3e}",
            sol.residual
        )));
    }
    finish(
        o,
        &sol.solution,
        "Dantzig selector solution",
        h,
        seed,
        start,
        opts,
    )
}
