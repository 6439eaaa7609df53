//! Dense vectors, the norms used by the recovery analysis, Bernoulli sensing
//! matrices and a brute-force restricted isometry oracle.

mod rip;
mod sensing;

pub use rip::{rip_constant_exhaustive, RipEstimate, RIP_WORK_LIMIT};
pub use sensing::{bernoulli_matrix, SensingMatrix};

use std::ops::Deref;

use crate::error::{invalid, Result};

/// A dense real vector with at least one entry, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return invalid("vector must have at least one entry");
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return invalid(format!("entry {i} is not finite"));
        }
        Ok(Vector(entries))
    }

    /// The zero vector of length `d`, `d >= 1`.
    pub fn zeros(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d])
    }

    /// Canonical basis vector `e_i` of length `d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return invalid(format!("basis index {i} out of range for length {d}"));
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Self::new(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `‖x - y‖₁`.
pub fn dist_l1(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

/// `‖x - y‖₂`.
pub fn dist_l2(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => invalid(format!("entry {i} is not finite")),
        None => Ok(()),
    }
}

/// `‖x‖_p` for `p` in `[0, ∞]`: the number of nonzero entries for `p = 0`,
/// the maximum modulus for `p = ∞`, and `(Σ|x_i|^p)^{1/p}` otherwise.
pub fn norm_lp(x: &[f64], p: f64) -> Result<f64> {
    check_finite(x)?;
    if p.is_nan() || p < 0.0 {
        return invalid(format!("p must lie in [0, inf], got {p}"));
    }
    Ok(if p == 0.0 {
        x.iter().filter(|v| **v != 0.0).count() as f64
    } else if p == f64::INFINITY {
        linf(x)
    } else if p == 1.0 {
        l1(x)
    } else if p == 2.0 {
        l2(x)
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    })
}

/// Weak `ℓ_p` quasi-norm `max_k k^{1/p} x_(k)` over the non-increasing
/// rearrangement of `|x|`.
pub fn norm_weak_lp(x: &[f64], p: f64) -> Result<f64> {
    check_finite(x)?;
    if !(p > 0.0) || !p.is_finite() {
        return invalid(format!("weak lp norm needs 0 < p < inf, got {p}"));
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    Ok(mags
        .iter()
        .enumerate()
        .map(|(k, v)| ((k + 1) as f64).powf(1.0 / p) * v)
        .fold(0.0, f64::max))
}

/// Best `s`-term approximation error `σ_s(x)₁`: the sum of the `d - s`
/// smallest moduli.
pub fn best_s_term_error(x: &[f64], s: usize) -> Result<f64> {
    check_finite(x)?;
    if s > x.len() {
        return invalid(format!("s = {s} exceeds length {}", x.len()));
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| a.total_cmp(b));
    Ok(mags[..x.len() - s].iter().sum())
}

/// Entrywise sign with `sign(0) = 0`.
pub fn sign_vec(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// `‖y‖_J = max{√m ‖y‖_∞, √(m / ln(d/m)) ‖y‖₂}` for `y ∈ ℝ^m`, `d > m`.
pub fn norm_j(y: &[f64], d: usize) -> Result<f64> {
    check_finite(y)?;
    let m = y.len();
    if m == 0 || d <= m {
        return invalid(format!("norm_J needs d > m >= 1, got m = {m}, d = {d}"));
    }
    let mf = m as f64;
    let log_ratio = (d as f64 / mf).ln();
    Ok((mf.sqrt() * linf(y)).max((mf / log_ratio).sqrt() * l2(y)))
}

/// Returns `x / ‖x‖₁`.
pub fn normalize_l1(x: &[f64]) -> Option<Vec<f64>> {
    let n = l1(x);
    (n > 0.0 && n.is_finite()).then(|| x.iter().map(|v| v / n).collect())
}

/// Returns `x / ‖x‖₂`.
pub fn normalize_l2(x: &[f64]) -> Option<Vec<f64>> {
    let n = l2(x);
    (n > 0.0 && n.is_finite()).then(|| x.iter().map(|v| v / n).collect())
}
