use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::RecoveryResult;
use crate::la;
use crate::models::{GroundTruth, ModelKind};
use crate::rng;

/// Largest `|f(x) − f̂(x)|` over `n` random domain points.
///
/// Even-indexed points are uniform in the domain. Odd-indexed points lie on
/// the segment through the true direction that spans the whole profile
/// range, since uniform points in high dimension concentrate where
/// `⟨a, x⟩ ≈ 0`. Points where `f` is not finite are skipped.
pub fn estimate_sup_error(
    truth: &GroundTruth,
    result: &RecoveryResult,
    n: usize,
    seed: u64,
) -> f64 {
    let d = truth.dim();
    let a = truth.direction();
    let mut r = rng::rng(seed);
    let mut worst = 0.0f64;
    let mut x = vec![0.0; d];
    for k in 0..n {
        if k % 2 == 0 {
            match truth.kind() {
                ModelKind::RidgeCube => x.iter_mut().for_each(|v| *v = r.random_range(-1.0..=1.0)),
                _ => {
                    x.iter_mut()
                        .for_each(|v| *v = StandardNormal.sample(&mut r));
                    let scale = r.random::<f64>().powf(1.0 / d as f64) / la::l2(&x);
                    x.iter_mut().for_each(|v| *v *= scale);
                }
            }
        } else {
            match truth.kind() {
                ModelKind::RidgeCube => {
                    let t = r.random_range(-1.0..=1.0);
                    for (xi, ai) in x.iter_mut().zip(a.iter()) {
                        *xi = t * ai.signum() * (*ai != 0.0) as u8 as f64;
                    }
                }
                ModelKind::RidgeBall => {
                    let t = r.random_range(-1.0..=1.0);
                    for (xi, ai) in x.iter_mut().zip(a.iter()) {
                        *xi = t * ai;
                    }
                }
                ModelKind::RadialBall => {
                    let t: f64 = r.random_range(0.0..=4.0);
                    let c = 1.0 - t.sqrt();
                    for (xi, ai) in x.iter_mut().zip(a.iter()) {
                        *xi = c * ai;
                    }
                }
            }
        }
        let f = truth.eval(&x);
        if f.is_finite() {
            worst = worst.max((f - result.f_hat(&x)).abs());
        }
    }
    worst
}
