use nalgebra::DMatrix;
use rand::RngCore;

use super::Vector;
use crate::error::{invalid, Result};
use crate::rng;

/// A normalized Bernoulli matrix: every entry is `±1/√m`, drawn from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    seed: u64,
    matrix: DMatrix<f64>,
}

impl SensingMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Row `j` as a vector of length `d`.
    pub fn row(&self, j: usize) -> Vector {
        Vector(self.matrix.row(j).iter().copied().collect())
    }
}

/// Draws an `m × d` normalized Bernoulli matrix.
///
/// Entries are filled row by row, one random bit per entry, so the result is
/// a pure function of `(m, d, seed)`.
pub fn bernoulli_matrix(m: usize, d: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || d == 0 {
        return invalid(format!("sensing matrix needs m, d >= 1, got {m} x {d}"));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut rng = rng::rng(seed);
    let mut bits = 0u64;
    let mut left = 0u32;
    let mut matrix = DMatrix::zeros(m, d);
    for i in 0..m {
        for j in 0..d {
            if left == 0 {
                bits = rng.next_u64();
                left = 64;
            }
            matrix[(i, j)] = if bits & 1 == 1 { scale } else { -scale };
            bits >>= 1;
            left -= 1;
        }
    }
    Ok(SensingMatrix { seed, matrix })
}
