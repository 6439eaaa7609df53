use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// Maximum number of column subsets enumerated by [`rip_constant_exhaustive`].
pub const RIP_WORK_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipEstimate {
    pub order: usize,
    pub delta: f64,
    /// True when computed by enumerating every support of size `order`.
    pub exact: bool,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u128::MAX / 1024 {
            return u128::MAX;
        }
    }
    acc
}

/// Restricted isometry constant `δ_s` by enumerating all supports of size `s`.
///
/// For each support the Gram matrix of the selected columns is diagonalized
/// and the deviation `max(λ_max - 1, 1 - λ_min)` is recorded. Refuses when
/// `C(d, s)` exceeds [`RIP_WORK_LIMIT`].
pub fn rip_constant_exhaustive(phi: &DMatrix<f64>, s: usize) -> Result<RipEstimate> {
    let d = phi.ncols();
    if s == 0 || s > d {
        return invalid(format!("order s = {s} must satisfy 1 <= s <= d = {d}"));
    }
    let required = binomial(d, s);
    if required > RIP_WORK_LIMIT {
        return Err(Error::WorkLimit {
            required,
            limit: RIP_WORK_LIMIT,
        });
    }
    let gram = phi.transpose() * phi;
    let mut support: Vec<usize> = (0..s).collect();
    let mut delta: f64 = 0.0;
    let mut sub = DMatrix::zeros(s, s);
    loop {
        if s == 1 {
            let g = gram[(support[0], support[0])];
            delta = delta.max((g - 1.0).abs());
        } else {
            for (a, &i) in support.iter().enumerate() {
                for (b, &j) in support.iter().enumerate() {
                    sub[(a, b)] = gram[(i, j)];
                }
            }
            let eig = SymmetricEigen::new(sub.clone()).eigenvalues;
            let lmax = eig.max();
            let lmin = eig.min();
            delta = delta.max(lmax - 1.0).max(1.0 - lmin);
        }
        // Next combination in lexicographic order.
        let mut i = s;
        while i > 0 && support[i - 1] == d - s + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        support[i - 1] += 1;
        for k in i..s {
            support[k] = support[k - 1] + 1;
        }
    }
    Ok(RipEstimate {
        order: s,
        delta,
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_matrix_is_an_isometry() {
        let q = DMatrix::<f64>::identity(5, 5);
        for s in 1..=5 {
            assert!(rip_constant_exhaustive(&q, s).unwrap().delta < 1e-14);
        }
        // A rotation is orthonormal but not the identity.
        let (c, s) = (0.6, 0.8);
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        assert!(rip_constant_exhaustive(&rot, 2).unwrap().delta < 1e-14);
    }

    #[test]
    fn one_by_two_all_ones() {
        let phi = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let d2 = rip_constant_exhaustive(&phi, 2).unwrap();
        assert!((d2.delta - 1.0).abs() < 1e-14);
        assert!(d2.exact);
        assert_eq!(rip_constant_exhaustive(&phi, 1).unwrap().delta, 0.0);
    }

    #[test]
    fn work_limit_refuses() {
        let phi = DMatrix::<f64>::identity(4, 60);
        assert!(matches!(
            rip_constant_exhaustive(&phi, 10),
            Err(Error::WorkLimit { .. })
        ));
        assert!(rip_constant_exhaustive(&phi, 0).is_err());
        assert!(rip_constant_exhaustive(&phi, 61).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(14, 7), 3432);
        assert_eq!(binomial(10, 10), 1);
    }
}
