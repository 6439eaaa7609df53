use crate::error::{invalid, Result};

/// Default number of nodes in a profile table.
pub const DEFAULT_TABLE_SIZE: usize = 1024;

/// Piecewise-linear interpolant on a uniform grid over `[lo, hi]`,
/// clamped outside the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl ProfileTable {
    /// Samples `f` at the nodes in increasing order. Stops at the first error.
    pub fn build<F>(lo: f64, hi: f64, size: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if size < 2 {
            return invalid(format!("table needs at least 2 nodes, got {size}"));
        }
        if !(lo < hi) {
            return invalid(format!("empty table interval [{lo}, {hi}]"));
        }
        let mut values = Vec::with_capacity(size);
        for i in 0..size {
            values.push(f(node(lo, hi, size, i))?);
        }
        Ok(ProfileTable { lo, hi, values })
    }

    pub fn from_values(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(lo < hi) {
            return invalid("table needs at least 2 nodes on a non-empty interval");
        }
        Ok(ProfileTable { lo, hi, values })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| node(self.lo, self.hi, self.values.len(), i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let step = (self.hi - self.lo) / (n - 1) as f64;
        let pos = ((t - self.lo) / step).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let frac = pos - i as f64;
        if frac == 0.0 {
            return self.values[i];
        }
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Table of `t ↦ self(φ(t))` on the same grid.
    pub fn remap(&self, phi: impl Fn(f64) -> f64) -> Self {
        let values = self.nodes().map(|t| self.eval(phi(t))).collect();
        ProfileTable {
            lo: self.lo,
            hi: self.hi,
            values,
        }
    }
}

fn node(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_data_is_reproduced() {
        let t = ProfileTable::build(-1.0, 1.0, 11, |x| Ok(3.0 * x - 1.0)).unwrap();
        for x in [-1.0, -0.55, 0.0, 0.123, 1.0] {
            assert!((t.eval(x) - (3.0 * x - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn clamps_outside() {
        let t = ProfileTable::build(0.0, 4.0, 5, |x| Ok(x * x)).unwrap();
        assert_eq!(t.eval(-1.0), 0.0);
        assert_eq!(t.eval(9.0), 16.0);
        assert_eq!(t.eval(2.5), 6.5);
    }

    #[test]
    fn endpoints_are_exact_nodes() {
        let t = ProfileTable::build(-1.0, 1.0, 1024, Ok).unwrap();
        let nodes: Vec<f64> = t.nodes().collect();
        assert_eq!(nodes[0], -1.0);
        assert_eq!(nodes[1023], 1.0);
    }

    #[test]
    fn rejects_tiny_tables() {
        assert!(ProfileTable::build(0.0, 1.0, 1, Ok).is_err());
    }
}
