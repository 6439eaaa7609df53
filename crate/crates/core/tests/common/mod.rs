//! Brute-force reference implementations used as test oracles. Nothing here
//! calls into the library's solvers.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// All k-subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn full_column_rank(a: &DMatrix<f64>) -> bool {
    if a.ncols() > a.nrows() {
        return false;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    max > 0.0 && min > 1e-9 * max
}

/// Minimum of `‖w‖₁` over `Φw = y` by enumerating basic solutions.
pub fn l1_eq_oracle(phi: &DMatrix<f64>, y: &[f64]) -> f64 {
    let (m, d) = phi.shape();
    let yv = DVector::from_column_slice(y);
    if l2(y) == 0.0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for k in 1..=m.min(d) {
        for s in subsets(d, k) {
            let sub = phi.select_columns(&s);
            if !full_column_rank(&sub) {
                continue;
            }
            let sol = sub.clone().svd(true, true).solve(&yv, 1e-14).unwrap();
            if (&sub * &sol - &yv).norm() <= 1e-9 * (1.0 + yv.norm()) {
                best = best.min(sol.iter().map(|v| v.abs()).sum());
            }
        }
    }
    best
}

/// Minimum of `‖w‖₁` over `‖Φw − y‖₂ ≤ η` by exhaustive face enumeration:
/// for each support `S` with independent columns and each sign pattern `σ`
/// the face problem `min σᵀw` over the ellipsoid has the closed form
/// `w = w_LS − √(η² − ‖r₀‖²) M⁻¹σ / √(σᵀM⁻¹σ)` with `M = Φ_SᵀΦ_S`.
pub fn l1_qc_oracle(phi: &DMatrix<f64>, y: &[f64], eta: f64) -> f64 {
    let (m, d) = phi.shape();
    let yv = DVector::from_column_slice(y);
    if yv.norm() <= eta {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for k in 1..=m.min(d) {
        for s in subsets(d, k) {
            let sub = phi.select_columns(&s);
            if !full_column_rank(&sub) {
                continue;
            }
            let gram = sub.transpose() * &sub;
            let minv = gram.clone().try_inverse().unwrap();
            let wls = &minv * (sub.transpose() * &yv);
            let r0 = (&sub * &wls - &yv).norm();
            if r0 > eta {
                continue;
            }
            let slack = (eta * eta - r0 * r0).max(0.0).sqrt();
            for pattern in 0..(1u32 << k) {
                let sigma = DVector::from_iterator(
                    k,
                    (0..k).map(|i| if pattern >> i & 1 == 1 { -1.0 } else { 1.0 }),
                );
                let ms = &minv * &sigma;
                let q = sigma.dot(&ms);
                let w = &wls - ms * (slack / q.sqrt());
                best = best.min(w.iter().map(|v| v.abs()).sum());
            }
        }
    }
    best
}

/// Solves a small dense square system, `None` when singular.
fn solve_square(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    let lu = a.lu();
    let x = lu.solve(&b)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Minimum of `‖w‖₁` over `‖Φᵀ(y − Φw)‖∞ ≤ t` by vertex enumeration of the
/// hyperplane arrangement `{wᵢ = 0} ∪ {(Gw)ₖ = cₖ ± t}`, `G = ΦᵀΦ`.
pub fn dantzig_oracle(phi: &DMatrix<f64>, y: &[f64], t: f64) -> f64 {
    let d = phi.ncols();
    let g = phi.transpose() * phi;
    let c = phi.transpose() * DVector::from_column_slice(y);
    // Hyperplane j: row(j)·w = rhs(j).
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        rows.push(e);
        rhs.push(0.0);
    }
    for k in 0..d {
        let row: Vec<f64> = (0..d).map(|j| g[(k, j)]).collect();
        rows.push(row.clone());
        rhs.push(c[k] + t);
        rows.push(row);
        rhs.push(c[k] - t);
    }
    let feasible = |w: &DVector<f64>| {
        let r = &c - &g * w;
        r.iter().all(|v| v.abs() <= t * (1.0 + 1e-9) + 1e-9)
    };
    let mut best = f64::INFINITY;
    if feasible(&DVector::zeros(d)) {
        return 0.0;
    }
    for s in subsets(rows.len(), d) {
        let a = DMatrix::from_fn(d, d, |i, j| rows[s[i]][j]);
        let b = DVector::from_iterator(d, s.iter().map(|&i| rhs[i]));
        if let Some(w) = solve_square(a.clone(), b.clone()) {
            if (&a * &w - &b).norm() > 1e-9 * (1.0 + b.norm()) {
                continue;
            }
            if feasible(&w) {
                best = best.min(w.iter().map(|v| v.abs()).sum());
            }
        }
    }
    best
}

/// `min over s-sparse z of ‖x − z‖₁` by trying every support.
pub fn best_s_term_brute(x: &[f64], s: usize) -> f64 {
    let d = x.len();
    let total = l1(x);
    subsets(d, s)
        .into_iter()
        .map(|sup| total - sup.iter().map(|&i| x[i].abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// Soft thresholding, the closed-form Dantzig solution for `Φ = I`.
pub fn soft_threshold(y: &[f64], t: f64) -> Vec<f64> {
    y.iter()
        .map(|v| v.signum() * (v.abs() - t).max(0.0))
        .collect()
}

/// Small deterministic generator independent of the library's RNG plumbing.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed ^ 0x5DEECE66D)
    }
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
    pub fn matrix(&mut self, m: usize, d: usize) -> DMatrix<f64> {
        DMatrix::from_fn(m, d, |_, _| self.normal())
    }
    pub fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}
