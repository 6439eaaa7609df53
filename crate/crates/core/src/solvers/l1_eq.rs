use nalgebra::{DMatrix, DVector};

use super::dense::{mat_tr_vec, mat_vec, weighted_gram, Cholesky};
use super::ipm::{mehrotra, Kkt};

/// Equality system with full row rank obtained from an SVD of the original.
pub(crate) struct Reduced {
    pub phi: DMatrix<f64>,
    pub y: Vec<f64>,
}

/// Replaces `Φw = y` by the equivalent `Σ_r V_rᵀ w = U_rᵀ y` over the
/// numerically nonzero singular values.
pub(crate) fn reduce_rows(phi: &DMatrix<f64>, y: &[f64]) -> Reduced {
    let (m, d) = phi.shape();
    let svd = phi.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested Vᵀ");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = smax * (m.max(d) as f64) * 4.0 * f64::EPSILON;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    let r = keep.len();
    let yv = DVector::from_column_slice(y);
    let mut phi_r = DMatrix::zeros(r, d);
    let mut y_r = vec![0.0; r];
    for (row, &i) in keep.iter().enumerate() {
        let sv = svd.singular_values[i];
        let ui = u.column(i);
        let c = ui.dot(&yv);
        y_r[row] = c;
        for j in 0..d {
            phi_r[(row, j)] = sv * vt[(i, j)];
        }
    }
    Reduced { phi: phi_r, y: y_r }
}

/// Variables `(w, u)` with `|w| ≤ u`, objective `Σu`, constraint `Φw = y`.
struct EqKkt<'a> {
    phi: &'a DMatrix<f64>,
    d: usize,
    cost: Vec<f64>,
    zeros: Vec<f64>,
    y: &'a [f64],
    dinv: Vec<f64>,
    ratio: Vec<f64>,
    a: Vec<f64>,
    chol: Option<Cholesky>,
}

impl Kkt for EqKkt<'_> {
    fn n(&self) -> usize {
        2 * self.d
    }
    fn p(&self) -> usize {
        self.phi.nrows()
    }
    fn q(&self) -> usize {
        2 * self.d
    }
    fn cost(&self) -> &[f64] {
        &self.cost
    }
    fn ineq_rhs(&self) -> &[f64] {
        &self.zeros
    }
    fn eq_rhs(&self) -> &[f64] {
        self.y
    }
    fn a_mul(&self, x: &[f64], out: &mut [f64]) {
        let d = self.d;
        for i in 0..d {
            out[i] = x[i] - x[d + i];
            out[d + i] = -x[i] - x[d + i];
        }
    }
    fn at_mul(&self, z: &[f64], out: &mut [f64]) {
        let d = self.d;
        for i in 0..d {
            out[i] = z[i] - z[d + i];
            out[d + i] = -z[i] - z[d + i];
        }
    }
    fn e_mul(&self, x: &[f64], out: &mut [f64]) {
        mat_vec(self.phi, &x[..self.d], out);
    }
    fn et_mul(&self, nu: &[f64], out: &mut [f64]) {
        mat_tr_vec(self.phi, nu, &mut out[..self.d]);
        out[self.d..].iter_mut().for_each(|v| *v = 0.0);
    }
    fn factor(&mut self, w: &[f64]) -> bool {
        let d = self.d;
        for i in 0..d {
            let (w1, w2) = (w[i], w[d + i]);
            let a = w1 + w2;
            self.a[i] = a;
            self.ratio[i] = (w2 - w1) / a;
            self.dinv[i] = a / (4.0 * w1 * w2);
        }
        if self.dinv.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let k = weighted_gram(self.phi, &self.dinv);
        self.chol = Cholesky::factor(&k);
        self.chol.is_some()
    }
    fn solve(&self, rx: &[f64], re: &[f64], dx: &mut [f64], dnu: &mut [f64]) {
        let d = self.d;
        let m = self.phi.nrows();
        let rt: Vec<f64> = (0..d).map(|i| rx[i] - self.ratio[i] * rx[d + i]).collect();
        let scaled: Vec<f64> = (0..d).map(|i| self.dinv[i] * rt[i]).collect();
        mat_vec(self.phi, &scaled, dnu);
        for i in 0..m {
            dnu[i] -= re[i];
        }
        self.chol.as_ref().expect("factored").solve_in_place(dnu);
        let mut ptn = vec![0.0; d];
        mat_tr_vec(self.phi, dnu, &mut ptn);
        for i in 0..d {
            let dw = self.dinv[i] * (rt[i] - ptn[i]);
            dx[i] = dw;
            // u row: bb dw + a du = ru, bb = a * ratio.
            dx[d + i] = rx[d + i] / self.a[i] - self.ratio[i] * dw;
        }
    }
    fn start(&self) -> Vec<f64> {
        let d = self.d;
        let mut x = vec![0.0; 2 * d];
        // Least-norm point of the reduced system (full row rank).
        let g = weighted_gram(self.phi, &vec![1.0; d]);
        if let Some(ch) = Cholesky::factor(&g) {
            let mut t = self.y.to_vec();
            ch.solve_in_place(&mut t);
            mat_tr_vec(self.phi, &t, &mut x[..d]);
        }
        let scale = x[..d].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            x[d + i] = 0.95 * x[i].abs() + 0.1 * scale.max(1e-3);
        }
        x
    }
}

pub(crate) struct EqOutcome {
    pub w: Vec<f64>,
    pub iterations: usize,
    pub ipm_converged: bool,
    pub dual_obj: f64,
}

/// Minimizes `‖w‖₁` subject to `Φw = y` for a full-row-rank `Φ`.
pub(crate) fn solve_reduced(phi: &DMatrix<f64>, y: &[f64], tol: f64, max_iter: usize) -> EqOutcome {
    let (m, d) = phi.shape();
    if m == 0 || y.iter().all(|v| *v == 0.0) {
        return EqOutcome {
            w: vec![0.0; d],
            iterations: 0,
            ipm_converged: true,
            dual_obj: 0.0,
        };
    }
    let mut kkt = EqKkt {
        phi,
        d,
        cost: [vec![0.0; d], vec![1.0; d]].concat(),
        zeros: vec![0.0; 2 * d],
        y,
        dinv: vec![0.0; d],
        ratio: vec![0.0; d],
        a: vec![0.0; d],
        chol: None,
    };
    // Interior-point tolerance is tighter than the caller's; polishing then
    // removes the remaining interior offset.
    let out = mehrotra(&mut kkt, tol * 1e-2, tol, max_iter);
    let mut w = out.x[..d].to_vec();
    polish(phi, y, &mut w, tol);
    EqOutcome {
        w,
        iterations: out.iterations,
        ipm_converged: out.converged,
        dual_obj: out.dual_obj,
    }
}

/// Tries least-squares refits on thresholded supports of `w` and keeps the
/// best one that stays feasible and does not raise the objective.
fn polish(phi: &DMatrix<f64>, y: &[f64], w: &mut Vec<f64>, tol: f64) {
    let (m, d) = phi.shape();
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let wmax = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if wmax == 0.0 {
        return;
    }
    let resid = |x: &[f64]| {
        let mut r = vec![0.0; m];
        mat_vec(phi, x, &mut r);
        r.iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / ynorm
    };
    let l1 = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
    let mut best_obj = l1(w);
    let mut best_res = resid(w);
    let mut last_support: Option<Vec<usize>> = None;
    for rel in [1e-10, 1e-8, 1e-6, 1e-4, 1e-2] {
        let support: Vec<usize> = (0..d).filter(|&i| w[i].abs() > rel * wmax).collect();
        if support.is_empty() || support.len() > m {
            continue;
        }
        if last_support.as_ref() == Some(&support) {
            continue;
        }
        let sub = phi.select_columns(&support);
        let yv = DVector::from_column_slice(y);
        let Ok(sol) = sub.svd(true, true).solve(&yv, 1e-13) else {
            last_support = Some(support);
            continue;
        };
        let mut cand = vec![0.0; d];
        for (k, &i) in support.iter().enumerate() {
            cand[i] = sol[k];
        }
        let res = resid(&cand);
        let obj = l1(&cand);
        let feasible = res <= (0.1 * tol).max(best_res);
        if feasible && obj <= best_obj * (1.0 + 1e-2 * tol) + 1e-300 {
            *w = cand;
            best_obj = obj;
            best_res = res;
        }
        last_support = Some(support);
    }
}
