use nalgebra::DMatrix;

use super::dense::{mat_tr_vec, mat_vec, weighted_gram, Cholesky};
use super::ipm::{mehrotra, IpmOutcome, Kkt};

/// Variables `(w, u)`; constraints `|w| ≤ u` and `|Gw − c| ≤ t` with
/// `G = ΦᵀΦ`, `c = Φᵀy`.
struct DsKkt<'a> {
    phi: &'a DMatrix<f64>,
    /// Explicit Gram matrix, used when it is cheaper than going through Φ.
    gram: Option<DMatrix<f64>>,
    d: usize,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    dinv_ratio: Vec<f64>,
    a: Vec<f64>,
    chol: Option<Cholesky>,
}

impl DsKkt<'_> {
    fn gram_mul(&self, x: &[f64], out: &mut [f64]) {
        match &self.gram {
            Some(g) => mat_vec(g, x, out),
            None => {
                let mut t = vec![0.0; self.phi.nrows()];
                mat_vec(self.phi, x, &mut t);
                mat_tr_vec(self.phi, &t, out);
            }
        }
    }
}

impl Kkt for DsKkt<'_> {
    fn n(&self) -> usize {
        2 * self.d
    }
    fn p(&self) -> usize {
        0
    }
    fn q(&self) -> usize {
        4 * self.d
    }
    fn cost(&self) -> &[f64] {
        &self.cost
    }
    fn ineq_rhs(&self) -> &[f64] {
        &self.rhs
    }
    fn eq_rhs(&self) -> &[f64] {
        &[]
    }
    fn a_mul(&self, x: &[f64], out: &mut [f64]) {
        let d = self.d;
        let mut gw = vec![0.0; d];
        self.gram_mul(&x[..d], &mut gw);
        for i in 0..d {
            out[i] = x[i] - x[d + i];
            out[d + i] = -x[i] - x[d + i];
            out[2 * d + i] = gw[i];
            out[3 * d + i] = -gw[i];
        }
    }
    fn at_mul(&self, z: &[f64], out: &mut [f64]) {
        let d = self.d;
        let diff: Vec<f64> = (0..d).map(|i| z[2 * d + i] - z[3 * d + i]).collect();
        let mut gd = vec![0.0; d];
        self.gram_mul(&diff, &mut gd);
        for i in 0..d {
            out[i] = z[i] - z[d + i] + gd[i];
            out[d + i] = -z[i] - z[d + i];
        }
    }
    fn e_mul(&self, _x: &[f64], _out: &mut [f64]) {}
    fn et_mul(&self, _nu: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }
    fn factor(&mut self, w: &[f64]) -> bool {
        let d = self.d;
        let mut w34 = vec![0.0; d];
        let mut diag = vec![0.0; d];
        for i in 0..d {
            let (w1, w2) = (w[i], w[d + i]);
            let a = w1 + w2;
            self.a[i] = a;
            self.dinv_ratio[i] = (w2 - w1) / a;
            diag[i] = 4.0 * w1 * w2 / a;
            w34[i] = w[2 * d + i] + w[3 * d + i];
        }
        let mut h = match &self.gram {
            Some(g) => {
                let mut gw = g.clone();
                for (j, mut col) in gw.column_iter_mut().enumerate() {
                    col *= w34[j];
                }
                &gw * g
            }
            None => {
                let phi = self.phi;
                // Φᵀ (Φ W Φᵀ) Φ
                let k = weighted_gram(phi, &w34);
                let kphi = &k * phi;
                phi.tr_mul(&kphi)
            }
        };
        for i in 0..d {
            h[(i, i)] += diag[i];
        }
        self.chol = Cholesky::factor(&h);
        self.chol.is_some()
    }
    fn solve(&self, rx: &[f64], _re: &[f64], dx: &mut [f64], _dnu: &mut [f64]) {
        let d = self.d;
        let mut rt: Vec<f64> = (0..d)
            .map(|i| rx[i] - self.dinv_ratio[i] * rx[d + i])
            .collect();
        self.chol
            .as_ref()
            .expect("factored")
            .solve_in_place(&mut rt);
        for i in 0..d {
            dx[i] = rt[i];
            dx[d + i] = rx[d + i] / self.a[i] - self.dinv_ratio[i] * rt[i];
        }
    }
    fn start(&self) -> Vec<f64> {
        vec![0.0; 2 * self.d]
    }
}

pub(crate) fn solve(
    phi: &DMatrix<f64>,
    y: &[f64],
    thresh: f64,
    tol: f64,
    max_iter: usize,
) -> IpmOutcome {
    let (m, d) = phi.shape();
    let mut c = vec![0.0; d];
    mat_tr_vec(phi, y, &mut c);
    let mut rhs = vec![0.0; 4 * d];
    for i in 0..d {
        rhs[2 * d + i] = c[i] + thresh;
        rhs[3 * d + i] = thresh - c[i];
    }
    let gram = (m >= d).then(|| phi.tr_mul(phi));
    let mut kkt = DsKkt {
        phi,
        gram,
        d,
        cost: [vec![0.0; d], vec![1.0; d]].concat(),
        rhs,
        dinv_ratio: vec![0.0; d],
        a: vec![0.0; d],
        chol: None,
    };
    let mut out = mehrotra(&mut kkt, tol * 1e-2, tol, max_iter);
    out.x.truncate(d);
    out
}
