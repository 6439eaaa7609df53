//! Log-barrier Newton method for `min ‖w‖₁  s.t.  ‖Φw − y‖₂ ≤ η`.

use nalgebra::{DMatrix, DVector};

use super::dense::{mat_tr_vec, mat_vec, weighted_gram, Cholesky};
use super::homotopy;

pub(crate) struct QcOutcome {
    pub w: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub dual_obj: f64,
    /// `false` when no strictly feasible point exists.
    pub feasible: bool,
}

const BARRIER_GROWTH: f64 = 10.0;
const NEWTON_MAX: usize = 60;
const BACKTRACK_ALPHA: f64 = 0.01;
const BACKTRACK_BETA: f64 = 0.5;

/// Reduced Newton matrix `diag(dd) + α ΦᵀΦ + β ggᵀ`, solved either directly
/// or through the Woodbury identity when `d` dominates `m`.
struct NewtonSystem<'a> {
    phi: &'a DMatrix<f64>,
    gram: Option<&'a DMatrix<f64>>,
    dd: Vec<f64>,
    alpha: f64,
    beta: f64,
    g: Vec<f64>,
}

impl NewtonSystem<'_> {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let mut t = vec![0.0; self.phi.nrows()];
        mat_vec(self.phi, x, &mut t);
        let mut out = vec![0.0; d];
        mat_tr_vec(self.phi, &t, &mut out);
        let gx: f64 = self.g.iter().zip(x).map(|(a, b)| a * b).sum();
        for i in 0..d {
            out[i] = self.dd[i] * x[i] + self.alpha * out[i] + self.beta * gx * self.g[i];
        }
        out
    }

    fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        match self.gram {
            Some(gram) => self.solve_direct(gram, rhs),
            None => self.solve_woodbury(rhs),
        }
    }

    fn solve_direct(&self, gram: &DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
        let d = rhs.len();
        let mut h = gram * self.alpha;
        for j in 0..d {
            for i in 0..d {
                h[(i, j)] += self.beta * self.g[i] * self.g[j];
            }
            h[(j, j)] += self.dd[j];
        }
        let ch = Cholesky::factor(&h)?;
        let mut x = rhs.to_vec();
        ch.solve_in_place(&mut x);
        Some(x)
    }

    fn solve_woodbury(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let (m, d) = self.phi.shape();
        let mut b = DMatrix::zeros(m + 1, d);
        b.rows_mut(0, m).copy_from(self.phi);
        for j in 0..d {
            b[(m, j)] = self.g[j];
        }
        let dinv: Vec<f64> = self.dd.iter().map(|v| 1.0 / v).collect();
        let mut s = weighted_gram(&b, &dinv);
        for i in 0..m {
            s[(i, i)] += 1.0 / self.alpha;
        }
        s[(m, m)] += 1.0 / self.beta;
        let ch = Cholesky::factor(&s)?;
        let once = |r: &[f64]| {
            let dr: Vec<f64> = r.iter().zip(&dinv).map(|(a, b)| a * b).collect();
            let mut t = vec![0.0; m + 1];
            mat_vec(&b, &dr, &mut t);
            ch.solve_in_place(&mut t);
            let mut bt = vec![0.0; d];
            mat_tr_vec(&b, &t, &mut bt);
            dr.iter()
                .zip(bt.iter().zip(&dinv))
                .map(|(x, (y, di))| x - di * y)
                .collect::<Vec<f64>>()
        };
        let mut x = once(rhs);
        for _ in 0..2 {
            let hx = self.apply(&x);
            let res: Vec<f64> = rhs.iter().zip(&hx).map(|(a, b)| a - b).collect();
            let corr = once(&res);
            for (xi, ci) in x.iter_mut().zip(corr) {
                *xi += ci;
            }
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

fn barrier_value(tau: f64, w: &[f64], u: &[f64], r: &[f64], eta: f64) -> f64 {
    let fq = 0.5 * (r.iter().map(|v| v * v).sum::<f64>() - eta * eta);
    if fq >= 0.0 {
        return f64::INFINITY;
    }
    let mut val = tau * u.iter().sum::<f64>() - (-fq).ln();
    for (wi, ui) in w.iter().zip(u) {
        let (f1, f2) = (wi - ui, -wi - ui);
        if f1 >= 0.0 || f2 >= 0.0 {
            return f64::INFINITY;
        }
        val -= (-f1).ln() + (-f2).ln();
    }
    val
}

/// Largest `s` with `‖r + s·dr‖ ≤ η`.
fn quad_step(r: &[f64], dr: &[f64], eta: f64) -> f64 {
    let a: f64 = dr.iter().map(|v| v * v).sum();
    let b: f64 = 2.0 * r.iter().zip(dr).map(|(x, y)| x * y).sum::<f64>();
    let c: f64 = r.iter().map(|v| v * v).sum::<f64>() - eta * eta;
    if a == 0.0 {
        return f64::INFINITY;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    // Stable positive root of a s² + b s + c with c < 0.
    if b >= 0.0 {
        (2.0 * c) / (-b - sq)
    } else {
        (-b + sq) / (2.0 * a)
    }
}

pub(crate) fn solve(
    phi: &DMatrix<f64>,
    y: &[f64],
    eta: f64,
    tol: f64,
    max_iter: usize,
) -> QcOutcome {
    let (m, d) = phi.shape();
    let yv = DVector::from_column_slice(y);
    let w0 = phi
        .clone()
        .svd(true, true)
        .solve(&yv, 1e-14)
        .map(|v| v.as_slice().to_vec())
        .unwrap_or_else(|_| vec![0.0; d]);
    let mut r = vec![0.0; m];
    let residual = |w: &[f64], r: &mut Vec<f64>| {
        mat_vec(phi, w, r);
        for (ri, yi) in r.iter_mut().zip(y) {
            *ri -= yi;
        }
    };
    residual(&w0, &mut r);
    let r0 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r0 >= eta {
        return QcOutcome {
            w: w0,
            iterations: 0,
            converged: false,
            dual_obj: f64::NAN,
            feasible: false,
        };
    }

    if let Some(path) = homotopy::solve(phi, y, eta, max_iter.min(20 * (m + d))) {
        let mut rp = vec![0.0; m];
        residual(&path.w, &mut rp);
        let feasible = rp.iter().map(|v| v * v).sum::<f64>().sqrt() <= eta * (1.0 + tol);
        let objective: f64 = path.w.iter().map(|v| v.abs()).sum();
        let dual = residual_certificate(phi, y, eta, &path.w);
        if feasible && objective - dual <= tol * objective.max(1.0) {
            return QcOutcome {
                w: path.w,
                iterations: path.steps,
                converged: true,
                dual_obj: dual,
                feasible: true,
            };
        }
    }

    barrier(phi, y, eta, w0, tol, max_iter)
}

/// Log-barrier path following from a strictly feasible `w0`, with an
/// active-face polish after each centering.
fn barrier(
    phi: &DMatrix<f64>,
    y: &[f64],
    eta: f64,
    w0: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> QcOutcome {
    let (m, d) = phi.shape();
    let mut r = vec![0.0; m];
    let residual = |w: &[f64], r: &mut Vec<f64>| {
        mat_vec(phi, w, r);
        for (ri, yi) in r.iter_mut().zip(y) {
            *ri -= yi;
        }
    };
    let gram = (d <= 2 * (m + 1) || d <= 64).then(|| phi.tr_mul(phi));
    let mut w = w0;
    let wmax = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut u: Vec<f64> = w
        .iter()
        .map(|v| 0.95 * v.abs() + 0.1 * wmax.max(1e-6))
        .collect();
    let ncons = (2 * d + 1) as f64;
    let l1_start: f64 = w.iter().map(|v| v.abs()).sum();
    let mut tau = (ncons / l1_start.max(1e-12)).max(1.0);

    let mut total_newton = 0usize;
    let mut best_dual = f64::NEG_INFINITY;
    let mut converged = false;
    let mut dw = vec![0.0; d];
    let mut du = vec![0.0; d];
    let mut dr = vec![0.0; m];
    let mut g = vec![0.0; d];

    'outer: loop {
        for _ in 0..NEWTON_MAX {
            if total_newton >= max_iter {
                break 'outer;
            }
            total_newton += 1;
            residual(&w, &mut r);
            let fq = 0.5 * (r.iter().map(|v| v * v).sum::<f64>() - eta * eta);
            mat_tr_vec(phi, &r, &mut g);
            let mut gw = vec![0.0; d];
            let mut gu = vec![0.0; d];
            let mut s11 = vec![0.0; d];
            let mut s12 = vec![0.0; d];
            let mut dd = vec![0.0; d];
            for i in 0..d {
                let f1 = w[i] - u[i];
                let f2 = -w[i] - u[i];
                gw[i] = -1.0 / f1 + 1.0 / f2 - g[i] / fq;
                gu[i] = tau + 1.0 / f1 + 1.0 / f2;
                let (i1, i2) = (1.0 / (f1 * f1), 1.0 / (f2 * f2));
                s11[i] = i1 + i2;
                s12[i] = i2 - i1;
                dd[i] = 4.0 / (f1 * f1 + f2 * f2);
            }
            let sys = NewtonSystem {
                phi,
                gram: gram.as_ref(),
                dd,
                alpha: -1.0 / fq,
                beta: 1.0 / (fq * fq),
                g: g.clone(),
            };
            let rhs: Vec<f64> = (0..d).map(|i| -gw[i] + s12[i] * gu[i] / s11[i]).collect();
            let Some(step_w) = sys.solve(&rhs) else {
                break 'outer;
            };
            dw.copy_from_slice(&step_w);
            for i in 0..d {
                du[i] = (-gu[i] - s12[i] * dw[i]) / s11[i];
            }
            let decrement: f64 = -(0..d).map(|i| gw[i] * dw[i] + gu[i] * du[i]).sum::<f64>();
            if !decrement.is_finite() {
                break 'outer;
            }
            if decrement * 0.5 < 1e-12 {
                break;
            }

            mat_vec(phi, &dw, &mut dr);
            let mut smax = quad_step(&r, &dr, eta);
            for i in 0..d {
                let (f1, f2) = (w[i] - u[i], -w[i] - u[i]);
                let (d1, d2) = (dw[i] - du[i], -dw[i] - du[i]);
                if d1 > 0.0 {
                    smax = smax.min(-f1 / d1);
                }
                if d2 > 0.0 {
                    smax = smax.min(-f2 / d2);
                }
            }
            let mut s = (0.99 * smax).min(1.0);
            let f0 = barrier_value(tau, &w, &u, &r, eta);
            let slope = -decrement;
            let mut wp = vec![0.0; d];
            let mut up = vec![0.0; d];
            let mut rp = vec![0.0; m];
            let mut accepted = false;
            for _ in 0..60 {
                for i in 0..d {
                    wp[i] = w[i] + s * dw[i];
                    up[i] = u[i] + s * du[i];
                }
                for j in 0..m {
                    rp[j] = r[j] + s * dr[j];
                }
                let fnew = barrier_value(tau, &wp, &up, &rp, eta);
                if fnew <= f0 + BACKTRACK_ALPHA * s * slope {
                    accepted = true;
                    break;
                }
                s *= BACKTRACK_BETA;
            }
            if !accepted {
                break;
            }
            w.copy_from_slice(&wp);
            u.copy_from_slice(&up);
            if s < 1e-14 {
                break;
            }
        }

        let dual = residual_certificate(phi, y, eta, &w);
        if dual.is_finite() {
            best_dual = best_dual.max(dual);
        }
        let obj: f64 = w.iter().map(|v| v.abs()).sum();
        if obj - best_dual <= tol * obj.max(1.0) {
            converged = true;
            break;
        }
        if let Some(face) = polish_face(phi, y, eta, &w) {
            if face.objective - face.dual <= tol * face.objective.max(1.0) {
                w = face.w;
                best_dual = face.dual;
                converged = true;
                break;
            }
        }
        if ncons / tau < 1e-3 * tol * obj.max(1.0) * 1e-3 {
            // Barrier parameter far beyond what the certificate needs; the
            // duality gap stalled numerically.
            break;
        }
        tau *= BARRIER_GROWTH;
    }
    QcOutcome {
        w,
        iterations: total_newton,
        converged,
        dual_obj: best_dual,
        feasible: true,
    }
}

struct Face {
    w: Vec<f64>,
    objective: f64,
    dual: f64,
}

/// Dual lower bound `(⟨v,y⟩ − η‖v‖)/‖Φᵀv‖∞` for the residual direction
/// `v = y − Φw`.
fn residual_certificate(phi: &DMatrix<f64>, y: &[f64], eta: f64, w: &[f64]) -> f64 {
    let mut v = vec![0.0; y.len()];
    mat_vec(phi, w, &mut v);
    for (vi, yi) in v.iter_mut().zip(y) {
        *vi = yi - *vi;
    }
    let mut ptv = vec![0.0; w.len()];
    mat_tr_vec(phi, &v, &mut ptv);
    let ptv_inf = ptv.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let raw = v.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - eta * vnorm;
    if ptv_inf > 0.0 {
        raw / ptv_inf
    } else {
        f64::NEG_INFINITY
    }
}

/// Takes the support and signs of `w`, minimizes `σᵀw_S` over the
/// constraint ellipsoid restricted to that support, and returns the point
/// with its certificate. The minimizer of a linear form over
/// `{‖Φ_S w − y‖ ≤ η}` lies on the boundary at
/// `w_LS − √(η² − ‖r₀‖²) M⁻¹σ / √(σᵀM⁻¹σ)`, `M = Φ_SᵀΦ_S`.
fn polish_face(phi: &DMatrix<f64>, y: &[f64], eta: f64, w: &[f64]) -> Option<Face> {
    let (m, d) = phi.shape();
    let wmax = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if wmax == 0.0 {
        return None;
    }
    let yv = DVector::from_column_slice(y);
    let mut best: Option<Face> = None;
    let mut last: Option<Vec<usize>> = None;
    for rel in [1e-8, 1e-6, 1e-4, 1e-3, 1e-2] {
        let support: Vec<usize> = (0..d).filter(|&i| w[i].abs() > rel * wmax).collect();
        if support.is_empty() || support.len() > m || last.as_ref() == Some(&support) {
            continue;
        }
        last = Some(support.clone());
        let sub = phi.select_columns(&support);
        let Some(chol) = sub.tr_mul(&sub).cholesky() else {
            continue;
        };
        let wls = chol.solve(&sub.tr_mul(&yv));
        let r0 = (&sub * &wls - &yv).norm();
        if r0 >= eta {
            continue;
        }
        let sigma = DVector::from_iterator(support.len(), support.iter().map(|&i| w[i].signum()));
        let msig = chol.solve(&sigma);
        let q = sigma.dot(&msig);
        if !(q > 0.0) {
            continue;
        }
        let ws = wls - msig * ((eta * eta - r0 * r0).sqrt() / q.sqrt());
        if ws.iter().zip(sigma.iter()).any(|(a, s)| a * s <= 0.0) {
            continue;
        }
        let mut full = vec![0.0; d];
        for (k, &i) in support.iter().enumerate() {
            full[i] = ws[k];
        }
        let objective: f64 = full.iter().map(|v| v.abs()).sum();
        let dual = residual_certificate(phi, y, eta, &full);
        if best
            .as_ref()
            .is_none_or(|b| objective - dual < b.objective - b.dual)
        {
            best = Some(Face {
                w: full,
                objective,
                dual,
            });
        }
    }
    best
}
