//! Lasso homotopy stopped at a prescribed residual norm.
//!
//! Along the path `w(λ) = argmin ½‖Φw − y‖² + λ‖w‖₁` the residual norm
//! shrinks monotonically, and the point where it equals `η` satisfies the
//! optimality conditions of `min ‖w‖₁ s.t. ‖Φw − y‖ ≤ η`. The path is
//! piecewise linear, so the stopping point is found exactly.

use nalgebra::{DMatrix, DVector};

use super::dense::{mat_tr_vec, mat_vec};

pub(crate) struct PathOutcome {
    pub w: Vec<f64>,
    pub steps: usize,
}

/// Returns `None` when the active set loses rank or the step cap is hit.
pub(crate) fn solve(
    phi: &DMatrix<f64>,
    y: &[f64],
    eta: f64,
    max_steps: usize,
) -> Option<PathOutcome> {
    let (m, d) = phi.shape();
    let mut w = vec![0.0; d];
    let mut r = y.to_vec();
    let mut c = vec![0.0; d];
    mat_tr_vec(phi, &r, &mut c);
    let (first, lam0) = c
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.abs()))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    if lam0 == 0.0 {
        return None;
    }
    let mut lambda = lam0;
    let mut active = vec![first];
    let mut signs = vec![c[first].signum()];
    let mut dropped: Option<usize> = None;
    let mut u = vec![0.0; m];
    let mut a = vec![0.0; d];

    for step in 1..=max_steps {
        let k = active.len();
        if k > m {
            return None;
        }
        let sub = phi.select_columns(&active);
        let chol = sub.tr_mul(&sub).cholesky()?;
        let dir = chol.solve(&DVector::from_column_slice(&signs));
        if dir.iter().any(|v| !v.is_finite()) {
            return None;
        }
        // u = Φ_A dir: residual moves by −γu, correlations by −γΦᵀu.
        u.iter_mut().for_each(|v| *v = 0.0);
        for (col, dv) in active.iter().zip(dir.iter()) {
            for (ui, pi) in u.iter_mut().zip(phi.column(*col).iter()) {
                *ui += pi * dv;
            }
        }
        mat_tr_vec(phi, &u, &mut a);

        let mut gamma = lambda;
        let mut event = Event::End;
        let floor = 1e-14 * lambda;
        let mut is_active = vec![false; d];
        for &i in &active {
            is_active[i] = true;
        }
        for j in 0..d {
            if is_active[j] || Some(j) == dropped {
                continue;
            }
            for (num, den) in [(lambda - c[j], 1.0 - a[j]), (lambda + c[j], 1.0 + a[j])] {
                if den > 0.0 {
                    let g = num / den;
                    if g > floor && g < gamma {
                        gamma = g;
                        event = Event::Join(j);
                    }
                }
            }
        }
        for (pos, (&i, dv)) in active.iter().zip(dir.iter()).enumerate() {
            let g = -w[i] / dv;
            if g > floor && g < gamma {
                gamma = g;
                event = Event::Leave(pos);
            }
        }
        // ‖r − γu‖² = η²
        let uu: f64 = u.iter().map(|v| v * v).sum();
        let ru: f64 = r.iter().zip(&u).map(|(x, y)| x * y).sum();
        let rr: f64 = r.iter().map(|v| v * v).sum();
        let cq = rr - eta * eta;
        if uu > 0.0 {
            let disc = ru * ru - uu * cq;
            if disc >= 0.0 {
                // Smaller root of uu γ² − 2 ru γ + cq, written stably.
                let g = if ru > 0.0 {
                    cq / (ru + disc.sqrt())
                } else {
                    (ru + disc.sqrt()) / uu
                };
                if g >= 0.0 && g <= gamma {
                    gamma = g;
                    event = Event::Stop;
                }
            }
        }

        for (&i, dv) in active.iter().zip(dir.iter()) {
            w[i] += gamma * dv;
        }
        lambda -= gamma;
        mat_vec(phi, &w, &mut r);
        for (ri, yi) in r.iter_mut().zip(y) {
            *ri = yi - *ri;
        }
        mat_tr_vec(phi, &r, &mut c);
        dropped = None;
        match event {
            Event::Stop | Event::End => return Some(PathOutcome { w, steps: step }),
            Event::Join(j) => {
                active.push(j);
                signs.push(c[j].signum());
            }
            Event::Leave(pos) => {
                let i = active.remove(pos);
                signs.remove(pos);
                w[i] = 0.0;
                dropped = Some(i);
            }
        }
        if lambda <= 0.0 {
            return Some(PathOutcome { w, steps: step });
        }
    }
    None
}

enum Event {
    Join(usize),
    Leave(usize),
    Stop,
    End,
}
