//! Mehrotra predictor-corrector for `min cᵀx  s.t.  E x = f,  A x ≤ b`
//! with free `x`. Problem structure enters only through [`Kkt`].

/// Structured access to an LP. `factor` receives the barrier weights
/// `W = Z S⁻¹` and must prepare to solve
/// `[AᵀWA  Eᵀ; E  0] [dx; dν] = [rx; re]`.
pub(crate) trait Kkt {
    fn n(&self) -> usize;
    fn p(&self) -> usize;
    fn q(&self) -> usize;
    fn cost(&self) -> &[f64];
    fn ineq_rhs(&self) -> &[f64];
    fn eq_rhs(&self) -> &[f64];
    fn a_mul(&self, x: &[f64], out: &mut [f64]);
    fn at_mul(&self, z: &[f64], out: &mut [f64]);
    fn e_mul(&self, x: &[f64], out: &mut [f64]);
    fn et_mul(&self, nu: &[f64], out: &mut [f64]);
    fn factor(&mut self, w: &[f64]) -> bool;
    fn solve(&self, rx: &[f64], re: &[f64], dx: &mut [f64], dnu: &mut [f64]);
    fn start(&self) -> Vec<f64>;
}

#[derive(Debug, Clone)]
pub(crate) struct IpmOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub primal_inf: f64,
}

const STEP_FRACTION: f64 = 0.995;
const MAX_IPM_ITER: usize = 300;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

/// Iterates until the scaled infeasibilities and gap drop below `tol`. If
/// that never happens, the last iterate that met the looser `accept` level
/// is returned as converged.
pub(crate) fn mehrotra<K: Kkt>(k: &mut K, tol: f64, accept: f64, max_iter: usize) -> IpmOutcome {
    let (n, p, q) = (k.n(), k.p(), k.q());
    let c = k.cost().to_vec();
    let b = k.ineq_rhs().to_vec();
    let f = k.eq_rhs().to_vec();
    let (nb, nc, nf) = (norm(&b), norm(&c), norm(&f));

    let mut x = k.start();
    let mut ax = vec![0.0; q];
    k.a_mul(&x, &mut ax);
    let mut s: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let shift = s
        .iter()
        .cloned()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .mul_add(0.1, 1e-2);
    for v in s.iter_mut() {
        *v = v.max(0.0) + shift;
    }
    let zscale = c.iter().cloned().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut z = vec![zscale; q];
    let mut nu = vec![0.0; p];

    let mut r_d = vec![0.0; n];
    let mut r_e = vec![0.0; p];
    let mut r_p = vec![0.0; q];
    let mut tmp_n = vec![0.0; n];
    let mut tmp_q = vec![0.0; q];
    let mut rhs_x = vec![0.0; n];
    let mut rhs_e = vec![0.0; p];
    let mut dx = vec![0.0; n];
    let mut dnu = vec![0.0; p];
    let mut ds = vec![0.0; q];
    let mut dz = vec![0.0; q];
    let mut rc = vec![0.0; q];
    let mut w = vec![0.0; q];

    let mut outcome = IpmOutcome {
        x: x.clone(),
        iterations: 0,
        converged: false,
        primal_obj: f64::NAN,
        dual_obj: f64::NAN,
        primal_inf: f64::INFINITY,
    };
    let mut acceptable: Option<IpmOutcome> = None;
    let mut stalls = 0;
    let cap = max_iter.min(MAX_IPM_ITER);

    for iter in 0..=cap {
        // Residuals.
        k.at_mul(&z, &mut r_d);
        k.et_mul(&nu, &mut tmp_n);
        for i in 0..n {
            r_d[i] += c[i] + tmp_n[i];
        }
        k.e_mul(&x, &mut r_e);
        for i in 0..p {
            r_e[i] -= f[i];
        }
        k.a_mul(&x, &mut ax);
        for i in 0..q {
            r_p[i] = ax[i] + s[i] - b[i];
        }
        let mu = dot(&s, &z) / q.max(1) as f64;
        let pobj = dot(&c, &x);
        let dobj = -dot(&b, &z) - dot(&f, &nu);
        let pinf = (norm(&r_p) / (1.0 + nb)).max(norm(&r_e) / (1.0 + nf));
        let dinf = norm(&r_d) / (1.0 + nc);
        let gap = (dot(&s, &z)).max((pobj - dobj).abs()) / (1.0 + pobj.abs());

        outcome.x.copy_from_slice(&x);
        outcome.iterations = iter;
        outcome.primal_obj = pobj;
        outcome.dual_obj = dobj;
        outcome.primal_inf = pinf;
        if !(pinf.is_finite() && dinf.is_finite() && gap.is_finite()) {
            break;
        }
        if pinf <= tol && dinf <= tol && gap <= tol {
            outcome.converged = true;
            break;
        }
        if pinf <= accept && dinf <= accept && gap <= accept {
            acceptable = Some(IpmOutcome {
                converged: true,
                ..outcome.clone()
            });
        }
        if iter == cap {
            break;
        }

        for i in 0..q {
            w[i] = z[i] / s[i];
        }
        if !k.factor(&w) {
            break;
        }

        // Newton direction for complementarity target `rc`.
        let direction = |k: &K,
                         rc: &[f64],
                         dx: &mut [f64],
                         dnu: &mut [f64],
                         ds: &mut [f64],
                         dz: &mut [f64],
                         tmp_q: &mut [f64],
                         tmp_n: &mut [f64],
                         rhs_x: &mut [f64],
                         rhs_e: &mut [f64]| {
            for i in 0..q {
                tmp_q[i] = (z[i] * r_p[i] - rc[i]) / s[i];
            }
            k.at_mul(tmp_q, tmp_n);
            for i in 0..n {
                rhs_x[i] = -r_d[i] - tmp_n[i];
            }
            for i in 0..p {
                rhs_e[i] = -r_e[i];
            }
            k.solve(rhs_x, rhs_e, dx, dnu);
            k.a_mul(dx, tmp_q);
            for i in 0..q {
                ds[i] = -r_p[i] - tmp_q[i];
                dz[i] = (-rc[i] - z[i] * ds[i]) / s[i];
            }
        };

        for i in 0..q {
            rc[i] = s[i] * z[i];
        }
        direction(
            k, &rc, &mut dx, &mut dnu, &mut ds, &mut dz, &mut tmp_q, &mut tmp_n, &mut rhs_x,
            &mut rhs_e,
        );
        let ap = max_step(&s, &ds).min(1.0);
        let ad = max_step(&z, &dz).min(1.0);
        let mu_aff = s
            .iter()
            .zip(&ds)
            .zip(z.iter().zip(&dz))
            .map(|((si, dsi), (zi, dzi))| (si + ap * dsi) * (zi + ad * dzi))
            .sum::<f64>()
            / q.max(1) as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        for i in 0..q {
            rc[i] = s[i] * z[i] + ds[i] * dz[i] - sigma * mu;
        }
        direction(
            k, &rc, &mut dx, &mut dnu, &mut ds, &mut dz, &mut tmp_q, &mut tmp_n, &mut rhs_x,
            &mut rhs_e,
        );
        if dx.iter().chain(&dz).chain(&ds).any(|v| !v.is_finite()) {
            break;
        }
        let ap = (STEP_FRACTION * max_step(&s, &ds)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&z, &dz)).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls > 3 {
                break;
            }
        } else {
            stalls = 0;
        }
        for i in 0..n {
            x[i] += ap * dx[i];
        }
        for i in 0..q {
            s[i] += ap * ds[i];
            z[i] += ad * dz[i];
        }
        for i in 0..p {
            nu[i] += ad * dnu[i];
        }
    }
    match acceptable {
        Some(best) if !outcome.converged => IpmOutcome {
            iterations: outcome.iterations,
            ..best
        },
        _ => outcome,
    }
}
