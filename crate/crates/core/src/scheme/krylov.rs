//! Matrix-free restarted GMRES for `(I − τL) u⁺ = (I + τL) u`.
//!
//! Used where the spectral solve does not apply (non-constant λ) and as an
//! independent check of it.

use super::LinearStepSystem;
use crate::error::{ProcaError, Result};
use crate::model::{ProcaFields, ProcaState};

#[derive(Debug, Clone)]
pub struct IterativeSolution {
    pub fields: ProcaFields,
    /// Arnoldi steps taken across all restarts.
    pub iterations: usize,
    /// Final relative residual `‖b − A x‖ / ‖b‖`.
    pub residual: f64,
    pub history: Vec<f64>,
}

pub fn solve_iterative(
    system: &LinearStepSystem,
    u: &ProcaState,
    tol: f64,
    max_iter: usize,
    restart: usize,
) -> Result<IterativeSolution> {
    let grid = *u.grid();
    let tau = 0.5 * system.c_dt();
    let lam = system.lambda_mid(&grid, u.time);
    let op = |x: &ProcaFields| {
        let mut y = x.clone();
        y.axpy(-tau, &system.apply(&lam, x));
        y
    };

    let mut b = u.fields.clone();
    b.axpy(tau, &system.apply(&lam, &u.fields));
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Ok(IterativeSolution {
            fields: ProcaFields::zeros(&grid),
            iterations: 0,
            residual: 0.0,
            history: Vec::new(),
        });
    }

    let mut x = u.fields.clone();
    let mut total = 0usize;
    let mut history = Vec::new();
    loop {
        let r = b.sub(&op(&x));
        let beta = r.norm();
        let rel = beta / b_norm;
        history.push(rel);
        if rel <= tol {
            return Ok(IterativeSolution {
                fields: x,
                iterations: total,
                residual: rel,
                history,
            });
        }
        if total >= max_iter {
            return Err(ProcaError::NotConverged {
                iterations: total,
                residual: rel,
                history,
            });
        }

        let m = restart.min(max_iter - total);
        let mut basis = vec![r.scale(1.0 / beta)];
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        for j in 0..m {
            let mut w = op(&basis[j]);
            for (i, v) in basis.iter().enumerate() {
                h[i][j] = w.dot(v);
                w.axpy(-h[i][j], v);
            }
            h[j + 1][j] = w.norm();

            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            h[j][j] = denom;
            let sub = h[j + 1][j];
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];

            total += 1;
            k = j + 1;
            let est = g[j + 1].abs() / b_norm;
            history.push(est);
            if est <= 0.5 * tol || sub == 0.0 || total >= max_iter {
                break;
            }
            basis.push(w.scale(1.0 / sub));
        }

        // back substitution for the k×k triangular system
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|l| h[i][l] * y[l]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            x.axpy(*yi, v);
        }
    }
}
