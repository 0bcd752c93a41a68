//! Lowest eigenpair of a large symmetric operator: explicitly restarted
//! Lanczos with full reorthogonalization.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{numeric, Result};

pub(crate) struct Eigenpair {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// `apply(x, y)` must write A·x into `y`. Stops when ‖A x − θ x‖ ≤ `tol`.
pub(crate) fn lowest<F>(apply: F, start: &[f64], basis: usize, tol: f64, max_restarts: usize) -> Result<Eigenpair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = start.len();
    let mut x = start.to_vec();
    normalize(&mut x);
    let mut iterations = 0;
    let mut last_res = f64::INFINITY;
    for _ in 0..max_restarts {
        let mut q: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha = Vec::with_capacity(basis);
        let mut beta: Vec<f64> = Vec::with_capacity(basis);
        let mut w = vec![0.0; n];
        for j in 0..basis.min(n) {
            apply(&q[j], &mut w);
            iterations += 1;
            let a = dot(&w, &q[j]);
            alpha.push(a);
            // two passes of classical Gram–Schmidt against the whole basis
            for _ in 0..2 {
                for qi in &q {
                    let c = dot(&w, qi);
                    w.iter_mut().zip(qi).for_each(|(wv, qv)| *wv -= c * qv);
                }
            }
            let b = normalize(&mut w);
            if j + 1 == basis.min(n) || b <= 1e-14 * a.abs().max(1.0) {
                beta.push(b);
                break;
            }
            beta.push(b);
            q.push(w.clone());
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, k| {
            if i == k {
                alpha[i]
            } else if i + 1 == k {
                beta[i]
            } else if k + 1 == i {
                beta[k]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        let y = eig.eigenvectors.column(imin);
        let mut next = vec![0.0; n];
        for (k, qk) in q.iter().take(m).enumerate() {
            let c = y[k];
            next.iter_mut().zip(qk).for_each(|(xv, qv)| *xv += c * qv);
        }
        normalize(&mut next);
        apply(&next, &mut w);
        iterations += 1;
        let res = w
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - theta * b) * (a - theta * b))
            .sum::<f64>()
            .sqrt();
        x = next;
        last_res = res;
        if res <= tol {
            return Ok(Eigenpair {
                value: dot(&x, &w),
                residual: res,
                iterations,
            });
        }
    }
    Err(numeric("Lanczos did not converge", last_res))
}
