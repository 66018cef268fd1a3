//! One-sided (Hestenes) Jacobi SVD for small dense matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin factorization of a tall matrix (`m >= n`): returns the rotated
/// columns `W = A V` and the accumulated rotation `V`. Columns of `W` are
/// mutually orthogonal to working precision on return.
pub(crate) fn orthogonalize_columns(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = f64::EPSILON * m as f64;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::Numeric(format!(
        "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
    )))
}

fn rotate(mat: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..mat.nrows() {
        let (a, b) = (mat[(i, p)], mat[(i, q)]);
        mat[(i, p)] = c * a - s * b;
        mat[(i, q)] = s * a + c * b;
    }
}

/// Extends orthonormal columns to an orthonormal basis of `R^dim` by
/// Gram–Schmidt on the standard basis vector with the largest residual.
pub(crate) fn complete_basis(mut cols: Vec<DVector<f64>>, dim: usize) -> DMatrix<f64> {
    while cols.len() < dim {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for e in 0..dim {
            let mut r = DVector::<f64>::zeros(dim);
            r[e] = 1.0;
            for _ in 0..2 {
                for c in &cols {
                    let proj = c.dot(&r);
                    r -= c * proj;
                }
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("dim > 0");
        cols.push(r / norm);
    }
    DMatrix::from_columns(&cols)
}
