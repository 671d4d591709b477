//! Dense linear algebra for the two solve paths: an SVD pseudoinverse for
//! the small real moment systems, and a non-restarted complex GMRES for the
//! Nyström systems, built on a minimal matvec abstraction so composed
//! operators (e.g. the sound-hard combined-field operator) never have to be
//! materialized as matrices.

use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use std::cell::Cell;

/// Minimum-norm least-squares solution of A x = b via SVD, discarding
/// singular values below `sv_cutoff_rel * sigma_max`.
pub fn pseudo_solve(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    sv_cutoff_rel: f64,
) -> Result<DVector<f64>> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, rhs has {}",
            a.nrows(),
            b.len()
        )));
    }
    if a.nrows() > 32 || a.ncols() > 32 {
        return Err(Error::InvalidParameter(
            "pseudo_solve is intended for small moment systems (<= 32)".into(),
        ));
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    if !(sigma_max > 0.0) {
        return Err(Error::LinearAlgebra("all singular values vanish".into()));
    }
    svd.solve(b, sv_cutoff_rel * sigma_max)
        .map_err(|e| Error::LinearAlgebra(e.to_string()))
}

/// Anything that can apply itself to a complex vector.
pub trait LinearOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
}

/// Wrapper counting matvecs; used by tests to pin down how many operator
/// applications a composed solve performs.
pub struct CountingOp<'a, T: LinearOp + ?Sized> {
    pub inner: &'a T,
    count: Cell<usize>,
}

impl<'a, T: LinearOp + ?Sized> CountingOp<'a, T> {
    pub fn new(inner: &'a T) -> Self {
        Self {
            inner,
            count: Cell::new(0),
        }
    }

    pub fn count(&self) -> usize {
        self.count.get()
    }
}

impl<T: LinearOp + ?Sized> LinearOp for CountingOp<'_, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.count.set(self.count.get() + 1);
        self.inner.apply(x)
    }
}

/// Dense complex matrix as a `LinearOp` (row-major storage).
pub struct DenseOp {
    pub n: usize,
    pub values: Vec<C64>,
}

impl LinearOp for DenseOp {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for (i, row) in self.values.chunks_exact(self.n).enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (a, v) in row.iter().zip(x.iter()) {
                acc += a * v;
            }
            out[i] = acc;
        }
        out
    }
}

/// Outcome of a GMRES solve.
#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<C64>,
    pub iterations: usize,
    /// Relative residual after each iteration (monotone nonincreasing).
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

/// Non-restarted GMRES with modified Gram–Schmidt plus one
/// reorthogonalization pass and Givens-rotation least squares.
///
/// Terminates when the relative residual drops below `rel_tol` or after
/// `max_iter` Arnoldi steps (reported via `converged`, not an error).
/// An exactly invariant Krylov subspace ("happy breakdown") is treated as
/// convergence.
pub fn gmres<T: LinearOp + ?Sized>(
    op: &T,
    rhs: &[C64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<GmresResult> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator dimension {n}, rhs length {}",
            rhs.len()
        )));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "GMRES relative tolerance must lie in (0,1), got {rel_tol}"
        )));
    }
    let beta = norm2(rhs);
    if beta == 0.0 {
        return Ok(GmresResult {
            x: vec![C64::new(0.0, 0.0); n],
            iterations: 0,
            residual_history: vec![0.0],
            converged: true,
        });
    }
    let max_iter = max_iter.min(n);
    // Arnoldi basis vectors and the Hessenberg columns (after rotations).
    let mut basis: Vec<Vec<C64>> = vec![rhs.iter().map(|v| v / beta).collect()];
    let mut h_cols: Vec<Vec<C64>> = Vec::new();
    let mut cs: Vec<C64> = Vec::new();
    let mut sn: Vec<C64> = Vec::new();
    // Rotated rhs of the least-squares problem.
    let mut g: Vec<C64> = vec![C64::new(beta, 0.0)];
    let mut history = vec![1.0f64];
    let mut converged = false;
    let mut iters = 0;

    for j in 0..max_iter {
        let mut w = op.apply(&basis[j]);
        // Modified Gram–Schmidt with a single reorthogonalization sweep.
        let mut h = vec![C64::new(0.0, 0.0); j + 2];
        for pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let proj = dot_conj(v, &w);
                if pass == 0 || proj.norm() > 0.0 {
                    for (wk, vk) in w.iter_mut().zip(v.iter()) {
                        *wk -= proj * vk;
                    }
                    h[i] += proj;
                }
            }
        }
        let wnorm = norm2(&w);
        h[j + 1] = C64::new(wnorm, 0.0);
        let happy = wnorm <= 1e-14 * beta;

        // Apply accumulated rotations to the new column.
        for i in 0..j {
            let tmp = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i].conj() * h[i] + cs[i].conj() * h[i + 1];
            h[i] = tmp;
        }
        // New rotation annihilating h[j+1].
        let (c, s) = givens(h[j], h[j + 1]);
        let tmp = c * h[j] + s * h[j + 1];
        h[j] = tmp;
        h[j + 1] = C64::new(0.0, 0.0);
        cs.push(c);
        sn.push(s);
        let g_next = -s.conj() * g[j];
        g[j] = c * g[j];
        g.push(g_next);

        h_cols.push(h);
        iters = j + 1;
        let rel_res = g[j + 1].norm() / beta;
        history.push(rel_res.min(history[j]));
        if rel_res <= rel_tol || happy {
            converged = true;
            break;
        }
        if !happy {
            basis.push(w.iter().map(|v| v / wnorm).collect());
        } else {
            break;
        }
    }

    // Back substitution on the upper-triangular system.
    let m = iters;
    let mut y = vec![C64::new(0.0, 0.0); m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for l in (i + 1)..m {
            acc -= h_cols[l][i] * y[l];
        }
        y[i] = acc / h_cols[i][i];
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (yi, v) in y.iter().zip(basis.iter()) {
        for (xk, vk) in x.iter_mut().zip(v.iter()) {
            *xk += yi * vk;
        }
    }
    Ok(GmresResult {
        x,
        iterations: iters,
        residual_history: history,
        converged,
    })
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Complex Givens rotation zeroing the second component.
fn givens(a: C64, b: C64) -> (C64, C64) {
    if b.norm() == 0.0 {
        return (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    }
    let denom = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if a.norm() == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    }
    let c = C64::new(a.norm() / denom, 0.0);
    let s = (a / a.norm()) * b.conj() / denom;
    (c, s)
}
