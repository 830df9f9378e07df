//! Linear algebra: a matrix-free GMRES, dense matrices with an LU oracle, and
//! the `√w` scaling that makes the discrete 2-norm approximate the L² norm.

use crate::exec::{self, Execution};
use crate::{Error, Result};

/// A square linear map given only through its action.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
    exec: Execution,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n], exec: Execution::default() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Parameter(format!("expected {} entries, got {}", n * n, data.len())));
        }
        Ok(Self { n, data, exec: Execution::default() })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Solves `A x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        dense_solve(self, b)
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        exec::for_each_row(self.exec, y, 1, |i, yi| {
            let row = &self.data[i * n..(i + 1) * n];
            yi[0] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        });
    }
}

/// Direct solve via LU with partial pivoting.
pub fn dense_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n();
    if b.len() != n {
        return Err(Error::Parameter("right-hand side length mismatch".into()));
    }
    let m = nalgebra::DMatrix::from_row_slice(n, n, a.data());
    let rhs = nalgebra::DVector::from_column_slice(b);
    m.lu().solve(&rhs).map(|x| x.as_slice().to_vec()).ok_or_else(|| Error::Assembly("matrix is singular".into()))
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    /// Relative residual estimate after each iteration (starts with 1).
    pub history: Vec<f64>,
}

/// Non-restarted GMRES from a zero initial guess, modified Gram-Schmidt with
/// one reorthogonalization pass. Non-convergence is reported, not raised.
pub fn gmres(op: &dyn LinearOperator, b: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, SolveReport) {
    let n = op.dim();
    assert_eq!(b.len(), n, "right-hand side length mismatch");
    let beta = norm2(b);
    if beta == 0.0 {
        let report = SolveReport { iterations: 0, relative_residual: 0.0, converged: true, history: vec![0.0] };
        return (vec![0.0; n], report);
    }
    let max_iter = max_iter.min(n).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter + 1);
    basis.push(b.iter().map(|v| v / beta).collect());
    // Hessenberg columns, each of length j+2
    let mut hess: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut cs: Vec<f64> = Vec::with_capacity(max_iter);
    let mut sn: Vec<f64> = Vec::with_capacity(max_iter);
    let mut g = vec![beta];
    let mut history = vec![1.0];
    let mut w = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = 1.0;

    for j in 0..max_iter {
        op.apply(&basis[j], &mut w);
        let mut h = vec![0.0; j + 2];
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(&w, v);
                h[i] += c;
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let hn = norm2(&w);
        h[j + 1] = hn;

        for i in 0..j {
            let (a, bb) = (h[i], h[i + 1]);
            h[i] = cs[i] * a + sn[i] * bb;
            h[i + 1] = -sn[i] * a + cs[i] * bb;
        }
        let (a, bb) = (h[j], h[j + 1]);
        let rho = a.hypot(bb);
        let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, bb / rho) };
        cs.push(c);
        sn.push(s);
        h[j] = rho;
        h[j + 1] = 0.0;
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s * gj);
        hess.push(h);

        iterations = j + 1;
        residual = g[j + 1].abs() / beta;
        history.push(residual);
        if residual <= tol || hn == 0.0 {
            break;
        }
        basis.push(w.iter().map(|v| v / hn).collect());
    }

    // back substitution on the triangular factor
    let k = iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for (l, yl) in y.iter().enumerate().take(k).skip(i + 1) {
            acc -= hess[l][i] * yl;
        }
        y[i] = acc / hess[i][i];
    }
    let mut x = vec![0.0; n];
    for (v, yi) in basis.iter().zip(&y) {
        x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += yi * vi);
    }
    let converged = residual <= tol;
    (x, SolveReport { iterations, relative_residual: residual, converged, history })
}

/// Left/right diagonal scaling by `√w`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEmbedding {
    sqrt_w: Vec<f64>,
}

impl WeightedEmbedding {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|&&w| !(w > 0.0)) {
            return Err(Error::Parameter(format!("quadrature weight {w} must be positive")));
        }
        Ok(Self { sqrt_w: weights.iter().map(|w| w.sqrt()).collect() })
    }

    pub fn sqrt_weights(&self) -> &[f64] {
        &self.sqrt_w
    }

    /// `σ ↦ √w σ`
    pub fn scale_in(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.sqrt_w).map(|(a, s)| a * s).collect()
    }

    /// `τ ↦ τ / √w`
    pub fn scale_out(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.sqrt_w).map(|(a, s)| a / s).collect()
    }

    /// Discrete approximation of `‖σ‖_{L²}`.
    pub fn l2_norm(&self, v: &[f64]) -> f64 {
        norm2(&self.scale_in(v))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
