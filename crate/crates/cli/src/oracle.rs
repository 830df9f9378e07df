//! Independent Fourier spectral-collocation solver for smooth periodic ODEs
//! `u'' + p u' + q u = f` on `[0, L)`, used to cross-check the Nyström solver.

use std::f64::consts::PI;

use anyhow::{bail, Result};
use nalgebra::{DMatrix, DVector};

/// Collocation points and solution values.
#[derive(Debug, Clone)]
pub struct CollocationSolution {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

/// Periodic first-derivative matrix on `n` (odd) equispaced points of `[0, L)`.
pub fn fourier_diff_matrix(n: usize, period: f64) -> DMatrix<f64> {
    assert!(n % 2 == 1, "odd point count keeps the matrix real and Nyquist-free");
    let h = 2.0 * PI / n as f64;
    let scale = 2.0 * PI / period;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let k = i as i64 - j as i64;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            scale * 0.5 * sign / (k as f64 * h / 2.0).sin()
        }
    })
}

pub fn solve_collocation(
    n: usize,
    period: f64,
    p: impl Fn(f64) -> f64,
    q: impl Fn(f64) -> f64,
    f: impl Fn(f64) -> f64,
) -> Result<CollocationSolution> {
    if n.is_multiple_of(2) || n < 3 {
        bail!("collocation needs an odd number of points, at least 3");
    }
    let points: Vec<f64> = (0..n).map(|j| period * j as f64 / n as f64).collect();
    let d = fourier_diff_matrix(n, period);
    let d2 = &d * &d;
    let mut a = d2;
    for i in 0..n {
        let (pi, qi) = (p(points[i]), q(points[i]));
        for j in 0..n {
            a[(i, j)] += pi * d[(i, j)];
        }
        a[(i, i)] += qi;
    }
    let b = DVector::from_iterator(n, points.iter().map(|&x| f(x)));
    let Some(u) = a.lu().solve(&b) else {
        bail!("collocation matrix is singular");
    };
    Ok(CollocationSolution { points, values: u.iter().copied().collect() })
}
