//! Tangential vector fields and their Hodge decomposition
//! `F = ∇_Γα + n×∇_Γβ + H` on a genus-one surface of revolution.
//!
//! Fields are stored in the orthonormal frame `(ŝ, θ̂)` with `n×ŝ = θ̂` and
//! `n×θ̂ = -ŝ`.

use std::sync::Arc;

use crate::azimuthal::FourierStack;
use crate::exec;
use crate::quadrature::{diff_matrix, differentiate_panels, interp_matrix};
use crate::surface::{
    solve_lb_with, surface_gradient, LbOptions, LbSolution, MeanPolicy, SurfaceDiscretization, SurfaceScalarField,
};
use crate::{Error, LayerPotentials, Result};

/// `F = F^s ŝ + F^θ θ̂` on a surface grid.
#[derive(Debug, Clone)]
pub struct TangentVectorField {
    pub s: SurfaceScalarField,
    pub theta: SurfaceScalarField,
}

impl TangentVectorField {
    pub fn new(s: SurfaceScalarField, theta: SurfaceScalarField) -> Result<Self> {
        if !Arc::ptr_eq(s.disc(), theta.disc()) {
            return Err(Error::Parameter("components live on different grids".into()));
        }
        Ok(Self { s, theta })
    }

    pub fn zeros(disc: Arc<SurfaceDiscretization>) -> Self {
        Self { s: SurfaceScalarField::zeros(disc.clone()), theta: SurfaceScalarField::zeros(disc) }
    }

    /// Samples `(F^s, F^θ) = f(θ, s)`.
    pub fn sample(disc: &Arc<SurfaceDiscretization>, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        Self { s: disc.sample(|t, s| f(t, s).0), theta: disc.sample(|t, s| f(t, s).1) }
    }

    pub fn disc(&self) -> &Arc<SurfaceDiscretization> {
        self.s.disc()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.s.inner(&other.s) + self.theta.inner(&other.theta)
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, 1.0, -1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { s: self.s.map(|v| c * v), theta: self.theta.map(|v| c * v) }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, other: &Self, a: f64, b: f64) -> Self {
        Self {
            s: self.s.zip_map(&other.s, |x, y| a * x + b * y),
            theta: self.theta.zip_map(&other.theta, |x, y| a * x + b * y),
        }
    }
}

/// `n×F`: `(F^s, F^θ) ↦ (-F^θ, F^s)`.
pub fn rotate(f: &TangentVectorField) -> TangentVectorField {
    TangentVectorField { s: f.theta.map(|v| -v), theta: f.s.clone() }
}

/// How `∂_s` is applied to nodal values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Differentiation {
    /// Differentiate the Legendre-node interpolant on each panel.
    #[default]
    Legendre,
    /// Resample each panel to Chebyshev points, differentiate there and
    /// interpolate back.
    ChebyshevResample,
}

fn reference_derivative(disc: &SurfaceDiscretization, how: Differentiation) -> Vec<f64> {
    let legendre = &disc.mesh().rule().nodes;
    match how {
        Differentiation::Legendre => diff_matrix(legendre),
        Differentiation::ChebyshevResample => {
            let k = legendre.len();
            let cheb: Vec<f64> =
                (0..k).map(|j| -(std::f64::consts::PI * (2 * j + 1) as f64 / (2 * k) as f64).cos()).collect();
            let to_cheb = interp_matrix(legendre, &cheb);
            let back = interp_matrix(&cheb, legendre);
            let dc = diff_matrix(&cheb);
            let tmp = matmul(&dc, &to_cheb, k);
            matmul(&back, &tmp, k)
        }
    }
}

fn matmul(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k * k];
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            for j in 0..k {
                c[i * k + j] += ail * b[l * k + j];
            }
        }
    }
    c
}

/// `∂_s` of a grid field, row by row.
pub fn s_derivative(field: &SurfaceScalarField, how: Differentiation) -> SurfaceScalarField {
    let disc = field.disc();
    let d = reference_derivative(disc, how);
    let values =
        field.values().chunks(disc.ns()).flat_map(|row| differentiate_panels(disc.mesh(), Some(&d), row)).collect();
    SurfaceScalarField::new(disc.clone(), values).expect("same grid")
}

/// `∂_θ` of a grid field via its Fourier modes.
pub fn theta_derivative(field: &SurfaceScalarField) -> SurfaceScalarField {
    SurfaceScalarField::from_stack(field.disc().clone(), &field.stack().theta_derivative()).expect("same grid")
}

/// `∇_Γ·F = ∂_s F^s + (r'/r) F^s + (1/r) ∂_θ F^θ`.
pub fn surface_divergence(f: &TangentVectorField) -> SurfaceScalarField {
    surface_divergence_with(f, Differentiation::Legendre)
}

pub fn surface_divergence_with(f: &TangentVectorField, how: Differentiation) -> SurfaceScalarField {
    let disc = f.disc();
    let ds = s_derivative(&f.s, how);
    let dt = theta_derivative(&f.theta);
    let p: Vec<f64> = disc.dr_ds().iter().zip(disc.radius()).map(|(d, r)| d / r).collect();
    let inv_r: Vec<f64> = disc.radius().iter().map(|r| 1.0 / r).collect();
    let ns = disc.ns();
    let values = (0..ds.values().len())
        .map(|idx| {
            let i = idx % ns;
            ds.values()[idx] + p[i] * f.s.values()[idx] + inv_r[i] * dt.values()[idx]
        })
        .collect();
    SurfaceScalarField::new(disc.clone(), values).expect("same grid")
}

/// `∇_Γφ` of a sampled scalar by spectral differentiation of the grid values.
pub fn spectral_gradient(phi: &SurfaceScalarField) -> TangentVectorField {
    let inv_r: Vec<f64> = phi.disc().radius().iter().map(|r| 1.0 / r).collect();
    TangentVectorField {
        s: s_derivative(phi, Differentiation::Legendre),
        theta: theta_derivative(phi).scale_columns(&inv_r),
    }
}

/// `Δ_Γφ` of a sampled scalar, mode by mode:
/// `φ_n'' + (r'/r) φ_n' - (n²/r²) φ_n`.
pub fn spectral_laplacian(phi: &SurfaceScalarField) -> SurfaceScalarField {
    let disc = phi.disc().clone();
    let ns = disc.ns();
    let d = diff_matrix(&disc.mesh().rule().nodes);
    let stack = phi.stack();
    let radius = disc.radius().to_vec();
    let dr = disc.dr_ds().to_vec();
    let out = stack.map_modes(|n, c| {
        let nn = (n * n) as f64;
        let re: Vec<f64> = c.iter().map(|z| z.re).collect();
        let im: Vec<f64> = c.iter().map(|z| z.im).collect();
        let lap = |v: &[f64]| -> Vec<f64> {
            let d1 = differentiate_panels(disc.mesh(), Some(&d), v);
            let d2 = differentiate_panels(disc.mesh(), Some(&d), &d1);
            (0..ns).map(|i| d2[i] + dr[i] / radius[i] * d1[i] - nn / (radius[i] * radius[i]) * v[i]).collect()
        };
        let (lr, li) = (lap(&re), lap(&im));
        for (i, z) in c.iter_mut().enumerate() {
            z.re = lr[i];
            z.im = li[i];
        }
    });
    SurfaceScalarField::from_stack(disc, &out).expect("same grid")
}

/// `H₁ = (1/r) ŝ` and `H₂ = -(1/r) θ̂`, an orthogonal basis of the harmonic
/// fields on a genus-one surface of revolution.
pub fn harmonic_basis(disc: &Arc<SurfaceDiscretization>) -> (TangentVectorField, TangentVectorField) {
    let inv_r: Vec<f64> = disc.radius().iter().map(|r| 1.0 / r).collect();
    let ones = SurfaceScalarField::constant(disc.clone(), 1.0);
    let zero = SurfaceScalarField::zeros(disc.clone());
    let h1 = TangentVectorField { s: ones.scale_columns(&inv_r), theta: zero.clone() };
    let h2 = TangentVectorField { s: zero, theta: ones.scale_columns(&inv_r).map(|v| -v) };
    (h1, h2)
}

/// Least-squares projection of `h` onto `span(basis)`; returns the norm of the
/// remainder divided by `reference_norm`, and the coefficients.
pub fn project_residual(
    h: &TangentVectorField,
    basis: (&TangentVectorField, &TangentVectorField),
    reference_norm: f64,
) -> Result<(f64, [f64; 2])> {
    if !(reference_norm > 0.0) {
        return Err(Error::Parameter(format!("reference norm {reference_norm} must be positive")));
    }
    let (b1, b2) = basis;
    let (g11, g12, g22) = (b1.inner(b1), b1.inner(b2), b2.inner(b2));
    let det = g11 * g22 - g12 * g12;
    if !(det.abs() > 1e-14 * g11 * g22) {
        return Err(Error::Geometry("harmonic basis has a singular Gram matrix".into()));
    }
    let (r1, r2) = (b1.inner(h), b2.inner(h));
    let c1 = (g22 * r1 - g12 * r2) / det;
    let c2 = (g11 * r2 - g12 * r1) / det;
    let rest = h.combine(b1, 1.0, -c1).combine(b2, 1.0, -c2);
    Ok((rest.l2_norm() / reference_norm, [c1, c2]))
}

/// Output of [`hodge_decompose`].
#[derive(Debug, Clone)]
pub struct HodgeDecomposition {
    pub alpha: LbSolution,
    pub beta: LbSolution,
    /// `∇_Γα`.
    pub gradient: TangentVectorField,
    /// `n×∇_Γβ`.
    pub cogradient: TangentVectorField,
    /// `F - ∇_Γα - n×∇_Γβ`.
    pub harmonic: TangentVectorField,
}

/// Solves `Δ_Γα = ∇_Γ·F` and `Δ_Γβ = -∇_Γ·(n×F)` and returns the three parts
/// of `F`.
pub fn hodge_decompose(f: &TangentVectorField, opts: &LbOptions) -> Result<HodgeDecomposition> {
    let disc = f.disc();
    let layers = Arc::new(LayerPotentials::new(disc.mesh().clone(), opts.kernel, &opts.solver)?);
    let rhs = [surface_divergence(f), surface_divergence(&rotate(f)).map(|v| -v)];
    // Both divergences integrate to zero exactly; what remains is quadrature
    // error, judged against the size of F rather than of the (possibly
    // round-off level) divergence itself.
    let scale = f.l2_norm() * disc.area().sqrt();
    for g in &rhs {
        let abs = g.map(f64::abs).integral();
        let defect = g.integral().abs() / (abs + scale).max(f64::MIN_POSITIVE);
        if defect > opts.mean_tol {
            return Err(Error::Solvability(defect));
        }
    }
    let inner = LbOptions { mean_policy: MeanPolicy::Project, mean_tol: 0.0, ..*opts };
    let mut sols = exec::map_indices(opts.solver.exec, 2, |k| solve_lb_with(&rhs[k], layers.clone(), &inner))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let beta = sols.pop().expect("two solves");
    let alpha = sols.pop().expect("two solves");
    let gradient = surface_gradient(&alpha);
    let cogradient = rotate(&surface_gradient(&beta));
    let harmonic = f.sub(&gradient).sub(&cogradient);
    Ok(HodgeDecomposition { alpha, beta, gradient, cogradient, harmonic })
}

/// Mode `n` of both components, for diagnostics.
pub fn field_modes(f: &TangentVectorField) -> (FourierStack, FourierStack) {
    (f.s.stack(), f.theta.stack())
}
