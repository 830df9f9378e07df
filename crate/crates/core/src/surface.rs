//! Laplace-Beltrami solves on a surface of revolution.
//!
//! In `(s, θ)` the operator reads `∂²_s + (r'/r)∂_s + r⁻²∂²_θ`, so Fourier
//! mode `n` of `Δ_Γ u = f` is the periodic ODE
//! `u_n'' + (r'/r) u_n' - (n²/r²) u_n = f_n`. Mode `0` carries the mean-zero
//! condition `∫ u_0 r ds = 0`. Real data gives `c_{-n} = conj(c_n)`, so only
//! `n >= 0` is solved.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::azimuthal::{theta_grid, FourierStack};
use crate::exec;
use crate::geometry::GeneratingCurve;
use crate::hodge::TangentVectorField;
use crate::kernels::KernelKind;
use crate::periodic_ode::{
    assemble_with, Coefficient, LayerPotentials, ModeSolution, PeriodicOdeProblem, SolverOptions,
};
use crate::quadrature::PanelMesh;
use crate::{Error, Result};

/// Tensor grid of azimuthal angles and arclength nodes on a surface.
#[derive(Debug)]
pub struct SurfaceDiscretization {
    curve: Arc<GeneratingCurve>,
    mesh: Arc<PanelMesh>,
    ntheta: usize,
    thetas: Vec<f64>,
    radius: Vec<f64>,
    dr: Vec<f64>,
    ring_weights: Vec<f64>,
}

impl SurfaceDiscretization {
    pub fn new(curve: Arc<GeneratingCurve>, mesh: Arc<PanelMesh>, ntheta: usize) -> Result<Arc<Self>> {
        if ntheta < 2 || !ntheta.is_multiple_of(2) {
            return Err(Error::Parameter(format!("N_θ = {ntheta} must be even and at least 2")));
        }
        if (curve.length() - mesh.length()).abs() > 1e-12 * curve.length() {
            return Err(Error::Parameter(format!(
                "mesh length {} differs from curve length {}",
                mesh.length(),
                curve.length()
            )));
        }
        if let Some(b) = curve.breakpoints().iter().find(|&&b| !mesh.has_boundary(b)) {
            return Err(Error::Parameter(format!("curve edge at s = {b} is not a panel boundary")));
        }
        if curve.min_radius() <= 0.0 {
            return Err(Error::AxisViolation("curve reaches the rotation axis".into()));
        }
        let points: Vec<_> = mesh.nodes().iter().map(|&s| curve.point(s)).collect();
        let radius: Vec<f64> = points.iter().map(|p| p.r).collect();
        let dr = points.iter().map(|p| p.dr).collect();
        let dtheta = 2.0 * PI / ntheta as f64;
        let ring_weights = mesh.weights().iter().zip(&radius).map(|(w, r)| w * r * dtheta).collect();
        Ok(Arc::new(Self { curve, mesh, ntheta, thetas: theta_grid(ntheta), radius, dr, ring_weights }))
    }

    pub fn curve(&self) -> &Arc<GeneratingCurve> {
        &self.curve
    }

    pub fn mesh(&self) -> &Arc<PanelMesh> {
        &self.mesh
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn ns(&self) -> usize {
        self.mesh.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// `r` at the arclength nodes.
    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    /// `dr/ds` at the arclength nodes.
    pub fn dr_ds(&self) -> &[f64] {
        &self.dr
    }

    /// Surface quadrature weight of every grid point in column `i`:
    /// `w_i r_i 2π/N_θ`.
    pub fn ring_weights(&self) -> &[f64] {
        &self.ring_weights
    }

    /// Discrete surface area.
    pub fn area(&self) -> f64 {
        self.ring_weights.iter().sum::<f64>() * self.ntheta as f64
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        let ns = self.ns();
        values.chunks(ns).map(|row| row.iter().zip(&self.ring_weights).map(|(v, w)| v * w).sum::<f64>()).sum()
    }

    /// Samples `f(θ, s)` on the grid.
    pub fn sample(self: &Arc<Self>, f: impl Fn(f64, f64) -> f64) -> SurfaceScalarField {
        let ns = self.ns();
        let nodes = self.mesh.nodes();
        let mut values = vec![0.0; self.ntheta * ns];
        for (j, &t) in self.thetas.iter().enumerate() {
            for (i, &s) in nodes.iter().enumerate() {
                values[j * ns + i] = f(t, s);
            }
        }
        SurfaceScalarField { disc: self.clone(), values }
    }
}

/// Real values on the `N_θ × N_s` grid of a [`SurfaceDiscretization`].
#[derive(Debug, Clone)]
pub struct SurfaceScalarField {
    disc: Arc<SurfaceDiscretization>,
    values: Vec<f64>,
}

impl SurfaceScalarField {
    pub fn new(disc: Arc<SurfaceDiscretization>, values: Vec<f64>) -> Result<Self> {
        if values.len() != disc.ntheta * disc.ns() {
            return Err(Error::Parameter("field size does not match the grid".into()));
        }
        Ok(Self { disc, values })
    }

    pub fn zeros(disc: Arc<SurfaceDiscretization>) -> Self {
        let n = disc.ntheta * disc.ns();
        Self { disc, values: vec![0.0; n] }
    }

    pub fn constant(disc: Arc<SurfaceDiscretization>, c: f64) -> Self {
        let n = disc.ntheta * disc.ns();
        Self { disc, values: vec![c; n] }
    }

    pub fn from_stack(disc: Arc<SurfaceDiscretization>, stack: &FourierStack) -> Result<Self> {
        if stack.ntheta() != disc.ntheta || stack.ns() != disc.ns() {
            return Err(Error::Parameter("stack shape does not match the grid".into()));
        }
        let values = stack.synthesize();
        Ok(Self { disc, values })
    }

    pub fn disc(&self) -> &Arc<SurfaceDiscretization> {
        &self.disc
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value at angle index `j`, node `i`.
    pub fn at(&self, j: usize, i: usize) -> f64 {
        self.values[j * self.disc.ns() + i]
    }

    pub fn stack(&self) -> FourierStack {
        FourierStack::decompose(&self.values, self.disc.ntheta, self.disc.ns()).expect("grid shape checked")
    }

    pub fn integral(&self) -> f64 {
        self.disc.integrate(&self.values)
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.disc.area()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        let prod: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        self.disc.integrate(&prod)
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { disc: self.disc.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination `f(self, other)`.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { disc: self.disc.clone(), values }
    }

    /// Multiplies column `i` by `g[i]`.
    pub fn scale_columns(&self, g: &[f64]) -> Self {
        let ns = self.disc.ns();
        let values = self.values.iter().enumerate().map(|(idx, v)| v * g[idx % ns]).collect();
        Self { disc: self.disc.clone(), values }
    }
}

/// `‖a - b‖ / ‖b‖` in the surface L² norm.
pub fn relative_l2_error(a: &SurfaceScalarField, b: &SurfaceScalarField) -> Result<f64> {
    if a.values.len() != b.values.len() || a.disc.ntheta != b.disc.ntheta || a.disc.ns() != b.disc.ns() {
        return Err(Error::Parameter("fields live on different grids".into()));
    }
    let norm_b = b.l2_norm();
    if norm_b == 0.0 {
        return Err(Error::DegenerateReference);
    }
    Ok(a.zip_map(b, |x, y| x - y).l2_norm() / norm_b)
}

/// What to do with a right-hand side whose discrete surface mean is not zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanPolicy {
    /// Fail with [`Error::Solvability`] above the tolerance.
    #[default]
    Reject,
    /// Subtract the discrete mean before solving.
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbOptions {
    pub solver: SolverOptions,
    pub kernel: KernelKind,
    pub mean_policy: MeanPolicy,
    /// Allowed `|∫f| / ∫|f|`.
    pub mean_tol: f64,
    /// Modes with `max_s |f_n| < truncation · max|f|` are not solved.
    pub truncation: f64,
}

impl Default for LbOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            kernel: KernelKind::Poisson,
            mean_policy: MeanPolicy::Reject,
            mean_tol: 1e-10,
            truncation: 1e-15,
        }
    }
}

/// Solution of mode `n >= 0`: real and imaginary parts solved separately.
#[derive(Debug, Clone)]
pub struct ModePair {
    pub n: i64,
    pub re: ModeSolution,
    pub im: ModeSolution,
    pub solved: bool,
}

impl ModePair {
    /// `(u_n, u_n')` at the nodes of the solution mesh.
    pub fn nodal(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let (ur, dr) = self.re.nodal_values();
        let (ui, di) = self.im.nodal_values();
        let u = ur.iter().zip(&ui).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let du = dr.iter().zip(&di).map(|(a, b)| Complex64::new(*a, *b)).collect();
        (u, du)
    }

    /// `(u_n, u_n')` at arbitrary arclength points.
    pub fn eval_many(&self, xs: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let (ur, dr) = self.re.eval_many(xs);
        let (ui, di) = self.im.eval_many(xs);
        let u = ur.iter().zip(&ui).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let du = dr.iter().zip(&di).map(|(a, b)| Complex64::new(*a, *b)).collect();
        (u, du)
    }

    pub fn iterations(&self) -> usize {
        self.re.iterations().max(self.im.iterations())
    }
}

/// Solution of `Δ_Γ u = f` with the per-mode densities kept for derivatives.
#[derive(Debug, Clone)]
pub struct LbSolution {
    field: SurfaceScalarField,
    modes: Vec<ModePair>,
}

impl LbSolution {
    pub fn field(&self) -> &SurfaceScalarField {
        &self.field
    }

    pub fn into_field(self) -> SurfaceScalarField {
        self.field
    }

    /// Modes `0..=N_θ/2`.
    pub fn modes(&self) -> &[ModePair] {
        &self.modes
    }

    pub fn mode(&self, n: i64) -> Option<&ModePair> {
        self.modes.iter().find(|m| m.n == n)
    }

    /// Largest GMRES iteration count over all solved modes.
    pub fn max_iterations(&self) -> usize {
        self.modes.iter().map(ModePair::iterations).max().unwrap_or(0)
    }

    /// `∫_Γ u`.
    pub fn surface_mean_integral(&self) -> f64 {
        self.field.integral()
    }

    /// Evaluates the solution on another grid (same curve, any mesh and `N_θ`
    /// at least as large as the active modes require).
    pub fn evaluate_on(&self, disc: &Arc<SurfaceDiscretization>) -> Result<SurfaceScalarField> {
        let xs = disc.mesh().nodes();
        let mut stack = FourierStack::zeros(disc.ntheta(), xs.len())?;
        let half = (disc.ntheta() / 2) as i64;
        for m in &self.modes {
            if !m.solved {
                continue;
            }
            if m.n > half {
                return Err(Error::Parameter(format!("mode {} does not fit on N_θ = {}", m.n, disc.ntheta())));
            }
            let (u, _) = m.eval_many(xs);
            place_mode(&mut stack, m.n, &u, disc.ntheta());
        }
        SurfaceScalarField::from_stack(disc.clone(), &stack)
    }
}

/// Writes `c_n` and its conjugate partner into `stack`.
fn place_mode(stack: &mut FourierStack, n: i64, values: &[Complex64], ntheta: usize) {
    let half = (ntheta / 2) as i64;
    if n == 0 {
        stack.mode_mut(0).unwrap().copy_from_slice(values);
    } else if n == half {
        stack.mode_mut(-half).unwrap().copy_from_slice(values);
    } else if n < half {
        stack.mode_mut(n).unwrap().copy_from_slice(values);
        let neg = stack.mode_mut(-n).unwrap();
        for (d, v) in neg.iter_mut().zip(values) {
            *d = v.conj();
        }
    }
}

/// Solves `Δ_Γ u = f` for the mean-zero `u`.
pub fn solve_lb(f: &SurfaceScalarField, opts: &LbOptions) -> Result<LbSolution> {
    let disc = f.disc().clone();
    let layers = Arc::new(LayerPotentials::new(disc.mesh.clone(), opts.kernel, &opts.solver)?);
    solve_lb_with(f, layers, opts)
}

/// As [`solve_lb`], reusing layer potentials built on the field's mesh.
pub fn solve_lb_with(f: &SurfaceScalarField, layers: Arc<LayerPotentials>, opts: &LbOptions) -> Result<LbSolution> {
    let disc = f.disc().clone();
    if !Arc::ptr_eq(layers.mesh(), disc.mesh()) && **layers.mesh() != **disc.mesh() {
        return Err(Error::Parameter("layer potentials were built on another mesh".into()));
    }
    let ns = disc.ns();
    let ntheta = disc.ntheta();

    let abs_integral = disc.integrate(&f.values.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let integral = f.integral();
    let rel_mean = if abs_integral > 0.0 { integral.abs() / abs_integral } else { 0.0 };
    let rhs = if rel_mean > opts.mean_tol {
        match opts.mean_policy {
            MeanPolicy::Reject => return Err(Error::Solvability(rel_mean)),
            MeanPolicy::Project => {
                let shift = integral / disc.area();
                f.map(|v| v - shift)
            }
        }
    } else {
        f.clone()
    };

    let stack = rhs.stack();
    let fmax = rhs.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let half = ntheta / 2;
    let radius = disc.radius().to_vec();
    let p: Vec<f64> = disc.dr_ds().iter().zip(&radius).map(|(d, r)| d / r).collect();
    let breakpoints = disc.curve().breakpoints().to_vec();
    let length = disc.mesh().length();

    let solve_mode = |n: usize| -> Result<ModePair> {
        let n_i = n as i64;
        let idx = if n == half { -(half as i64) } else { n_i };
        let coeffs = stack.mode(idx).expect("mode in range");
        let active = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max) >= opts.truncation * fmax && fmax > 0.0;
        if !active {
            return Ok(ModePair {
                n: n_i,
                re: ModeSolution::zero(layers.clone()),
                im: ModeSolution::zero(layers.clone()),
                solved: false,
            });
        }
        let mut problem = PeriodicOdeProblem::new(length)
            .with_kernel(opts.kernel)
            .with_p(Coefficient::Nodal(p.clone()))
            .with_breakpoints(breakpoints.clone());
        problem = if n == 0 {
            problem.with_constraint(Coefficient::Nodal(radius.clone()), 0.0)
        } else {
            let nn = (n * n) as f64;
            problem.with_q(Coefficient::Nodal(radius.iter().map(|r| -nn / (r * r)).collect()))
        };
        let system = assemble_with(&problem, layers.clone())?;
        let re_rhs: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
        let im_rhs: Vec<f64> = coeffs.iter().map(|c| c.im).collect();
        let solve_part = |rhs: &[f64]| -> Result<ModeSolution> {
            if rhs.iter().all(|v| *v == 0.0) {
                Ok(ModeSolution::zero(layers.clone()))
            } else {
                system.solve_rhs(rhs, &opts.solver)
            }
        };
        let re = solve_part(&re_rhs)?;
        let im = solve_part(&im_rhs)?;
        Ok(ModePair { n: n_i, re, im, solved: true })
    };

    let modes = exec::map_indices(opts.solver.exec, half + 1, solve_mode).into_iter().collect::<Result<Vec<_>>>()?;

    let mut out = FourierStack::zeros(ntheta, ns)?;
    for m in modes.iter().filter(|m| m.solved) {
        let (u, _) = m.nodal();
        place_mode(&mut out, m.n, &u, ntheta);
    }
    let field = SurfaceScalarField::from_stack(disc, &out)?;
    Ok(LbSolution { field, modes })
}

/// `∇_Γ u = u_s ŝ + (1/r) u_θ θ̂`, with `u_s` taken from `S'σ` mode by mode.
pub fn surface_gradient(sol: &LbSolution) -> TangentVectorField {
    let disc = sol.field.disc().clone();
    let (ntheta, ns) = (disc.ntheta(), disc.ns());
    let half = (ntheta / 2) as i64;
    let mut s_stack = FourierStack::zeros(ntheta, ns).expect("valid grid");
    let mut t_stack = FourierStack::zeros(ntheta, ns).expect("valid grid");
    for m in sol.modes.iter().filter(|m| m.solved) {
        let (u, du) = m.nodal();
        place_mode(&mut s_stack, m.n, &du, ntheta);
        if m.n != half {
            let nf = m.n as f64;
            let dt: Vec<Complex64> =
                u.iter().zip(disc.radius()).map(|(c, r)| c * Complex64::new(0.0, nf / r)).collect();
            place_mode(&mut t_stack, m.n, &dt, ntheta);
        }
    }
    let s = SurfaceScalarField::from_stack(disc.clone(), &s_stack).expect("shape");
    let theta = SurfaceScalarField::from_stack(disc, &t_stack).expect("shape");
    TangentVectorField::new(s, theta).expect("same grid")
}

/// Mean-zero restriction of the Newtonian potential `v = -1/|x - x₀|` and its
/// surface Laplacian `f = Δv - 2H ∂_n v - ∂²_n v` (with `Δv = 0`).
pub fn restrict_newtonian(
    disc: &Arc<SurfaceDiscretization>,
    center: [f64; 3],
) -> Result<(SurfaceScalarField, SurfaceScalarField)> {
    let curve = disc.curve();
    let rho0 = center[0].hypot(center[1]);
    let samples = 4096;
    let min_dist = (0..samples)
        .map(|i| {
            let p = curve.point(curve.length() * i as f64 / samples as f64);
            (p.r - rho0).hypot(p.z - center[2])
        })
        .fold(f64::INFINITY, f64::min);
    if min_dist < 1e-8 {
        return Err(Error::SingularData(format!("center {center:?} lies on the surface")));
    }

    let nodes = disc.mesh().nodes();
    let info: Vec<_> = nodes
        .iter()
        .map(|&s| {
            let p = curve.point(s);
            let h = curve.mean_curvature(s)?;
            Ok((p, h))
        })
        .collect::<Result<Vec<_>>>()?;
    let ns = disc.ns();
    let mut v = vec![0.0; disc.ntheta() * ns];
    let mut f = vec![0.0; disc.ntheta() * ns];
    for (j, &th) in disc.thetas().iter().enumerate() {
        let (st, ct) = th.sin_cos();
        for (i, (p, h)) in info.iter().enumerate() {
            let x = [p.r * ct, p.r * st, p.z];
            let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
            let rho2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            let rho = rho2.sqrt();
            let (nr, nz) = p.normal();
            let normal = [nr * ct, nr * st, nz];
            let nd = normal[0] * d[0] + normal[1] * d[1] + normal[2] * d[2];
            let dv_dn = nd / (rho2 * rho);
            let d2v_dn2 = 1.0 / (rho2 * rho) - 3.0 * nd * nd / (rho2 * rho2 * rho);
            v[j * ns + i] = -1.0 / rho;
            f[j * ns + i] = -2.0 * h * dv_dn - d2v_dn2;
        }
    }
    let v = SurfaceScalarField::new(disc.clone(), v)?;
    let mean = v.mean();
    let u = v.map(|x| x - mean);
    Ok((u, SurfaceScalarField::new(disc.clone(), f)?))
}

/// `f(θ, s) = sin(mθ) |s - s₀|^α`, singular at `s₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSingularRhs {
    pub alpha: f64,
    pub s0: f64,
    pub m: u32,
}

impl PowerSingularRhs {
    pub fn new(alpha: f64, s0: f64, m: u32) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Parameter(format!("exponent {alpha} must exceed -1")));
        }
        Ok(Self { alpha, s0, m })
    }

    pub fn eval(&self, theta: f64, s: f64) -> f64 {
        (self.m as f64 * theta).sin() * (s - self.s0).abs().powf(self.alpha)
    }

    /// Whether the singular point is an edge of `curve` (needed to refine into it).
    pub fn is_aligned(&self, curve: &GeneratingCurve) -> bool {
        curve.is_breakpoint(self.s0)
    }

    pub fn sample(&self, disc: &Arc<SurfaceDiscretization>) -> SurfaceScalarField {
        disc.sample(|t, s| self.eval(t, s))
    }
}
