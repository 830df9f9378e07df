//! Second-kind integral equation solver for periodic ODEs
//! `u'' + p u' + q u = f` on `[0, L]`.
//!
//! The solution is represented as `u = S[σ - σ̄] + σ̄` with the Poisson kernel
//! (so the unknown mean needs no extra row) or as `u = S_Y σ` with the Yukawa
//! kernel. When `q ≡ 0` the linear constraint `∫ u w = A` is added to every
//! equation, which is a rank-one update of the operator.
//!
//! Integrals over the panel holding the target are split at the target and
//! the density is interpolated onto the two sub-rules; all other panels use
//! the plain Gauss-Legendre rule. Unknowns are scaled by `√w`.

use std::fmt;
use std::sync::Arc;

use crate::exec::{self, Execution};
use crate::kernels::{Kernel, KernelKind};
use crate::linalg::{self, dense_solve, gmres, DenseMatrix, LinearOperator, SolveReport, WeightedEmbedding};
use crate::quadrature::{barycentric_weights, lagrange_basis, PanelMesh};
use crate::{Error, Result, Side};

pub type Sampler = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A coefficient or data function of the ODE.
#[derive(Clone, Default)]
pub enum Coefficient {
    #[default]
    Zero,
    Constant(f64),
    Function(Sampler),
    /// Values at the mesh nodes, in mesh order.
    Nodal(Vec<f64>),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Zero => f.write_str("Zero"),
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Function(_) => f.write_str("Function(..)"),
            Coefficient::Nodal(v) => write!(f, "Nodal(len={})", v.len()),
        }
    }
}

impl Coefficient {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    /// True only when the coefficient is known to vanish identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Zero => true,
            Coefficient::Constant(c) => *c == 0.0,
            Coefficient::Function(_) => false,
            Coefficient::Nodal(v) => v.iter().all(|&x| x == 0.0),
        }
    }

    /// Values at the mesh nodes.
    pub fn sample(&self, mesh: &PanelMesh) -> Result<Vec<f64>> {
        match self {
            Coefficient::Zero => Ok(vec![0.0; mesh.len()]),
            Coefficient::Constant(c) => Ok(vec![*c; mesh.len()]),
            Coefficient::Function(f) => Ok(mesh.nodes().iter().map(|&x| f(x)).collect()),
            Coefficient::Nodal(v) if v.len() == mesh.len() => Ok(v.clone()),
            Coefficient::Nodal(v) => {
                Err(Error::Assembly(format!("nodal data has {} values but the mesh has {} nodes", v.len(), mesh.len())))
            }
        }
    }
}

/// `∫₀ᴸ u(x) w(x) dx = A`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub weight: Coefficient,
    pub value: f64,
}

/// `u'' + p u' + q u = f` with period `L`.
#[derive(Debug, Clone)]
pub struct PeriodicOdeProblem {
    pub period: f64,
    pub p: Coefficient,
    pub q: Coefficient,
    pub f: Coefficient,
    pub constraint: Option<Constraint>,
    pub kernel: KernelKind,
    /// Points where `p`, `q` or `f` are not smooth; must be panel boundaries.
    pub breakpoints: Vec<f64>,
}

impl PeriodicOdeProblem {
    pub fn new(period: f64) -> Self {
        Self {
            period,
            p: Coefficient::Zero,
            q: Coefficient::Zero,
            f: Coefficient::Zero,
            constraint: None,
            kernel: KernelKind::Poisson,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_p(mut self, p: Coefficient) -> Self {
        self.p = p;
        self
    }

    pub fn with_q(mut self, q: Coefficient) -> Self {
        self.q = q;
        self
    }

    pub fn with_f(mut self, f: Coefficient) -> Self {
        self.f = f;
        self
    }

    pub fn with_constraint(mut self, weight: Coefficient, value: f64) -> Self {
        self.constraint = Some(Constraint { weight, value });
        self
    }

    pub fn with_kernel(mut self, kernel: KernelKind) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0) || !self.period.is_finite() {
            return Err(Error::Parameter(format!("period {} must be positive", self.period)));
        }
        match (self.q.is_zero(), self.constraint.is_some()) {
            (true, false) => {
                Err(Error::WellPosedness("q ≡ 0 determines u only up to a constant; a constraint is required".into()))
            }
            (false, true) => Err(Error::WellPosedness("a constraint may only be combined with q ≡ 0".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Gmres,
    Dense,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gmres" => Ok(SolverKind::Gmres),
            "dense" => Ok(SolverKind::Dense),
            other => Err(Error::Parameter(format!("unknown solver '{other}'"))),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Gmres => "gmres",
            SolverKind::Dense => "dense",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Relative residual tolerance for GMRES.
    pub tol: f64,
    pub max_iter: usize,
    pub exec: Execution,
    /// Largest system stored as a dense matrix; bigger systems are applied on the fly.
    pub dense_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { kind: SolverKind::Gmres, tol: 1e-14, max_iter: 1000, exec: Execution::Parallel, dense_limit: 2048 }
    }
}

/// Discretized single-layer operator `S` and its derivative `S'` on a mesh.
pub struct LayerPotentials {
    mesh: Arc<PanelMesh>,
    kernel: Kernel,
    bary: Vec<f64>,
    dense: Option<(DenseMatrix, DenseMatrix)>,
    exec: Execution,
}

impl fmt::Debug for LayerPotentials {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LayerPotentials")
            .field("nodes", &self.mesh.len())
            .field("kernel", &self.kernel)
            .field("dense", &self.dense.is_some())
            .finish()
    }
}

impl LayerPotentials {
    pub fn new(mesh: Arc<PanelMesh>, kind: KernelKind, opts: &SolverOptions) -> Result<Self> {
        let kernel = Kernel::new(kind, mesh.length())?;
        let bary = barycentric_weights(&mesh.rule().nodes);
        let mut layers = Self { mesh, kernel, bary, dense: None, exec: opts.exec };
        if layers.mesh.len() <= opts.dense_limit {
            layers.dense = Some(layers.build_dense());
        }
        Ok(layers)
    }

    fn build_dense(&self) -> (DenseMatrix, DenseMatrix) {
        let n = self.mesh.len();
        let rows = exec::map_indices(self.exec, n, |i| {
            let mut s = vec![0.0; n];
            let mut ds = vec![0.0; n];
            self.rows_at(self.mesh.nodes()[i], Side::Right, &mut s, &mut ds);
            (s, ds)
        });
        let mut s_data = Vec::with_capacity(n * n);
        let mut ds_data = Vec::with_capacity(n * n);
        for (s, ds) in rows {
            s_data.extend(s);
            ds_data.extend(ds);
        }
        let s = DenseMatrix::from_row_major(n, s_data).expect("square").with_execution(self.exec);
        let ds = DenseMatrix::from_row_major(n, ds_data).expect("square").with_execution(self.exec);
        (s, ds)
    }

    pub fn mesh(&self) -> &Arc<PanelMesh> {
        &self.mesh
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    /// Dense `(S, S')` when the mesh is small enough.
    pub fn matrices(&self) -> Option<(&DenseMatrix, &DenseMatrix)> {
        self.dense.as_ref().map(|(s, ds)| (s, ds))
    }

    /// Quadrature rows: `Σ_l s_row[l] σ_l ≈ (Sσ)(x)` and likewise for `S'`.
    /// At a panel boundary `side` selects the panel treated as near field; the
    /// result is the one-sided limit of the discrete formula.
    pub fn rows_at(&self, x: f64, side: Side, s_row: &mut [f64], ds_row: &mut [f64]) {
        let mesh = &*self.mesh;
        let k = mesh.order();
        let length = mesh.length();
        let mut x = x.rem_euclid(length);
        if x >= length {
            x = 0.0;
        }
        let own = match side {
            Side::Right => mesh.panel_of(x),
            Side::Left => {
                if x == 0.0 {
                    x = length;
                    mesh.num_panels() - 1
                } else {
                    mesh.panels().partition_point(|p| p.a < x).saturating_sub(1)
                }
            }
        };
        let nodes = mesh.nodes();
        let weights = mesh.weights();
        for (l, (&t, &w)) in nodes.iter().zip(weights).enumerate() {
            if l / k == own {
                continue;
            }
            let d = x - t;
            s_row[l] = w * self.kernel.value(d);
            ds_row[l] = w * self.kernel.deriv_unchecked(d);
        }

        let panel = mesh.panels()[own];
        let own_nodes = mesh.panel_nodes(own);
        let (s_own, ds_own) = (&mut s_row[own * k..(own + 1) * k], &mut ds_row[own * k..(own + 1) * k]);
        s_own.iter_mut().for_each(|v| *v = 0.0);
        ds_own.iter_mut().for_each(|v| *v = 0.0);
        if x > panel.a && x < panel.b {
            let rule = mesh.rule();
            let mut basis = vec![0.0; k];
            for (lo, hi) in [(panel.a, x), (x, panel.b)] {
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (tau, wr) in rule.nodes.iter().zip(&rule.weights) {
                    let t = mid + half * tau;
                    let w = half * wr;
                    let d = x - t;
                    let g = w * self.kernel.value(d);
                    let dg = w * self.kernel.deriv_unchecked(d);
                    lagrange_basis(own_nodes, &self.bary, t, &mut basis);
                    for m in 0..k {
                        s_own[m] += g * basis[m];
                        ds_own[m] += dg * basis[m];
                    }
                }
            }
        } else {
            // x is an endpoint: the kernel is smooth over the open panel
            for (m, (&t, &w)) in own_nodes.iter().zip(&weights[own * k..(own + 1) * k]).enumerate() {
                let d = x - t;
                s_own[m] = w * self.kernel.value(d);
                ds_own[m] = w * self.kernel.deriv_unchecked(d);
            }
        }
    }

    /// `(Sσ, S'σ)` at the mesh nodes.
    pub fn apply(&self, sigma: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.mesh.len();
        let mut s = vec![0.0; n];
        let mut ds = vec![0.0; n];
        match &self.dense {
            Some((sm, dsm)) => {
                sm.apply(sigma, &mut s);
                dsm.apply(sigma, &mut ds);
            }
            None => {
                let vals = exec::map_indices(self.exec, n, |i| {
                    let mut sr = vec![0.0; n];
                    let mut dsr = vec![0.0; n];
                    self.rows_at(self.mesh.nodes()[i], Side::Right, &mut sr, &mut dsr);
                    (linalg::dot(&sr, sigma), linalg::dot(&dsr, sigma))
                });
                for (i, (a, b)) in vals.into_iter().enumerate() {
                    s[i] = a;
                    ds[i] = b;
                }
            }
        }
        (s, ds)
    }

    /// `Sᵀ y`.
    pub fn apply_s_transpose(&self, y: &[f64]) -> Vec<f64> {
        let n = self.mesh.len();
        let mut out = vec![0.0; n];
        match &self.dense {
            Some((sm, _)) => {
                for (i, &yi) in y.iter().enumerate() {
                    out.iter_mut().zip(sm.row(i)).for_each(|(o, a)| *o += yi * a);
                }
            }
            None => {
                let mut sr = vec![0.0; n];
                let mut dsr = vec![0.0; n];
                for (i, &yi) in y.iter().enumerate() {
                    self.rows_at(self.mesh.nodes()[i], Side::Right, &mut sr, &mut dsr);
                    out.iter_mut().zip(&sr).for_each(|(o, a)| *o += yi * a);
                }
            }
        }
        out
    }

    /// `S·1`, the discrete single layer of the constant density.
    fn row_sums(&self) -> Vec<f64> {
        self.apply(&vec![1.0; self.mesh.len()]).0
    }
}

/// Assembled Nyström system in the `√w`-scaled unknowns `τ = √w σ`.
pub struct NystromSystem {
    layers: Arc<LayerPotentials>,
    p: Vec<f64>,
    q: Vec<f64>,
    /// Row vector added to every equation, and the constraint value `A`.
    constraint: Option<(Vec<f64>, f64)>,
    embedding: WeightedEmbedding,
    rhs: Vec<f64>,
    dense: Option<DenseMatrix>,
}

impl fmt::Debug for NystromSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NystromSystem")
            .field("dim", &self.dim())
            .field("kernel", &self.layers.kernel.kind)
            .field("constrained", &self.constraint.is_some())
            .field("dense", &self.dense.is_some())
            .finish()
    }
}

/// Builds the layer potentials on `mesh` and assembles `problem`.
pub fn assemble(problem: &PeriodicOdeProblem, mesh: Arc<PanelMesh>, opts: &SolverOptions) -> Result<NystromSystem> {
    let layers = Arc::new(LayerPotentials::new(mesh, problem.kernel, opts)?);
    assemble_with(problem, layers)
}

/// Assembles `problem` against precomputed layer potentials (shared across
/// problems on the same mesh and kernel).
pub fn assemble_with(problem: &PeriodicOdeProblem, layers: Arc<LayerPotentials>) -> Result<NystromSystem> {
    problem.validate()?;
    let mesh = layers.mesh().clone();
    if problem.kernel != layers.kernel.kind {
        return Err(Error::Assembly("problem kernel differs from the layer potentials".into()));
    }
    if (problem.period - mesh.length()).abs() > 1e-12 * problem.period {
        return Err(Error::Assembly(format!(
            "mesh length {} differs from the period {}",
            mesh.length(),
            problem.period
        )));
    }
    if let Some(b) = problem.breakpoints.iter().find(|&&b| !mesh.has_boundary(b)) {
        return Err(Error::Assembly(format!("coefficient breakpoint {b} is not a panel boundary")));
    }
    let p = problem.p.sample(&mesh)?;
    let q = problem.q.sample(&mesh)?;
    let rhs = problem.f.sample(&mesh)?;
    let embedding = WeightedEmbedding::new(mesh.weights())?;
    let length = mesh.length();
    let weights = mesh.weights();

    let constraint = match &problem.constraint {
        None => None,
        Some(c) => {
            let wf = c.weight.sample(&mesh)?;
            let y: Vec<f64> = wf.iter().zip(weights).map(|(a, w)| a * w).collect();
            let mut vec = layers.apply_s_transpose(&y);
            if layers.kernel.kind == KernelKind::Poisson {
                let sr = layers.row_sums();
                let shift = linalg::dot(&y, &sr);
                let total: f64 = y.iter().sum();
                vec.iter_mut().zip(weights).for_each(|(v, w)| *v += (total - shift) * w / length);
            }
            Some((vec, c.value))
        }
    };

    let mut system = NystromSystem { layers, p, q, constraint, embedding, rhs, dense: None };
    system.dense = system.materialize();
    Ok(system)
}

impl NystromSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn mesh(&self) -> &Arc<PanelMesh> {
        self.layers.mesh()
    }

    pub fn layers(&self) -> &Arc<LayerPotentials> {
        &self.layers
    }

    pub fn kernel(&self) -> KernelKind {
        self.layers.kernel.kind
    }

    pub fn embedding(&self) -> &WeightedEmbedding {
        &self.embedding
    }

    /// Unscaled right-hand side `f` (without the constraint value).
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn dense_matrix(&self) -> Option<&DenseMatrix> {
        self.dense.as_ref()
    }

    /// The operator on unscaled densities, `σ ↦ Aσ`.
    pub fn apply_unscaled(&self, sigma: &[f64]) -> Vec<f64> {
        let mesh = self.mesh();
        let length = mesh.length();
        let mut y = match self.kernel() {
            KernelKind::Poisson => {
                let mean = linalg::dot(mesh.weights(), sigma) / length;
                let centered: Vec<f64> = sigma.iter().map(|s| s - mean).collect();
                let (s, ds) = self.layers.apply(&centered);
                (0..sigma.len())
                    .map(|i| centered[i] + self.p[i] * ds[i] + self.q[i] * (s[i] + mean))
                    .collect::<Vec<_>>()
            }
            KernelKind::Yukawa => {
                let (s, ds) = self.layers.apply(sigma);
                (0..sigma.len()).map(|i| sigma[i] + self.p[i] * ds[i] + (self.q[i] + 1.0) * s[i]).collect()
            }
        };
        if let Some((c, _)) = &self.constraint {
            let cs = linalg::dot(c, sigma);
            y.iter_mut().for_each(|v| *v += cs);
        }
        y
    }

    fn materialize(&self) -> Option<DenseMatrix> {
        let (s, ds) = self.layers.matrices()?;
        let mesh = self.mesh();
        let n = mesh.len();
        let length = mesh.length();
        let mw: Vec<f64> = mesh.weights().iter().map(|w| w / length).collect();
        let sw = self.embedding.sqrt_weights();
        let poisson = self.kernel() == KernelKind::Poisson;
        let (sr, dsr) = if poisson {
            let ones = vec![1.0; n];
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            s.apply(&ones, &mut a);
            ds.apply(&ones, &mut b);
            (a, b)
        } else {
            (Vec::new(), Vec::new())
        };
        let zero = vec![0.0; n];
        let c = self.constraint.as_ref().map(|(c, _)| c.as_slice()).unwrap_or(&zero);
        let mut out = DenseMatrix::zeros(n).with_execution(self.layers.exec);
        exec::for_each_row(self.layers.exec, out.data_mut(), n, |i, row| {
            let (srow, dsrow) = (s.row(i), ds.row(i));
            let (pi, qi) = (self.p[i], self.q[i]);
            for l in 0..n {
                let a = if poisson {
                    -mw[l] + pi * (dsrow[l] - dsr[i] * mw[l]) + qi * (srow[l] - sr[i] * mw[l]) + qi * mw[l]
                } else {
                    pi * dsrow[l] + (qi + 1.0) * srow[l]
                };
                row[l] = sw[i] * (a + c[l]) / sw[l];
            }
            row[i] += 1.0;
        });
        Some(out)
    }

    /// Solves with the assembled right-hand side.
    pub fn solve(&self, opts: &SolverOptions) -> Result<ModeSolution> {
        self.solve_rhs(&self.rhs, opts)
    }

    /// Solves with another right-hand side `f` given at the nodes.
    pub fn solve_rhs(&self, f: &[f64], opts: &SolverOptions) -> Result<ModeSolution> {
        if f.len() != self.dim() {
            return Err(Error::Parameter("right-hand side length mismatch".into()));
        }
        let shift = self.constraint.as_ref().map(|(_, a)| *a).unwrap_or(0.0);
        let shifted: Vec<f64> = f.iter().map(|v| v + shift).collect();
        let b = self.embedding.scale_in(&shifted);
        let (tau, report) = match opts.kind {
            SolverKind::Dense => {
                let m = self.dense.as_ref().ok_or_else(|| {
                    Error::Parameter(format!(
                        "dense solve needs at most {} unknowns, system has {}",
                        opts.dense_limit,
                        self.dim()
                    ))
                })?;
                (dense_solve(m, &b)?, None)
            }
            SolverKind::Gmres => {
                let (x, rep) = gmres(self, &b, opts.tol, opts.max_iter);
                if !rep.converged {
                    return Err(Error::NotConverged { iterations: rep.iterations, residual: rep.relative_residual });
                }
                (x, Some(rep))
            }
        };
        let sigma = self.embedding.scale_out(&tau);
        Ok(ModeSolution::new(self.layers.clone(), sigma, report))
    }
}

impl LinearOperator for NystromSystem {
    fn dim(&self) -> usize {
        self.rhs.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if let Some(m) = &self.dense {
            m.apply(x, y);
            return;
        }
        let sigma = self.embedding.scale_out(x);
        let out = self.apply_unscaled(&sigma);
        y.copy_from_slice(&self.embedding.scale_in(&out));
    }
}

/// Solved density with evaluators for `u` and `u'`.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    layers: Arc<LayerPotentials>,
    sigma: Vec<f64>,
    /// Density fed to the layer potentials (`σ - σ̄` for Poisson).
    density: Vec<f64>,
    mean: f64,
    report: Option<SolveReport>,
}

impl ModeSolution {
    fn new(layers: Arc<LayerPotentials>, sigma: Vec<f64>, report: Option<SolveReport>) -> Self {
        let mesh = layers.mesh().clone();
        let (density, mean) = match layers.kernel.kind {
            KernelKind::Poisson => {
                let mean = linalg::dot(mesh.weights(), &sigma) / mesh.length();
                (sigma.iter().map(|s| s - mean).collect(), mean)
            }
            KernelKind::Yukawa => (sigma.clone(), 0.0),
        };
        Self { layers, sigma, density, mean, report }
    }

    /// The zero solution on `layers`' mesh.
    pub fn zero(layers: Arc<LayerPotentials>) -> Self {
        let n = layers.mesh().len();
        Self::new(layers, vec![0.0; n], None)
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// The constant `C` of the representation (mean of `u` for Poisson).
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn mesh(&self) -> &Arc<PanelMesh> {
        self.layers.mesh()
    }

    pub fn kernel(&self) -> KernelKind {
        self.layers.kernel.kind
    }

    pub fn report(&self) -> Option<&SolveReport> {
        self.report.as_ref()
    }

    pub fn iterations(&self) -> usize {
        self.report.as_ref().map(|r| r.iterations).unwrap_or(0)
    }

    fn eval_pair(&self, x: f64, side: Side) -> (f64, f64) {
        let n = self.density.len();
        let mut s = vec![0.0; n];
        let mut ds = vec![0.0; n];
        self.layers.rows_at(x, side, &mut s, &mut ds);
        (linalg::dot(&s, &self.density) + self.mean, linalg::dot(&ds, &self.density))
    }

    /// `u(x)`, `x` wrapped into `[0, L)`.
    pub fn eval_u(&self, x: f64) -> f64 {
        self.eval_pair(x, Side::Right).0
    }

    /// `u'(x)`.
    pub fn eval_du(&self, x: f64) -> f64 {
        self.eval_pair(x, Side::Right).1
    }

    /// One-sided limits `(u, u')` of the discrete representation at `x`.
    pub fn eval_sided(&self, x: f64, side: Side) -> (f64, f64) {
        self.eval_pair(x, side)
    }

    /// `(u, u')` at the mesh nodes.
    pub fn nodal_values(&self) -> (Vec<f64>, Vec<f64>) {
        let (mut s, ds) = self.layers.apply(&self.density);
        s.iter_mut().for_each(|v| *v += self.mean);
        (s, ds)
    }

    /// `(u, u')` at arbitrary points.
    pub fn eval_many(&self, xs: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let pairs = exec::map_indices(self.layers.exec, xs.len(), |i| self.eval_pair(xs[i], Side::Right));
        pairs.into_iter().unzip()
    }
}
