//! Drivers for the four experiments: smooth periodic ODE, Newtonian
//! restriction on the torus, singular data on the square toroid, and the
//! Hodge decomposition.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use revlb::exec::map_indices;
use revlb::hodge::{harmonic_basis, hodge_decompose, project_residual, spectral_gradient, TangentVectorField};
use revlb::quadrature::{lagrange_interp, PanelMesh};
use revlb::surface::{
    relative_l2_error, restrict_newtonian, solve_lb, LbSolution, ModePair, PowerSingularRhs, SurfaceDiscretization,
    SurfaceScalarField,
};
use revlb::{
    assemble, build_mesh, dyadic_refine, Coefficient, GeneratingCurve, KernelKind, ModeSolution, PeriodicOdeProblem,
    Side, SolverOptions,
};

use crate::config::{ExperimentConfig, RhsKind};
use crate::oracle::solve_collocation;
use crate::record::{estimate_order, ConvergenceRecord, ConvergenceRow, OrderFit};

/// Errors at or below this level are treated as rounding plateau when fitting.
pub const PLATEAU: f64 = 1e-13;

// ---- smooth periodic ODE ---------------------------------------------------

pub const ODE_PERIOD: f64 = 2.0 * PI;

pub fn ode_p(x: f64) -> f64 {
    (3.0 * x).sin() - 2.0
}

pub fn ode_q(x: f64) -> f64 {
    2.0 * (5.0 * x).sin() - 3.0
}

/// `(e^{sin 2x})''`.
pub fn ode_f(x: f64) -> f64 {
    let (s, c) = (2.0 * x).sin_cos();
    4.0 * (c * c - s) * s.exp()
}

pub fn ode_problem(kernel: KernelKind) -> PeriodicOdeProblem {
    PeriodicOdeProblem::new(ODE_PERIOD)
        .with_kernel(kernel)
        .with_p(Coefficient::function(ode_p))
        .with_q(Coefficient::function(ode_q))
        .with_f(Coefficient::function(ode_f))
}

pub fn solve_ode(kernel: KernelKind, panels: usize, order: usize, opts: &SolverOptions) -> Result<ModeSolution> {
    let mesh = Arc::new(build_mesh(ODE_PERIOD, panels, &[], order)?);
    Ok(assemble(&ode_problem(kernel), mesh, opts)?.solve(opts)?)
}

/// Sup-norm disagreement between a Nyström solution and the collocation
/// oracle, relative to the oracle's sup norm.
pub fn oracle_disagreement(sol: &ModeSolution, points: usize) -> Result<f64> {
    let oracle = solve_collocation(points, ODE_PERIOD, ode_p, ode_q, ode_f)?;
    let (u, _) = sol.eval_many(&oracle.points);
    let scale = oracle.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = u.iter().zip(&oracle.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(diff / scale)
}

#[derive(Debug, Clone)]
pub struct OdeReport {
    pub record: ConvergenceRecord,
    pub reference_ns: usize,
    pub oracle_disagreement: f64,
}

/// Sweeps `panels` for both kernels against a reference at eight times the
/// finest resolution, itself checked against spectral collocation.
pub fn run_ode_comparison(cfg: &ExperimentConfig) -> Result<OdeReport> {
    let opts = cfg.solver_options()?;
    let order = cfg.discretization.order;
    let finest = *cfg.discretization.panels.iter().max().expect("validated non-empty");
    let ref_panels = 8 * finest;
    let reference = solve_ode(KernelKind::Poisson, ref_panels, order, &opts)?;
    let disagreement = oracle_disagreement(&reference, 201)?;
    if !(disagreement <= 1e-10) {
        bail!("reference and collocation oracle disagree by {disagreement:.3e}");
    }
    let ref_mesh = reference.mesh().clone();
    let (u_ref, _) = reference.nodal_values();
    let w = ref_mesh.weights();
    let norm_ref = u_ref.iter().zip(w).map(|(u, w)| w * u * u).sum::<f64>().sqrt();

    let mut points = Vec::new();
    for kernel in [KernelKind::Poisson, KernelKind::Yukawa] {
        for &p in &cfg.discretization.panels {
            points.push((kernel, p));
        }
    }
    let rows = map_indices(opts.exec, points.len(), |i| -> Result<ConvergenceRow> {
        let (kernel, panels) = points[i];
        let t = Instant::now();
        let sol = solve_ode(kernel, panels, order, &opts)?;
        let wall = t.elapsed().as_secs_f64();
        let (u, _) = sol.eval_many(ref_mesh.nodes());
        let diff = u.iter().zip(&u_ref).zip(w).map(|((a, b), w)| w * (a - b).powi(2)).sum::<f64>().sqrt();
        Ok(ConvergenceRow {
            label: kernel.to_string(),
            ns: sol.mesh().len(),
            ntheta: 0,
            depth: 0,
            h_final: sol.mesh().min_width(),
            error: diff / norm_ref,
            iterations: sol.iterations(),
            wall_time_s: wall,
        })
    });
    let mut record = ConvergenceRecord::new("ode-compare");
    record.rows = rows.into_iter().collect::<Result<_>>()?;
    record.sort();
    Ok(OdeReport { record, reference_ns: ref_mesh.len(), oracle_disagreement: disagreement })
}

// ---- surfaces --------------------------------------------------------------

pub fn build_curve(cfg: &ExperimentConfig) -> Result<Arc<GeneratingCurve>> {
    Ok(Arc::new(GeneratingCurve::from_catalog(&cfg.curve_spec()?)?))
}

/// Mesh with `panels` per smooth segment, refined `depth` times at the
/// configured targets.
pub fn build_surface_mesh(
    cfg: &ExperimentConfig,
    curve: &GeneratingCurve,
    panels: usize,
    depth: u32,
) -> Result<PanelMesh> {
    let base = build_mesh(curve.length(), panels, curve.breakpoints(), cfg.discretization.order)?;
    let targets = &cfg.discretization.refine_targets;
    if targets.is_empty() || depth == 0 {
        return Ok(base);
    }
    Ok(dyadic_refine(&base, targets, depth, cfg.refine_side()?)?)
}

pub fn discretize(
    cfg: &ExperimentConfig,
    curve: &Arc<GeneratingCurve>,
    ntheta: usize,
    panels: usize,
    depth: u32,
) -> Result<Arc<SurfaceDiscretization>> {
    let mesh = Arc::new(build_surface_mesh(cfg, curve, panels, depth)?);
    Ok(SurfaceDiscretization::new(curve.clone(), mesh, ntheta)?)
}

/// `u = -(4/π²) cos(πs/2) sin(mθ)` on the square toroid and its surface Laplacian.
pub fn manufactured_cosine(disc: &Arc<SurfaceDiscretization>, m: u32) -> (SurfaceScalarField, SurfaceScalarField) {
    let c = 4.0 / (PI * PI);
    let mf = m as f64;
    let curve = disc.curve().clone();
    let u = disc.sample(|t, s| -c * (PI * s / 2.0).cos() * (mf * t).sin());
    let f = disc.sample(|t, s| {
        let p = curve.point(s);
        let (sn, cs) = (PI * s / 2.0).sin_cos();
        (mf * t).sin() * (cs + p.dr / p.r * (2.0 / PI) * sn + mf * mf * c / (p.r * p.r) * cs)
    });
    (u, f)
}

/// Right-hand side and, when known, the exact solution.
pub fn surface_rhs(
    cfg: &ExperimentConfig,
    disc: &Arc<SurfaceDiscretization>,
) -> Result<(SurfaceScalarField, Option<SurfaceScalarField>)> {
    let r = &cfg.rhs;
    Ok(match cfg.rhs_kind()? {
        RhsKind::Newtonian => {
            let (u, f) = restrict_newtonian(disc, r.center)?;
            (f, Some(u))
        }
        RhsKind::PowerSingular => (PowerSingularRhs::new(r.alpha, r.s0, r.m)?.sample(disc), None),
        RhsKind::SmoothCosine => {
            let mf = r.m as f64;
            (disc.sample(|t, s| (mf * t).sin() * (PI * s / 2.0).cos()), None)
        }
        RhsKind::ManufacturedCosine => {
            let (u, f) = manufactured_cosine(disc, r.m);
            (f, Some(u))
        }
        other => bail!("rhs kind {other:?} is not a scalar surface source"),
    })
}

/// `max |u_n|` and `max |u_n'|` over the nodes, real and imaginary parts together.
fn mode_scales(m: &ModePair) -> (f64, f64) {
    let (u, du) = m.nodal();
    let su = u.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let sd = du.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    (su, sd)
}

/// Largest relative jump of `u_n` or `u_n'` across any curve breakpoint,
/// using the one-sided limits of the integral representation.
pub fn interface_defect(sol: &LbSolution, curve: &GeneratingCurve) -> f64 {
    let mut worst = 0.0f64;
    for m in sol.modes().iter().filter(|m| m.solved) {
        let (su, sd) = mode_scales(m);
        for part in [&m.re, &m.im] {
            for &b in curve.breakpoints() {
                let (ul, dl) = part.eval_sided(b, Side::Left);
                let (ur, dr) = part.eval_sided(b, Side::Right);
                if su > 0.0 {
                    worst = worst.max((ul - ur).abs() / su);
                }
                if sd > 0.0 {
                    worst = worst.max((dl - dr).abs() / sd);
                }
            }
        }
    }
    worst
}

/// Largest relative mismatch at a breakpoint between the nodal interpolants of
/// `u_n` and `u_n'` on the two neighbouring panels, each extrapolated to the
/// edge. Only meaningful when the data are smooth on every face.
pub fn interface_defect_interpolated(sol: &LbSolution, curve: &GeneratingCurve) -> Result<f64> {
    let mut worst = 0.0f64;
    for m in sol.modes().iter().filter(|m| m.solved) {
        let (su, sd) = mode_scales(m);
        for part in [&m.re, &m.im] {
            let mesh = part.mesh();
            let k = mesh.order();
            let (u, du) = part.nodal_values();
            let np = mesh.num_panels();
            for &b in curve.breakpoints() {
                let right = mesh.panel_of(b);
                let left = (right + np - 1) % np;
                let edge = |p: usize, x: f64, v: &[f64]| -> Result<f64> {
                    let pan = mesh.panels()[p];
                    Ok(lagrange_interp((pan.a, pan.b), mesh.panel_nodes(p), &v[p * k..(p + 1) * k], x)?)
                };
                let xl = if right == 0 { mesh.length() } else { b };
                for (vals, scale) in [(&u, su), (&du, sd)] {
                    if scale > 0.0 {
                        let jump = edge(left, xl, vals)? - edge(right, b, vals)?;
                        worst = worst.max(jump.abs() / scale);
                    }
                }
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct SurfaceReport {
    pub record: ConvergenceRecord,
    /// Order fit per label (only for self-convergence sweeps in `h_final`).
    pub fits: Vec<(String, OrderFit)>,
    pub max_interface_defect: f64,
    /// Panel-interpolant edge mismatch, for sources smooth on every face.
    pub max_interpolated_defect: Option<f64>,
}

fn series_label(cfg: &ExperimentConfig, ntheta: usize) -> Result<String> {
    Ok(match cfg.rhs_kind()? {
        RhsKind::PowerSingular => format!("alpha={},ntheta={ntheta}", cfg.rhs.alpha),
        _ => format!("{},ntheta={ntheta}", cfg.rhs.kind),
    })
}

/// Sweeps every `(N_θ, panels, depth)` combination. Errors are measured
/// against the exact solution when the source has one; otherwise against a
/// deeper solve (`depth + reference_offset` when refining, or
/// `panels · 2^reference_offset` when not).
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<SurfaceReport> {
    let curve = build_curve(cfg)?;
    let opts = cfg.lb_options()?;
    let d = &cfg.discretization;
    let mut points = Vec::new();
    for &nt in &d.ntheta {
        for &p in &d.panels {
            for &depth in &d.refine_depths {
                points.push((nt, p, depth));
            }
        }
    }
    let refining = !d.refine_targets.is_empty();
    let offset = d.reference_offset;
    let smooth = matches!(cfg.rhs_kind()?, RhsKind::Newtonian | RhsKind::SmoothCosine | RhsKind::ManufacturedCosine);
    let results = map_indices(opts.solver.exec, points.len(), |i| -> Result<(ConvergenceRow, f64, Option<f64>)> {
        let (nt, panels, depth) = points[i];
        let disc = discretize(cfg, &curve, nt, panels, depth)?;
        let (f, exact) = surface_rhs(cfg, &disc)?;
        let t = Instant::now();
        let sol = solve_lb(&f, &opts).with_context(|| format!("N_θ={nt}, panels={panels}, depth={depth}"))?;
        let wall = t.elapsed().as_secs_f64();
        let defect = interface_defect(&sol, &curve);
        let interpolated = if smooth { Some(interface_defect_interpolated(&sol, &curve)?) } else { None };
        let error = match exact {
            Some(u) => relative_l2_error(sol.field(), &u)?,
            None => {
                let (rp, rd) = if refining { (panels, depth + offset) } else { (panels << offset, depth) };
                let rdisc = discretize(cfg, &curve, nt, rp, rd)?;
                let (rf, _) = surface_rhs(cfg, &rdisc)?;
                let rsol = solve_lb(&rf, &opts)?;
                relative_l2_error(sol.field(), &rsol.evaluate_on(&disc)?)?
            }
        };
        let row = ConvergenceRow {
            label: series_label(cfg, nt)?,
            ns: disc.ns(),
            ntheta: nt,
            depth,
            h_final: disc.mesh().min_width(),
            error,
            iterations: sol.max_iterations(),
            wall_time_s: wall,
        };
        Ok((row, defect, interpolated))
    });
    let mut record = ConvergenceRecord::new(format!("converge-{}", cfg.geometry.curve));
    let mut max_defect = 0.0f64;
    let mut max_interp: Option<f64> = None;
    for r in results {
        let (row, defect, interp) = r?;
        max_defect = max_defect.max(defect);
        if let Some(v) = interp {
            max_interp = Some(max_interp.unwrap_or(0.0).max(v));
        }
        record.rows.push(row);
    }
    record.sort();
    let mut fits = Vec::new();
    if refining && d.refine_depths.len() > 1 {
        for label in record.labels() {
            let pts: Vec<(f64, f64)> = record.series(&label).map(|r| (r.h_final, r.error)).collect();
            if let Ok(fit) = estimate_order(&pts, PLATEAU) {
                fits.push((label, fit));
            }
        }
    }
    Ok(SurfaceReport { record, fits, max_interface_defect: max_defect, max_interpolated_defect: max_interp })
}

/// Torus sweep; checks the configuration describes a torus problem.
pub fn run_torus(cfg: &ExperimentConfig) -> Result<SurfaceReport> {
    if cfg.geometry.curve != "circular-torus" {
        bail!("torus experiment needs geometry.curve = \"circular-torus\"");
    }
    run_convergence(cfg)
}

/// Square-toroid sweep; for singular data the fitted order should be `1 + α`.
pub fn run_square_toroid(cfg: &ExperimentConfig) -> Result<SurfaceReport> {
    if cfg.geometry.curve != "unit-square-toroid" {
        bail!("square-toroid experiment needs geometry.curve = \"unit-square-toroid\"");
    }
    run_convergence(cfg)
}

/// Solution of a single configured problem on the first grid of each sweep list.
pub struct LbSolveOutput {
    pub disc: Arc<SurfaceDiscretization>,
    pub f: SurfaceScalarField,
    pub solution: LbSolution,
    pub exact: Option<SurfaceScalarField>,
}

pub fn run_lb_solve(cfg: &ExperimentConfig) -> Result<LbSolveOutput> {
    let curve = build_curve(cfg)?;
    let d = &cfg.discretization;
    let disc = discretize(cfg, &curve, d.ntheta[0], d.panels[0], d.refine_depths[0])?;
    let (f, exact) = surface_rhs(cfg, &disc)?;
    let solution = solve_lb(&f, &cfg.lb_options()?)?;
    Ok(LbSolveOutput { disc, f, solution, exact })
}

// ---- Hodge -----------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct HodgeReport {
    pub field: String,
    pub ntheta: usize,
    pub ns: usize,
    /// `‖H - c₁H₁ - c₂H₂‖ / ‖F‖`.
    pub residual: f64,
    pub coefficients: [f64; 2],
    /// `‖H‖ / ‖F‖`.
    pub harmonic_fraction: f64,
    /// Sum of the absolute pairwise inner products of the three parts, over `‖F‖²`.
    pub orthogonality: f64,
}

pub fn hodge_field(cfg: &ExperimentConfig, disc: &Arc<SurfaceDiscretization>) -> Result<TangentVectorField> {
    let curve = disc.curve().clone();
    let (h1, h2) = harmonic_basis(disc);
    Ok(match cfg.rhs_kind()? {
        RhsKind::Basis1 => h1,
        RhsKind::Basis2 => h2,
        RhsKind::PaperTest => TangentVectorField::sample(disc, |_, s| {
            let r = curve.point(s).r;
            (r, 1.0 / (r * r))
        }),
        RhsKind::GradientOf => {
            let (m, k) = (cfg.rhs.m as f64, cfg.rhs.k as f64);
            let l = curve.length();
            let phi = disc.sample(|t, s| (m * t).cos() * (2.0 * PI * k * s / l).cos());
            spectral_gradient(&phi)
        }
        other => bail!("rhs kind {other:?} is not a vector field"),
    })
}

pub fn run_hodge(cfg: &ExperimentConfig) -> Result<HodgeReport> {
    let curve = build_curve(cfg)?;
    let d = &cfg.discretization;
    let disc = discretize(cfg, &curve, d.ntheta[0], d.panels[0], d.refine_depths[0])?;
    let f = hodge_field(cfg, &disc)?;
    let norm = f.l2_norm();
    let dec = hodge_decompose(&f, &cfg.lb_options()?)?;
    let (h1, h2) = harmonic_basis(&disc);
    let (residual, coefficients) = project_residual(&dec.harmonic, (&h1, &h2), norm)?;
    let orthogonality = (dec.gradient.inner(&dec.cogradient).abs()
        + dec.gradient.inner(&dec.harmonic).abs()
        + dec.cogradient.inner(&dec.harmonic).abs())
        / (norm * norm);
    Ok(HodgeReport {
        field: cfg.rhs.kind.clone(),
        ntheta: disc.ntheta(),
        ns: disc.ns(),
        residual,
        coefficients,
        harmonic_fraction: dec.harmonic.l2_norm() / norm,
        orthogonality,
    })
}
