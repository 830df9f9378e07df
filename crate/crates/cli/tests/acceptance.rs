//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p revlb-cli --test acceptance`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revlb::kernels::{g_poisson, Kernel, KernelKind};
use revlb::quadrature::{gauss_legendre, PanelMesh};
use revlb::surface::SurfaceDiscretization;
use revlb::{
    assemble, build_mesh, dyadic_refine, Coefficient, CurveSpec, GeneratingCurve, LayerPotentials, PeriodicOdeProblem,
    RefineSide, Side, SolverKind, SolverOptions,
};
use revlb_cli::experiments::{run_hodge, run_ode_comparison, run_square_toroid, run_torus, SurfaceReport};
use revlb_cli::{ConvergenceRecord, ExperimentConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Writes the record to CSV and reads it back, so the checks below run on the
/// published schema.
fn via_csv(rec: &ConvergenceRecord) -> ConvergenceRecord {
    let mut file = tempfile::tempfile().expect("temp file");
    rec.write_csv(&mut file).expect("csv write");
    use std::io::Seek;
    file.rewind().unwrap();
    ConvergenceRecord::read_csv(&rec.experiment, file).expect("csv read")
}

// ---- 1 ---------------------------------------------------------------------

fn criterion_kernels() -> Outcome {
    let l = 2.0 * PI;
    let mut worst = 0.0f64;
    worst = worst.max((g_poisson(0.0, l) + PI / 6.0).abs());
    worst = worst.max((g_poisson(l / 2.0, l) - PI / 12.0).abs());
    let rule = gauss_legendre(20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let l: f64 = rng.random_range(0.5..10.0);
        worst = worst.max(rule.integrate(0.0, l, |t| g_poisson(t, l)).abs() / l);
        // Yukawa: ∫ G_Y(x - t) cos(2πt/L) dt = -cos(2πx/L) / (1 + (2π/L)²)
        let x: f64 = rng.random_range(0.0..l);
        let k = Kernel::new(KernelKind::Yukawa, l).unwrap();
        let w = 2.0 * PI / l;
        let mut conv = 0.0;
        for (a, b) in [(0.0, x), (x, l)] {
            for j in 0..6 {
                let lo = a + (b - a) * j as f64 / 6.0;
                let hi = a + (b - a) * (j + 1) as f64 / 6.0;
                conv += rule.integrate(lo, hi, |t| k.value(x - t) * (w * t).cos());
            }
        }
        worst = worst.max((conv + (w * x).cos() / (1.0 + w * w)).abs());
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:.2e} (tol 1e-12)"))
}

// ---- 2 ---------------------------------------------------------------------

fn criterion_ode() -> Outcome {
    let rep = run_ode_comparison(&ExperimentConfig::ode()).expect("ode comparison");
    let rec = via_csv(&rep.record);
    let mut ok = rep.oracle_disagreement <= 1e-10;
    let mut detail = format!("oracle {:.1e};", rep.oracle_disagreement);
    for label in ["poisson", "yukawa"] {
        let best = rec.series(label).filter(|r| r.ns <= 512).map(|r| r.error).fold(f64::INFINITY, f64::min);
        ok &= best <= 1e-11;
        let _ = write!(detail, " {label} best {best:.1e};");
    }
    let mut worst_ratio = 1.0f64;
    for p in rec.series("poisson") {
        let y = rec.series("yukawa").find(|r| r.ns == p.ns).expect("matching row");
        worst_ratio = worst_ratio.max(p.error / y.error).max(y.error / p.error);
    }
    ok &= worst_ratio <= 10.0;
    let _ = write!(detail, " kernel error ratio ≤ {worst_ratio:.2}");
    outcome(ok, detail)
}

// ---- 3 ---------------------------------------------------------------------

/// Non-increasing until the series reaches its floor (within 10× of its minimum).
fn monotone_to_floor(errors: &[f64]) -> bool {
    let floor = errors.iter().cloned().fold(f64::INFINITY, f64::min);
    errors.windows(2).all(|w| w[1] <= w[0] || (w[0] <= 10.0 * floor && w[1] <= 10.0 * floor))
}

fn criterion_torus() -> (Outcome, ConvergenceRecord) {
    let rep = run_torus(&ExperimentConfig::torus()).expect("torus sweep");
    let rec = via_csv(&rep.record);
    let series = |nt: usize| -> Vec<f64> { rec.rows.iter().filter(|r| r.ntheta == nt).map(|r| r.error).collect() };
    let mut ok = true;
    for nt in [4, 16, 32, 64] {
        ok &= monotone_to_floor(&series(nt));
    }
    let fine = rec.rows.iter().find(|r| r.ntheta == 64 && r.ns == 512).expect("finest row").error;
    let floor4 = series(4).into_iter().fold(f64::INFINITY, f64::min);
    let floor32 = series(32).into_iter().fold(f64::INFINITY, f64::min);
    ok &= fine <= 1e-9 && floor4 > 100.0 * floor32;
    (
        outcome(
            ok,
            format!("N_θ=64, N_s=512 error {fine:.2e} (tol 1e-9); floors N_θ=4 {floor4:.1e}, N_θ=32 {floor32:.1e}"),
        ),
        rec,
    )
}

// ---- 4 and 6 ---------------------------------------------------------------

fn criterion_square() -> (Outcome, Vec<SurfaceReport>) {
    let mut ok = true;
    let mut detail = String::new();
    let mut reports = Vec::new();
    for (alpha, name) in [(-1.0 / 3.0, "-1/3"), (-0.5, "-1/2"), (-0.75, "-3/4")] {
        let t = Instant::now();
        let rep = run_square_toroid(&ExperimentConfig::square_toroid(alpha)).expect("square sweep");
        let secs = t.elapsed().as_secs_f64();
        let rec = via_csv(&rep.record);
        let pts: Vec<(f64, f64)> = rec.rows.iter().map(|r| (r.h_final, r.error)).collect();
        let fit = revlb_cli::estimate_order(&pts, revlb_cli::experiments::PLATEAU).expect("order fit");
        let pass = (fit.slope - (1.0 + alpha)).abs() <= 0.1 && secs <= 60.0;
        ok &= pass;
        let _ = write!(detail, "α={name}: order {:.3} ({:.1}s); ", fit.slope, secs);
        reports.push(rep);
    }

    let mut manufactured = ExperimentConfig::square_toroid(-0.5);
    manufactured.rhs.kind = "manufactured-cosine".into();
    manufactured.discretization.refine_depths = vec![0];
    manufactured.discretization.panels = vec![1];
    let rep = run_square_toroid(&manufactured).expect("manufactured cosine");
    let e1 = rep.record.rows[0].error;
    reports.push(rep);

    let mut direct = manufactured.clone();
    direct.rhs.kind = "smooth-cosine".into();
    direct.discretization.panels = vec![2];
    let rep = run_square_toroid(&direct).expect("direct cosine");
    let e2 = rep.record.rows[0].error;
    reports.push(rep);
    ok &= e1 <= 1e-10 && e2 <= 1e-10;
    let _ = write!(detail, "smooth 1 panel/face {e1:.1e}, direct 2 panels/face {e2:.1e}");
    (outcome(ok, detail), reports)
}

fn criterion_interface(reports: &[SurfaceReport]) -> Outcome {
    let sided = reports.iter().map(|r| r.max_interface_defect).fold(0.0, f64::max);
    let interp = reports.iter().filter_map(|r| r.max_interpolated_defect).fold(0.0, f64::max);
    outcome(
        sided <= 1e-9 && interp <= 1e-9,
        format!("one-sided limits {sided:.1e}, panel extrapolation on smooth data {interp:.1e} (tol 1e-9)"),
    )
}

// ---- 5 ---------------------------------------------------------------------

fn criterion_hodge() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for field in ["paper-test", "basis-1", "basis-2"] {
        let mut cfg = ExperimentConfig::hodge();
        cfg.rhs.kind = field.into();
        let rep = run_hodge(&cfg).expect("hodge");
        ok &= rep.residual < 1e-13;
        let _ = write!(detail, "{field} {:.1e}; ", rep.residual);
    }
    outcome(ok, format!("{detail}(tol 1e-13)"))
}

// ---- 7 ---------------------------------------------------------------------

fn criterion_conditioning(torus: &ConvergenceRecord, square: &[SurfaceReport]) -> Outcome {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let t64: Vec<_> = torus.rows.iter().filter(|r| r.ntheta == 64).collect();
    let ratio = t64.last().unwrap().iterations as f64 / t64.first().unwrap().iterations as f64;
    worst = worst.max(ratio);
    let _ = write!(detail, "torus {}→{}; ", t64.first().unwrap().iterations, t64.last().unwrap().iterations);
    for rep in &square[..3] {
        let rows = &rep.record.rows;
        let (a, b) = (rows.first().unwrap().iterations, rows.last().unwrap().iterations);
        worst = worst.max(b as f64 / a as f64);
        let _ = write!(detail, "{} {a}→{b}; ", rows[0].label.split(',').next().unwrap());
    }
    outcome(worst <= 2.0, format!("{detail}max growth {worst:.2}× (tol 2×)"))
}

// ---- 8 ---------------------------------------------------------------------

/// `∫_0^L G_L(x - t) σ(t) dt` and its x-derivative for `σ(t) = Σ a_m v^m`,
/// `v = (t - L/2)/(L/2)`, from the exact piecewise-quadratic kernel.
fn analytic_layer(l: f64, x: f64, coeffs: &[f64]) -> (f64, f64) {
    let (c, h) = (0.5 * l, 0.5 * l);
    let mut s = 0.0;
    let mut ds = 0.0;
    // on [0, x] the kernel argument is x - t; on [x, L] it is x - t + L
    for (lo, hi, shift) in [(0.0, x, 0.0), (x, l, l)] {
        let gamma = x + shift - c - 0.5 * l;
        let g = [-gamma * gamma / (2.0 * l) + l / 24.0, gamma * h / l, -h * h / (2.0 * l)];
        let dg = [-gamma / l, h / l];
        let (v0, v1) = ((lo - c) / h, (hi - c) / h);
        let mono = |p: usize| (v1.powi(p as i32 + 1) - v0.powi(p as i32 + 1)) / (p as f64 + 1.0);
        for (m, a) in coeffs.iter().enumerate() {
            s += h * a * g.iter().enumerate().map(|(j, gj)| gj * mono(m + j)).sum::<f64>();
            ds += h * a * dg.iter().enumerate().map(|(j, gj)| gj * mono(m + j)).sum::<f64>();
        }
    }
    (s, ds)
}

fn random_mesh(rng: &mut ChaCha8Rng, l: f64) -> PanelMesh {
    let n = rng.random_range(3..9);
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.05..0.95) * l).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 0.02 * l);
    let mut bounds = vec![0.0];
    bounds.extend(cuts);
    bounds.push(l);
    PanelMesh::from_boundaries(&bounds, 16).unwrap()
}

fn criterion_oracles() -> Outcome {
    // dense LU vs GMRES
    let mut worst_solve = 0.0f64;
    let opts = SolverOptions::default();
    let dense = SolverOptions { kind: SolverKind::Dense, ..opts };
    let mut systems = Vec::new();
    for kernel in [KernelKind::Poisson, KernelKind::Yukawa] {
        for panels in [4, 8, 16, 32] {
            let prob = revlb_cli::experiments::ode_problem(kernel);
            let mesh = Arc::new(build_mesh(2.0 * PI, panels, &[], 16).unwrap());
            systems.push(assemble(&prob, mesh, &opts).unwrap());
        }
    }
    let square = Arc::new(GeneratingCurve::from_catalog(&CurveSpec::UnitSquareToroid).unwrap());
    let base = build_mesh(4.0, 1, square.breakpoints(), 16).unwrap();
    let mesh = Arc::new(dyadic_refine(&base, &[2.0], 6, RefineSide::Both).unwrap());
    let disc = SurfaceDiscretization::new(square.clone(), mesh.clone(), 8).unwrap();
    let r = disc.radius().to_vec();
    let p: Vec<f64> = disc.dr_ds().iter().zip(&r).map(|(d, r)| d / r).collect();
    let f: Vec<f64> = mesh.nodes().iter().map(|s| (s - 2.0).abs().powf(-0.5) - 1.0).collect();
    for n in [0usize, 3] {
        let mut prob = PeriodicOdeProblem::new(4.0)
            .with_p(Coefficient::Nodal(p.clone()))
            .with_f(Coefficient::Nodal(f.clone()))
            .with_breakpoints(square.breakpoints().to_vec());
        prob = if n == 0 {
            prob.with_constraint(Coefficient::Nodal(r.clone()), 0.0)
        } else {
            prob.with_q(Coefficient::Nodal(r.iter().map(|r| -9.0 / (r * r)).collect()))
        };
        systems.push(assemble(&prob, mesh.clone(), &opts).unwrap());
    }
    for sys in &systems {
        let (a, _) = sys.solve(&opts).unwrap().nodal_values();
        let (b, _) = sys.solve(&dense).unwrap().nodal_values();
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        worst_solve = worst_solve.max(diff / norm);
    }

    // near/far-field quadrature against exact antiderivatives
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_quad = 0.0f64;
    for _ in 0..40 {
        let l: f64 = rng.random_range(1.0..2.0 * PI);
        let mesh = Arc::new(random_mesh(&mut rng, l));
        let layers = LayerPotentials::new(mesh.clone(), KernelKind::Poisson, &opts).unwrap();
        let deg = rng.random_range(0..13);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sigma: Vec<f64> = mesh
            .nodes()
            .iter()
            .map(|t| {
                let v = (t - 0.5 * l) / (0.5 * l);
                coeffs.iter().rev().fold(0.0, |acc, a| acc * v + a)
            })
            .collect();
        let n = mesh.len();
        let mut targets: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..l)).collect();
        targets.push(mesh.nodes()[rng.random_range(0..n)]);
        targets.push(mesh.panels()[1].a);
        for x in targets {
            let (mut srow, mut dsrow) = (vec![0.0; n], vec![0.0; n]);
            layers.rows_at(x, Side::Right, &mut srow, &mut dsrow);
            let s: f64 = srow.iter().zip(&sigma).map(|(a, b)| a * b).sum();
            let ds: f64 = dsrow.iter().zip(&sigma).map(|(a, b)| a * b).sum();
            let (es, eds) = analytic_layer(l, x, &coeffs);
            let scale = 1.0f64.max(es.abs()).max(eds.abs());
            worst_quad = worst_quad.max((s - es).abs() / scale).max((ds - eds).abs() / scale);
        }
    }
    outcome(
        worst_solve <= 1e-11 && worst_quad <= 1e-13,
        format!(
            "dense vs GMRES {worst_solve:.1e} (tol 1e-11); quadrature vs antiderivatives {worst_quad:.1e} (tol 1e-13)"
        ),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let started = Instant::now();
    let mut lines: Vec<(u32, &str, Outcome)> = Vec::new();
    lines.push((1, "kernel identities", criterion_kernels()));
    lines.push((2, "smooth periodic ODE", criterion_ode()));
    let (o3, torus) = criterion_torus();
    lines.push((3, "torus Laplace-Beltrami", o3));
    let (o4, square) = criterion_square();
    lines.push((4, "singular convergence order", o4));
    lines.push((5, "Hodge harmonic residual", criterion_hodge()));
    lines.push((6, "interface conditions", criterion_interface(&square)));
    lines.push((7, "GMRES iteration growth", criterion_conditioning(&torus, &square)));
    lines.push((8, "oracle equivalence", criterion_oracles()));

    let mut failed = 0;
    for (id, name, o) in &lines {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("[{tag}] criterion {id}: {name}: {}", o.detail);
    }
    println!("acceptance: {} passed, {failed} failed ({:.1}s)", lines.len() - failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
