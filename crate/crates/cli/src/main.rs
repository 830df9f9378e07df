// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use revlb_cli::experiments::{run_hodge, run_lb_solve, run_ode_comparison, run_square_toroid, run_torus, solve_ode};
use revlb_cli::{ConvergenceRecord, ExperimentConfig};

#[derive(Parser)]
#[command(name = "revlb", version, about = "Laplace-Beltrami solver on surfaces of revolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the smooth periodic test ODE and print u, u' at the nodes.
    OdeSolve(Common),
    /// Convergence of both kernels on the smooth periodic ODE.
    OdeCompare(Common),
    /// Solve one surface problem and print the solution on the grid.
    LbSolve(Common),
    /// Convergence sweep on the torus or the square toroid.
    Converge {
        #[arg(value_enum)]
        surface: Surface,
        #[command(flatten)]
        common: Common,
    },
    /// Hodge decomposition and harmonic-basis projection.
    Hodge(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Surface {
    Torus,
    SquareToroid,
}

#[derive(Args, Clone)]
struct Common {
    /// Configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    kernel: Option<String>,
    /// Nodes per panel.
    #[arg(long)]
    order: Option<usize>,
    /// Panels per smooth segment (comma separated for sweeps).
    #[arg(long, value_delimiter = ',')]
    panels: Option<Vec<usize>>,
    /// Dyadic refinement depths (comma separated).
    #[arg(long, value_delimiter = ',')]
    refine_depth: Option<Vec<u32>>,
    /// Exponent of the singular source.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Azimuthal grid sizes (comma separated).
    #[arg(long, value_delimiter = ',')]
    ntheta: Option<Vec<usize>>,
    /// Right-hand side or vector field name.
    #[arg(long)]
    rhs: Option<String>,
    #[arg(long)]
    gmres_tol: Option<f64>,
    #[arg(long)]
    gmres_maxit: Option<usize>,
    /// gmres or dense.
    #[arg(long)]
    solver: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
    /// Output CSV path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

impl Common {
    fn config(&self, base: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => base,
        };
        if let Some(v) = &self.kernel {
            c.solver.kernel = v.clone();
        }
        if let Some(v) = self.order {
            c.discretization.order = v;
        }
        if let Some(v) = &self.panels {
            c.discretization.panels = v.clone();
        }
        if let Some(v) = &self.refine_depth {
            c.discretization.refine_depths = v.clone();
        }
        if let Some(v) = self.alpha {
            c.rhs.alpha = v;
        }
        if let Some(v) = &self.ntheta {
            c.discretization.ntheta = v.clone();
        }
        if let Some(v) = &self.rhs {
            c.rhs.kind = v.clone();
        }
        if let Some(v) = self.gmres_tol {
            c.solver.tol = v;
        }
        if let Some(v) = self.gmres_maxit {
            c.solver.max_iter = v;
        }
        if let Some(v) = &self.solver {
            c.solver.kind = v.clone();
        }
        if self.sequential {
            c.solver.sequential = true;
        }
        if let Some(v) = &self.out {
            c.output.path = Some(v.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn output(cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_record(cfg: &ExperimentConfig, common: &Common, record: &ConvergenceRecord) -> Result<()> {
    record.write_csv(output(cfg)?)?;
    if let Some(p) = &common.json {
        std::fs::write(p, record.to_json())?;
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn set_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn set_jobs(_: Option<usize>) -> Result<()> {
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (common, base) = match &cli.command {
        Command::OdeSolve(c) | Command::OdeCompare(c) => (c, ExperimentConfig::ode()),
        Command::LbSolve(c) => (c, ExperimentConfig::default()),
        Command::Converge { surface: Surface::Torus, common } => (common, ExperimentConfig::torus()),
        Command::Converge { surface: Surface::SquareToroid, common } => {
            (common, ExperimentConfig::square_toroid(common.alpha.unwrap_or(-0.5)))
        }
        Command::Hodge(c) => (c, ExperimentConfig::hodge()),
    };
    let cfg = common.config(base)?;
    if common.print_config {
        print!("{}", cfg.to_text());
        return Ok(());
    }
    set_jobs(common.jobs)?;

    match &cli.command {
        Command::OdeSolve(_) => {
            let opts = cfg.solver_options()?;
            let sol = solve_ode(cfg.kernel()?, cfg.discretization.panels[0], cfg.discretization.order, &opts)?;
            let (u, du) = sol.nodal_values();
            let mut wr = csv::Writer::from_writer(output(&cfg)?);
            wr.write_record(["s", "u", "du"])?;
            for ((s, u), du) in sol.mesh().nodes().iter().zip(&u).zip(&du) {
                wr.serialize((s, u, du))?;
            }
            wr.flush()?;
            eprintln!("N_s = {}, iterations = {}", sol.mesh().len(), sol.iterations());
        }
        Command::OdeCompare(_) => {
            let rep = run_ode_comparison(&cfg)?;
            eprintln!("reference N_s = {}, oracle disagreement = {:.3e}", rep.reference_ns, rep.oracle_disagreement);
            write_record(&cfg, common, &rep.record)?;
        }
        Command::LbSolve(_) => {
            let out = run_lb_solve(&cfg)?;
            let ns = out.disc.ns();
            let mut wr = csv::Writer::from_writer(output(&cfg)?);
            wr.write_record(["theta", "s", "f", "u", "exact"])?;
            for (j, &t) in out.disc.thetas().iter().enumerate() {
                for (i, &s) in out.disc.mesh().nodes().iter().enumerate() {
                    let exact = out.exact.as_ref().map(|e| e.at(j, i)).unwrap_or(f64::NAN);
                    wr.serialize((t, s, out.f.at(j, i), out.solution.field().at(j, i), exact))?;
                }
            }
            wr.flush()?;
            if let Some(e) = &out.exact {
                let err = revlb::surface::relative_l2_error(out.solution.field(), e)?;
                eprintln!("N_θ = {}, N_s = {ns}, relative L2 error = {err:.3e}", out.disc.ntheta());
            }
        }
        Command::Converge { .. } => {
            let rep = match &cli.command {
                Command::Converge { surface: Surface::Torus, .. } => run_torus(&cfg)?,
                _ => run_square_toroid(&cfg)?,
            };
            for (label, fit) in &rep.fits {
                eprintln!("{label}: order {:.4} ± {:.4} ({} points)", fit.slope, fit.stderr, fit.points);
            }
            eprintln!("max interface defect = {:.3e}", rep.max_interface_defect);
            if let Some(d) = rep.max_interpolated_defect {
                eprintln!("max interpolated interface defect = {d:.3e}");
            }
            write_record(&cfg, common, &rep.record)?;
        }
        Command::Hodge(_) => {
            let rep = run_hodge(&cfg)?;
            let mut wr = csv::Writer::from_writer(output(&cfg)?);
            wr.write_record(["field", "ntheta", "ns", "residual", "c1", "c2", "harmonic_fraction", "orthogonality"])?;
            wr.serialize((
                &rep.field,
                rep.ntheta,
                rep.ns,
                rep.residual,
                rep.coefficients[0],
                rep.coefficients[1],
                rep.harmonic_fraction,
                rep.orthogonality,
            ))?;
            wr.flush()?;
        }
    }
    Ok(())
}
