//! Experiment configuration: a sectioned `key = value` file (TOML syntax).
//!
//! ```text
//! [geometry]
//! curve = "circular-torus"      # or "unit-square-toroid", "polygon-toroid"
//! inner = 1.0
//! outer = 2.0
//! vertices = [[2.0, 0.0], ...]  # polygon-toroid only
//!
//! [discretization]
//! order = 16
//! panels = [8, 16, 32]          # panels per smooth segment, swept
//! ntheta = [64]                 # swept
//! refine_targets = [2.0]
//! refine_depths = [0, 1, 2]     # swept
//! refine_side = "both"          # "left", "right"
//! reference_offset = 4          # self-convergence reference depth = depth + offset
//!
//! [rhs]
//! kind = "newtonian"            # power-singular, smooth-cosine, manufactured-cosine,
//!                               # ode-smooth, basis-1, basis-2, paper-test, gradient-of
//! center = [0.0, 0.5, 0.5]
//! alpha = -0.5
//! s0 = 2.0
//! m = 3
//! k = 2
//!
//! [solver]
//! kernel = "poisson"
//! kind = "gmres"
//! tol = 1e-14
//! max_iter = 1000
//! mean_policy = "reject"        # or "project"
//! sequential = false
//!
//! [output]
//! path = "out.csv"
//! ```
//!
//! Every section and key is optional; unknown keys are an error.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use revlb::surface::{LbOptions, MeanPolicy};
use revlb::{CurveSpec, Execution, KernelKind, RefineSide, SolverKind, SolverOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub discretization: DiscretizationConfig,
    pub rhs: RhsConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub curve: String,
    pub inner: f64,
    pub outer: f64,
    pub vertices: Vec<[f64; 2]>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { curve: "circular-torus".into(), inner: 1.0, outer: 2.0, vertices: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscretizationConfig {
    pub order: usize,
    pub panels: Vec<usize>,
    pub ntheta: Vec<usize>,
    pub refine_targets: Vec<f64>,
    pub refine_depths: Vec<u32>,
    pub refine_side: String,
    pub reference_offset: u32,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        Self {
            order: 16,
            panels: vec![8],
            ntheta: vec![64],
            refine_targets: Vec::new(),
            refine_depths: vec![0],
            refine_side: "both".into(),
            reference_offset: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RhsConfig {
    pub kind: String,
    pub center: [f64; 3],
    pub alpha: f64,
    pub s0: f64,
    pub m: u32,
    pub k: u32,
}

impl Default for RhsConfig {
    fn default() -> Self {
        Self { kind: "newtonian".into(), center: [0.0, 0.5, 0.5], alpha: -0.5, s0: 2.0, m: 3, k: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub kernel: String,
    pub kind: String,
    pub tol: f64,
    pub max_iter: usize,
    pub mean_policy: String,
    pub sequential: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kernel: "poisson".into(),
            kind: "gmres".into(),
            tol: 1e-14,
            max_iter: 1000,
            mean_policy: "reject".into(),
            sequential: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
}

/// Right-hand side families understood by the drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsKind {
    Newtonian,
    PowerSingular,
    SmoothCosine,
    ManufacturedCosine,
    OdeSmooth,
    Basis1,
    Basis2,
    PaperTest,
    GradientOf,
}

impl FromStr for RhsKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "newtonian" => Self::Newtonian,
            "power-singular" => Self::PowerSingular,
            "smooth-cosine" => Self::SmoothCosine,
            "manufactured-cosine" => Self::ManufacturedCosine,
            "ode-smooth" => Self::OdeSmooth,
            "basis-1" => Self::Basis1,
            "basis-2" => Self::Basis2,
            "paper-test" => Self::PaperTest,
            "gradient-of" => Self::GradientOf,
            other => bail!("unknown rhs kind '{other}'"),
        })
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("malformed configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Checks every enumerated string and numeric range.
    pub fn validate(&self) -> Result<()> {
        self.curve_spec()?;
        self.rhs_kind()?;
        self.lb_options()?;
        self.refine_side()?;
        let d = &self.discretization;
        if d.order < 2 || d.order > revlb::quadrature::MAX_ORDER {
            bail!("order {} out of range", d.order);
        }
        if d.panels.is_empty() || d.panels.contains(&0) {
            bail!("panels must be a non-empty list of positive counts");
        }
        if d.ntheta.is_empty() || d.ntheta.iter().any(|&n| n < 2 || n % 2 != 0) {
            bail!("ntheta entries must be even and at least 2");
        }
        if d.refine_depths.is_empty() {
            bail!("refine_depths must not be empty");
        }
        if !(self.rhs.alpha > -1.0) {
            bail!("alpha must exceed -1");
        }
        Ok(())
    }

    pub fn curve_spec(&self) -> Result<CurveSpec> {
        let g = &self.geometry;
        Ok(match g.curve.as_str() {
            "circular-torus" => CurveSpec::CircularTorus { inner: g.inner, outer: g.outer },
            "unit-square-toroid" => CurveSpec::UnitSquareToroid,
            "polygon-toroid" => {
                CurveSpec::PolygonToroid { vertices: g.vertices.iter().map(|v| (v[0], v[1])).collect() }
            }
            other => bail!("unknown curve '{other}'"),
        })
    }

    pub fn rhs_kind(&self) -> Result<RhsKind> {
        self.rhs.kind.parse()
    }

    pub fn refine_side(&self) -> Result<RefineSide> {
        Ok(match self.discretization.refine_side.as_str() {
            "both" => RefineSide::Both,
            "left" => RefineSide::Left,
            "right" => RefineSide::Right,
            other => bail!("unknown refine side '{other}'"),
        })
    }

    pub fn solver_options(&self) -> Result<SolverOptions> {
        let s = &self.solver;
        if !(s.tol > 0.0) || s.max_iter == 0 {
            bail!("solver tolerance and iteration limit must be positive");
        }
        let kind: SolverKind = s.kind.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
        let exec = if s.sequential { Execution::Sequential } else { Execution::Parallel };
        Ok(SolverOptions { kind, tol: s.tol, max_iter: s.max_iter, exec, ..SolverOptions::default() })
    }

    pub fn kernel(&self) -> Result<KernelKind> {
        self.solver.kernel.parse().map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn lb_options(&self) -> Result<LbOptions> {
        let mean_policy = match self.solver.mean_policy.as_str() {
            "reject" => MeanPolicy::Reject,
            "project" => MeanPolicy::Project,
            other => bail!("unknown mean policy '{other}'"),
        };
        Ok(LbOptions { solver: self.solver_options()?, kernel: self.kernel()?, mean_policy, ..LbOptions::default() })
    }

    /// Torus convergence sweep with the Newtonian manufactured solution.
    pub fn torus() -> Self {
        let mut c = Self::default();
        c.discretization.panels = vec![2, 4, 8, 16, 32];
        c.discretization.ntheta = vec![4, 16, 32, 64];
        // aliasing leaves f with a small discrete mean at coarse N_θ
        c.solver.mean_policy = "project".into();
        c
    }

    /// Square-toroid singular sweep for exponent `alpha`.
    pub fn square_toroid(alpha: f64) -> Self {
        let mut c = Self::default();
        c.geometry.curve = "unit-square-toroid".into();
        c.discretization.panels = vec![1];
        c.discretization.ntheta = vec![8];
        c.discretization.refine_targets = vec![2.0];
        c.discretization.refine_depths = (1..=8).collect();
        c.rhs = RhsConfig { kind: "power-singular".into(), alpha, s0: 2.0, m: 3, ..RhsConfig::default() };
        c
    }

    /// Smooth ODE comparison on `[0, 2π]`.
    pub fn ode() -> Self {
        let mut c = Self::default();
        c.discretization.panels = vec![2, 4, 8, 16, 32];
        c.rhs.kind = "ode-smooth".into();
        c
    }

    /// Hodge decomposition of the paper test field on the square toroid.
    pub fn hodge() -> Self {
        let mut c = Self::default();
        c.geometry.curve = "unit-square-toroid".into();
        c.discretization.panels = vec![2];
        c.discretization.ntheta = vec![16];
        c.rhs.kind = "paper-test".into();
        c
    }
}
