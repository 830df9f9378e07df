//! Panel discretizations of `[0, L]`: Gauss-Legendre rules, meshes, dyadic
//! refinement, barycentric interpolation and the split rule used for the
//! near-field integrals.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Largest supported number of nodes per panel.
pub const MAX_ORDER: usize = 64;

/// Default number of nodes per panel.
pub const DEFAULT_ORDER: usize = 16;

/// Gauss-Legendre nodes (increasing) and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped affinely to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(mid + half * t)).sum::<f64>()
    }
}

/// Legendre polynomial `P_k(x)` and its derivative.
fn legendre(k: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `k`-point Gauss-Legendre rule on `[-1, 1]`, `1 <= k <= 64`.
pub fn gauss_legendre(k: usize) -> Result<GaussLegendre> {
    if k == 0 || k > MAX_ORDER {
        return Err(Error::Parameter(format!("Gauss-Legendre order {k} outside 1..={MAX_ORDER}")));
    }
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        // Newton from the Tricomi-type initial guess, largest root first
        let mut x = (PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(k, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(k, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k - 1 - i] = x;
        nodes[i] = -x;
        weights[k - 1 - i] = w;
        weights[i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    Ok(GaussLegendre { nodes, weights })
}

/// One interval of a mesh; `level` counts the bisections that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub level: u32,
}

impl Panel {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-14 * self.width().max(1.0);
        x >= self.a - tol && x <= self.b + tol
    }
}

/// Which neighbours of a refinement target are bisected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RefineSide {
    #[default]
    Both,
    Left,
    Right,
}

/// Partition of `[0, L]` into panels carrying a `k`-point Gauss-Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelMesh {
    panels: Vec<Panel>,
    rule: GaussLegendre,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    length: f64,
}

impl PanelMesh {
    /// Builds a mesh directly from panel boundaries `0 = b_0 < ... < b_M = L`.
    pub fn from_boundaries(boundaries: &[f64], order: usize) -> Result<Self> {
        let panels = boundaries.windows(2).map(|w| Panel { a: w[0], b: w[1], level: 0 }).collect();
        Self::from_panels(panels, order)
    }

    fn from_panels(panels: Vec<Panel>, order: usize) -> Result<Self> {
        if panels.is_empty() {
            return Err(Error::Parameter("mesh needs at least one panel".into()));
        }
        if panels[0].a != 0.0 {
            return Err(Error::Parameter("mesh must start at 0".into()));
        }
        for w in panels.windows(2) {
            if w[0].b != w[1].a {
                return Err(Error::Parameter("panels must tile the interval".into()));
            }
        }
        if let Some(p) = panels.iter().find(|p| !(p.b > p.a)) {
            return Err(Error::Parameter(format!("empty panel [{}, {}]", p.a, p.b)));
        }
        let rule = gauss_legendre(order)?;
        let mut nodes = Vec::with_capacity(panels.len() * order);
        let mut weights = Vec::with_capacity(panels.len() * order);
        for p in &panels {
            let (x, w) = rule.mapped(p.a, p.b);
            nodes.extend(x);
            weights.extend(w);
        }
        let length = panels.last().map(|p| p.b).unwrap_or(0.0);
        Ok(Self { panels, rule, nodes, weights, length })
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn num_panels(&self) -> usize {
        self.panels.len()
    }

    /// Nodes per panel.
    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Total number of nodes, `N_s`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// All nodes, panel by panel.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panel_nodes(&self, i: usize) -> &[f64] {
        let k = self.order();
        &self.nodes[i * k..(i + 1) * k]
    }

    /// Panel boundaries `b_0, ..., b_M`.
    pub fn boundaries(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.panels.iter().map(|p| p.b)).collect()
    }

    /// Smallest panel width (`h_final` after refinement).
    pub fn min_width(&self) -> f64 {
        self.panels.iter().map(Panel::width).fold(f64::INFINITY, f64::min)
    }

    /// Index of a boundary equal to `x` (within `1e-12·L`), if any.
    pub fn boundary_index(&self, x: f64) -> Option<usize> {
        let tol = 1e-12 * self.length;
        self.boundaries().iter().position(|b| (b - x).abs() <= tol)
    }

    pub fn has_boundary(&self, x: f64) -> bool {
        let w = x.rem_euclid(self.length);
        self.boundary_index(w).is_some() || (w - self.length).abs() <= 1e-12 * self.length
    }

    /// Panel containing `x ∈ [0, L]`; boundaries belong to the panel on their right
    /// (the last panel owns `L`).
    pub fn panel_of(&self, x: f64) -> usize {
        let idx = self.panels.partition_point(|p| p.a <= x);
        idx.saturating_sub(1).min(self.panels.len() - 1)
    }

    /// Uniform panels on each segment between consecutive breakpoints.
    pub fn uniform(length: f64, panels_per_segment: usize, breakpoints: &[f64], order: usize) -> Result<Self> {
        build_mesh(length, panels_per_segment, breakpoints, order)
    }
}

/// Divides each segment between breakpoints into `panels_per_segment` equal
/// panels. Breakpoints must lie in `[0, L)`; `0` is always a boundary.
pub fn build_mesh(length: f64, panels_per_segment: usize, breakpoints: &[f64], order: usize) -> Result<PanelMesh> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::Parameter(format!("domain length {length} must be positive")));
    }
    if panels_per_segment == 0 {
        return Err(Error::Parameter("panels_per_segment must be at least 1".into()));
    }
    if let Some(b) = breakpoints.iter().find(|&&b| !(0.0..length).contains(&b)) {
        return Err(Error::Parameter(format!("breakpoint {b} outside [0, {length})")));
    }
    let mut cuts: Vec<f64> = breakpoints.to_vec();
    cuts.push(0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(length);

    let mut boundaries = vec![0.0];
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / panels_per_segment as f64;
        for j in 1..panels_per_segment {
            boundaries.push(a + j as f64 * h);
        }
        boundaries.push(b);
    }
    PanelMesh::from_boundaries(&boundaries, order)
}

/// Bisects the panels touching each target `depth` times, always splitting the
/// half adjacent to the target. Targets must be panel boundaries (`0 ≡ L`).
pub fn dyadic_refine(mesh: &PanelMesh, targets: &[f64], depth: u32, side: RefineSide) -> Result<PanelMesh> {
    let length = mesh.length();
    let mut panels = mesh.panels().to_vec();
    for &t in targets {
        let w = t.rem_euclid(length);
        let at_end = (w - length).abs() <= 1e-12 * length;
        let target = if at_end { 0.0 } else { w };
        if !mesh.has_boundary(target) {
            return Err(Error::Refinement(t));
        }
        let tol = 1e-12 * length;
        let periodic = target.abs() <= tol;
        for _ in 0..depth {
            if matches!(side, RefineSide::Both | RefineSide::Left) {
                // panel ending at the target
                let idx = if periodic {
                    Some(panels.len() - 1)
                } else {
                    panels.iter().position(|p| (p.b - target).abs() <= tol)
                };
                if let Some(i) = idx {
                    let p = panels[i];
                    let m = 0.5 * (p.a + p.b);
                    panels[i] = Panel { a: p.a, b: m, level: p.level + 1 };
                    panels.insert(i + 1, Panel { a: m, b: p.b, level: p.level + 1 });
                }
            }
            if matches!(side, RefineSide::Both | RefineSide::Right) {
                let idx = panels.iter().position(|p| (p.a - target).abs() <= tol);
                if let Some(i) = idx {
                    let p = panels[i];
                    let m = 0.5 * (p.a + p.b);
                    panels[i] = Panel { a: p.a, b: m, level: p.level + 1 };
                    panels.insert(i + 1, Panel { a: m, b: p.b, level: p.level + 1 });
                }
            }
        }
    }
    PanelMesh::from_panels(panels, mesh.order())
}

/// Barycentric weights for distinct nodes.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    // scale by the node spread to keep the products O(1)
    let spread =
        nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = if spread > 0.0 { 4.0 / spread } else { 1.0 };
    (0..n)
        .map(|j| {
            let prod: f64 = (0..n).filter(|&m| m != j).map(|m| scale * (nodes[j] - nodes[m])).product();
            1.0 / prod
        })
        .collect()
}

/// Values of the Lagrange basis `ℓ_m(x)` for all `m`.
pub fn lagrange_basis(nodes: &[f64], bary: &[f64], x: f64, out: &mut [f64]) {
    if let Some(j) = nodes.iter().position(|&t| t == x) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[j] = 1.0;
        return;
    }
    let mut denom = 0.0;
    for ((o, &t), &b) in out.iter_mut().zip(nodes).zip(bary) {
        *o = b / (x - t);
        denom += *o;
    }
    out.iter_mut().for_each(|v| *v /= denom);
}

/// Row-major `targets.len() × nodes.len()` matrix of Lagrange basis values.
pub fn interp_matrix(nodes: &[f64], targets: &[f64]) -> Vec<f64> {
    let k = nodes.len();
    let bary = barycentric_weights(nodes);
    let mut out = vec![0.0; targets.len() * k];
    for (row, &x) in out.chunks_mut(k).zip(targets) {
        lagrange_basis(nodes, &bary, x, row);
    }
    out
}

/// Interpolates nodal `values` at `x`, refusing points outside `panel`.
pub fn lagrange_interp(panel: (f64, f64), nodes: &[f64], values: &[f64], x: f64) -> Result<f64> {
    let (a, b) = panel;
    let tol = 1e-14 * (b - a).abs().max(1.0);
    if !(x >= a - tol && x <= b + tol) {
        return Err(Error::Extrapolation { x, a, b });
    }
    if nodes.len() != values.len() || nodes.is_empty() {
        return Err(Error::Parameter("nodes and values must have equal, non-zero length".into()));
    }
    let bary = barycentric_weights(nodes);
    let mut basis = vec![0.0; nodes.len()];
    lagrange_basis(nodes, &bary, x, &mut basis);
    Ok(basis.iter().zip(values).map(|(l, v)| l * v).sum())
}

/// Row-major differentiation matrix `D[i][j] = ℓ_j'(x_i)` for distinct nodes.
pub fn diff_matrix(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let bary = barycentric_weights(nodes);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Applies a reference derivative matrix (for nodes on `[-1, 1]`) panel by
/// panel to nodal `values` on `mesh`. Pass `None` for the mesh's own rule.
pub fn differentiate_panels(mesh: &PanelMesh, reference: Option<&[f64]>, values: &[f64]) -> Vec<f64> {
    let k = mesh.order();
    let own;
    let d = match reference {
        Some(d) => d,
        None => {
            own = diff_matrix(&mesh.rule().nodes);
            &own
        }
    };
    let mut out = vec![0.0; values.len()];
    for (p, panel) in mesh.panels().iter().enumerate() {
        let scale = 2.0 / panel.width();
        let v = &values[p * k..(p + 1) * k];
        for (i, o) in out[p * k..(p + 1) * k].iter_mut().enumerate() {
            *o = scale * d[i * k..(i + 1) * k].iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    out
}

/// Two Gauss-Legendre rules covering `[a, x]` and `[x, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRule {
    pub left_nodes: Vec<f64>,
    pub left_weights: Vec<f64>,
    pub right_nodes: Vec<f64>,
    pub right_weights: Vec<f64>,
}

impl SplitRule {
    /// Integrates `f` over the whole panel, `f` smooth on each side of `x`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.left_nodes
            .iter()
            .zip(&self.left_weights)
            .chain(self.right_nodes.iter().zip(&self.right_weights))
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.left_nodes.iter().chain(&self.right_nodes).copied()
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.left_weights.iter().chain(&self.right_weights).copied()
    }
}

/// Splits `[a, b]` at an interior point using copies of `rule`.
pub fn split_rule(panel: (f64, f64), x: f64, rule: &GaussLegendre) -> Result<SplitRule> {
    let (a, b) = panel;
    if !(x > a && x < b) {
        return Err(Error::DegenerateSplit { x, a, b });
    }
    let (left_nodes, left_weights) = rule.mapped(a, x);
    let (right_nodes, right_weights) = rule.mapped(x, b);
    Ok(SplitRule { left_nodes, left_weights, right_nodes, right_weights })
}
