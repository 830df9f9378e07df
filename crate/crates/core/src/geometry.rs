//! Generating curves of surfaces of revolution.
//!
//! A curve lives in the half plane `(r, z)` with `r > 0` and is parameterized
//! by arclength `s ∈ [0, L)`. Catalog curves are traversed clockwise in the
//! `(r, z)` plane (r to the right, z up), so the outward normal of the
//! enclosed region is `(-dz/ds, dr/ds)`.

use std::f64::consts::PI;

use crate::{Error, Result, Side};

/// Position and derivatives of a generating curve at one arclength value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub r: f64,
    pub z: f64,
    pub dr: f64,
    pub dz: f64,
    pub d2r: f64,
    pub d2z: f64,
}

impl CurvePoint {
    /// Outward unit normal in the `(r, z)` plane.
    pub fn normal(&self) -> (f64, f64) {
        (-self.dz, self.dr)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum SegmentShape {
    Line {
        start: (f64, f64),
        dir: (f64, f64),
    },
    /// Clockwise arc: `center + radius·(cos ψ, sin ψ)` with `ψ = phase - t/radius`.
    Arc {
        center: (f64, f64),
        radius: f64,
        phase: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    s0: f64,
    len: f64,
    shape: SegmentShape,
}

impl Segment {
    fn eval(&self, t: f64) -> CurvePoint {
        match self.shape {
            SegmentShape::Line { start, dir } => {
                CurvePoint { r: start.0 + t * dir.0, z: start.1 + t * dir.1, dr: dir.0, dz: dir.1, d2r: 0.0, d2z: 0.0 }
            }
            SegmentShape::Arc { center, radius, phase } => {
                let psi = phase - t / radius;
                let (sn, cs) = psi.sin_cos();
                CurvePoint {
                    r: center.0 + radius * cs,
                    z: center.1 + radius * sn,
                    dr: sn,
                    dz: -cs,
                    d2r: -cs / radius,
                    d2z: -sn / radius,
                }
            }
        }
    }
}

/// Catalog entries accepted by [`GeneratingCurve::from_catalog`].
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    /// Torus whose generating circle spans radii `inner..outer` at `z = 0`.
    CircularTorus { inner: f64, outer: f64 },
    /// Closed polygon given by its `(r, z)` vertices.
    PolygonToroid { vertices: Vec<(f64, f64)> },
    /// The unit square `(2,0), (1,0), (1,1), (2,1)` revolved about the axis.
    UnitSquareToroid,
}

impl CurveSpec {
    pub fn unit_square_vertices() -> Vec<(f64, f64)> {
        vec![(2.0, 0.0), (1.0, 0.0), (1.0, 1.0), (2.0, 1.0)]
    }
}

/// Arclength-parameterized, closed, piecewise-smooth generating curve.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingCurve {
    segments: Vec<Segment>,
    breakpoints: Vec<f64>,
    length: f64,
}

impl GeneratingCurve {
    pub fn from_catalog(spec: &CurveSpec) -> Result<Self> {
        match spec {
            CurveSpec::CircularTorus { inner, outer } => Self::circular_torus(*inner, *outer),
            CurveSpec::PolygonToroid { vertices } => Self::polygon_toroid(vertices),
            CurveSpec::UnitSquareToroid => Self::polygon_toroid(&CurveSpec::unit_square_vertices()),
        }
    }

    /// Circle of center `((inner+outer)/2, 0)` and radius `(outer-inner)/2`,
    /// starting at the outermost point `(outer, 0)`.
    pub fn circular_torus(inner: f64, outer: f64) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite()) {
            return Err(Error::Parameter("torus radii must be finite".into()));
        }
        if inner <= 0.0 {
            return Err(Error::AxisViolation(format!("inner radius {inner} must be positive")));
        }
        if outer <= inner {
            return Err(Error::Parameter(format!("outer radius {outer} must exceed inner radius {inner}")));
        }
        let radius = 0.5 * (outer - inner);
        let center = (0.5 * (outer + inner), 0.0);
        let length = 2.0 * PI * radius;
        Ok(Self {
            segments: vec![Segment { s0: 0.0, len: length, shape: SegmentShape::Arc { center, radius, phase: 0.0 } }],
            breakpoints: Vec::new(),
            length,
        })
    }

    /// Piecewise-linear closed loop through `vertices`, starting at the first
    /// vertex. Counter-clockwise input is reversed (keeping the first vertex) so
    /// that the outward normal convention holds.
    pub fn polygon_toroid(vertices: &[(f64, f64)]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry("a polygon needs at least three vertices".into()));
        }
        if let Some(v) = vertices.iter().find(|v| !(v.0.is_finite() && v.1.is_finite())) {
            return Err(Error::Parameter(format!("non-finite vertex {v:?}")));
        }
        if let Some(v) = vertices.iter().find(|v| v.0 <= 0.0) {
            return Err(Error::AxisViolation(format!("vertex {v:?} has r <= 0")));
        }
        let mut verts = vertices.to_vec();
        if signed_area(&verts) > 0.0 {
            verts[1..].reverse();
        }
        let n = verts.len();
        for i in 0..n {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            if (b.0 - a.0).hypot(b.1 - a.1) == 0.0 {
                return Err(Error::Geometry(format!("repeated vertex {a:?}")));
            }
        }
        if polygon_self_intersects(&verts) {
            return Err(Error::Geometry("polygon is self-intersecting".into()));
        }

        let mut segments = Vec::with_capacity(n);
        let mut breakpoints = Vec::with_capacity(n);
        let mut s = 0.0;
        for i in 0..n {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            breakpoints.push(s);
            segments.push(Segment {
                s0: s,
                len,
                shape: SegmentShape::Line { start: a, dir: ((b.0 - a.0) / len, (b.1 - a.1) / len) },
            });
            s += len;
        }
        Ok(Self { segments, breakpoints, length: s })
    }

    /// Total arclength `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Arclength positions of the edges, sorted, in `[0, L)`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_closed(&self) -> bool {
        true
    }

    /// Maps any `s` into `[0, L)`.
    pub fn wrap(&self, s: f64) -> f64 {
        let w = s.rem_euclid(self.length);
        if w >= self.length {
            0.0
        } else {
            w
        }
    }

    /// True when `s` (mod L) is within `1e-12·L` of an edge.
    pub fn is_breakpoint(&self, s: f64) -> bool {
        let w = self.wrap(s);
        let tol = 1e-12 * self.length;
        self.breakpoints.iter().any(|&b| (w - b).abs() <= tol || (w - b - self.length).abs() <= tol)
    }

    /// Evaluates the curve. At an edge `side` picks the one-sided limit; away
    /// from edges it is irrelevant.
    pub fn eval_point(&self, s: f64, side: Side) -> CurvePoint {
        let w = self.wrap(s);
        let (idx, t) = self.locate(w, side);
        self.segments[idx].eval(t)
    }

    /// Shorthand for [`eval_point`](Self::eval_point) from the right.
    pub fn point(&self, s: f64) -> CurvePoint {
        self.eval_point(s, Side::Right)
    }

    fn locate(&self, w: f64, side: Side) -> (usize, f64) {
        let last = self.segments.len() - 1;
        let idx = match side {
            Side::Right => self.segments.partition_point(|seg| seg.s0 <= w).saturating_sub(1),
            Side::Left => {
                if w == 0.0 {
                    return (last, self.segments[last].len);
                }
                self.segments.partition_point(|seg| seg.s0 < w).saturating_sub(1)
            }
        };
        let seg = &self.segments[idx];
        (idx, (w - seg.s0).clamp(0.0, seg.len))
    }

    /// Mean curvature `(κ_profile + κ_azimuthal)/2` with respect to the outward
    /// normal; positive on convex surfaces (a sphere of radius `a` has `1/a`).
    pub fn mean_curvature(&self, s: f64) -> Result<f64> {
        let (kp, ka) = self.principal_curvatures(s)?;
        Ok(0.5 * (kp + ka))
    }

    /// `(κ_profile, κ_azimuthal)` at a smooth point.
    pub fn principal_curvatures(&self, s: f64) -> Result<(f64, f64)> {
        if self.is_breakpoint(s) {
            return Err(Error::NonSmoothPoint(s));
        }
        let p = self.point(s);
        let profile = p.d2r * p.dz - p.dr * p.d2z;
        let azimuthal = -p.dz / p.r;
        Ok((profile, azimuthal))
    }

    /// Smallest radius over the curve.
    pub fn min_radius(&self) -> f64 {
        self.segments
            .iter()
            .map(|seg| match seg.shape {
                SegmentShape::Line { start, dir } => start.0.min(start.0 + seg.len * dir.0),
                SegmentShape::Arc { center, radius, .. } => center.0 - radius,
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Surface area `2π ∫ r ds`, evaluated exactly per segment.
    pub fn surface_area(&self) -> f64 {
        let integral: f64 = self
            .segments
            .iter()
            .map(|seg| match seg.shape {
                SegmentShape::Line { start, dir } => seg.len * (start.0 + 0.5 * seg.len * dir.0),
                SegmentShape::Arc { center, radius, phase } => {
                    // ∫ (c + R cos(φ - t/R)) dt over [0, len]
                    center.0 * seg.len + radius * radius * (phase.sin() - (phase - seg.len / radius).sin())
                }
            })
            .sum();
        2.0 * PI * integral
    }
}

fn signed_area(v: &[(f64, f64)]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
}

fn polygon_self_intersects(v: &[(f64, f64)]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

fn segments_intersect(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
        (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
    }
    fn on_segment(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
        c.0 >= a.0.min(b.0) && c.0 <= a.0.max(b.0) && c.1 >= a.1.min(b.1) && c.1 <= a.1.max(b.1)
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> GeneratingCurve {
        GeneratingCurve::from_catalog(&CurveSpec::UnitSquareToroid).unwrap()
    }

    #[test]
    fn torus_circle_center_and_length() {
        let c = GeneratingCurve::circular_torus(1.0, 2.0).unwrap();
        assert!((c.length() - PI).abs() < 1e-15);
        let p = c.point(0.0);
        assert_eq!((p.r, p.z, p.dr), (2.0, 0.0, 0.0));
        let q = c.point(0.5 * PI);
        assert!((q.r - 1.0).abs() < 1e-15 && q.z.abs() < 1e-15);
        // the circle is centered at (1.5, 0) with radius 0.5
        for i in 0..20 {
            let p = c.point(i as f64 * 0.157);
            assert!(((p.r - 1.5).hypot(p.z) - 0.5).abs() < 1e-15);
        }
        assert!((c.min_radius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_toroid_layout() {
        let c = square();
        assert_eq!(c.length(), 4.0);
        assert_eq!(c.breakpoints(), &[0.0, 1.0, 2.0, 3.0]);
        let top_inner = c.eval_point(2.0, Side::Right);
        assert_eq!((top_inner.r, top_inner.z), (1.0, 1.0));
        let mid = c.point(0.5);
        assert_eq!((mid.r, mid.z, mid.dr, mid.dz), (1.5, 0.0, -1.0, 0.0));
        let left = c.eval_point(2.0, Side::Left);
        assert_eq!((left.dr, left.dz), (0.0, 1.0));
        let right = c.eval_point(2.0, Side::Right);
        assert_eq!((right.dr, right.dz), (1.0, 0.0));
        // left limit at s = 0 is the end of the closing edge
        let wrap = c.eval_point(0.0, Side::Left);
        assert_eq!((wrap.r, wrap.z, wrap.dr, wrap.dz), (2.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn counter_clockwise_polygon_is_reoriented() {
        let ccw = vec![(2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
        assert_eq!(GeneratingCurve::polygon_toroid(&ccw).unwrap(), square());
    }

    #[test]
    fn axis_and_geometry_errors() {
        let bad = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)];
        assert!(matches!(GeneratingCurve::polygon_toroid(&bad), Err(Error::AxisViolation(_))));
        assert!(matches!(GeneratingCurve::circular_torus(0.0, 1.0), Err(Error::AxisViolation(_))));
        assert!(matches!(GeneratingCurve::circular_torus(2.0, 1.0), Err(Error::Parameter(_))));
        let bowtie = vec![(1.0, 0.0), (2.0, 1.0), (2.0, 0.0), (1.0, 1.0)];
        assert!(matches!(GeneratingCurve::polygon_toroid(&bowtie), Err(Error::Geometry(_))));
    }

    #[test]
    fn curvatures() {
        let c = GeneratingCurve::circular_torus(1.0, 2.0).unwrap();
        for i in 0..10 {
            let (kp, _) = c.principal_curvatures(0.1 + 0.3 * i as f64).unwrap();
            assert!((kp - 2.0).abs() < 1e-13);
        }
        // outermost point: both curvatures positive, azimuthal = 1/2
        let (kp, ka) = c.principal_curvatures(1e-3).unwrap();
        assert!((kp - 2.0).abs() < 1e-13 && (ka - 0.5).abs() < 1e-6);

        let sq = square();
        assert_eq!(sq.mean_curvature(0.5).unwrap(), 0.0);
        assert!(matches!(sq.mean_curvature(2.0), Err(Error::NonSmoothPoint(_))));
        // inner cylinder face r = 1, normal points toward the axis
        assert!((sq.mean_curvature(1.5).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn surface_area_matches_pappus() {
        let c = GeneratingCurve::circular_torus(1.0, 2.0).unwrap();
        assert!((c.surface_area() - 2.0 * PI * 1.5 * PI).abs() < 1e-12);
        // square: faces at r∈[1,2] bottom/top, r=1 and r=2 sides
        let expected = 2.0 * PI * (1.5 + 1.0 + 1.5 + 2.0);
        assert!((square().surface_area() - expected).abs() < 1e-12);
    }
}
