//! Newtonian-restriction solve on the torus with inner radius 1, outer radius 2.
use std::sync::Arc;

use revlb::surface::{relative_l2_error, restrict_newtonian, solve_lb, LbOptions, SurfaceDiscretization};
use revlb::{build_mesh, CurveSpec, GeneratingCurve};

fn main() -> revlb::Result<()> {
    let curve = Arc::new(GeneratingCurve::from_catalog(&CurveSpec::CircularTorus { inner: 1.0, outer: 2.0 })?);
    let mesh = Arc::new(build_mesh(curve.length(), 32, curve.breakpoints(), 16)?);
    let disc = SurfaceDiscretization::new(curve, mesh, 64)?;
    let (exact, f) = restrict_newtonian(&disc, [0.0, 0.5, 0.5])?;
    let sol = solve_lb(&f, &LbOptions::default())?;
    println!("relative L2 error {:e}", relative_l2_error(sol.field(), &exact)?);
    Ok(())
}
