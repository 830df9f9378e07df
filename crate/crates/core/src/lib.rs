//! High-order Laplace-Beltrami solver on piecewise-smooth, axisymmetric,
//! genus-one surfaces.
//!
//! The surface is generated by revolving an arclength-parameterized curve
//! `(r(s), z(s))` about the z-axis. A Fourier transform in the azimuthal angle
//! decouples `Δ_Γ u = f` into periodic ODEs in `s`, one per mode, each solved
//! as a second-kind integral equation with a Nyström discretization on
//! Gauss-Legendre panels (see [`periodic_ode`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod azimuthal;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod hodge;
pub mod kernels;
pub mod linalg;
pub mod periodic_ode;
pub mod quadrature;
pub mod surface;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{CurvePoint, CurveSpec, GeneratingCurve};
pub use kernels::{Kernel, KernelKind};
pub use periodic_ode::{
    assemble, assemble_with, Coefficient, LayerPotentials, ModeSolution, NystromSystem, PeriodicOdeProblem, SolverKind,
    SolverOptions,
};
pub use quadrature::{build_mesh, dyadic_refine, PanelMesh, RefineSide};

/// Which one-sided limit to take at a point of non-smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    Left,
    #[default]
    Right,
}
