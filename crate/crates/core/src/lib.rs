//! Numerical machinery for the Segal–Bargmann transform on noncompact
//! symmetric spaces of the complex type.
//!
//! Everything here is pure computation over `f64` and runs without `std`
//! (an allocator is required). File formats, configuration and the command
//! line live in the companion `sbtube-cli` crate.
//!
//! Layout:
//!
//! * [`rootgeom`]: root systems, Weyl groups, Jacobians, polar densities and
//!   crown-domain membership.
//! * [`specialfn`]: continued spherical functions, heat kernels, Gaussian
//!   ball integrals and sphere moments.
//! * [`h3xform`]: the radial spherical transform on hyperbolic 3-space,
//!   Plancherel norms, heat evolution, holomorphic extension and orbital
//!   integrals.
//! * [`sbisometry`]: the tube integral `G_F(R)` by five routes, inversion,
//!   surjectivity and the no-invariant-density table.
//! * [`kosbridge`]: the shift-operator formulation and its equivalence with
//!   the tube isometry.
//! * [`euclid`]: brute-force one-dimensional Euclidean baseline.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod euclid;
pub mod h3xform;
pub mod kosbridge;
pub mod math;
pub mod quad;
pub mod rootgeom;
pub mod sbisometry;
pub mod selftest;
pub mod specialfn;

pub use error::{Error, Result};
pub use h3xform::{PlancherelMeasure, RadialFunction, SpectralProfile};
pub use quad::QuadratureSpec;
pub use rootgeom::{RootSystem, Vec2, WeylGroup};
pub use sbisometry::{Route, TubeCurve};
pub use specialfn::{HeatParams, SphericalEvalConfig};
