//! Interior penalty discontinuous Galerkin (IP-DG) discretization of the
//! variable-exponent p(x)-Laplacian energy on one-dimensional meshes.
//!
//! The crate is organised bottom-up:
//!
//! - [`quadrature`]: Gauss–Legendre, Gauss–Lobatto, trapezoid and adaptive rules.
//! - [`exponent`]: variable exponents, modulars and Luxemburg norms.
//! - [`mesh`]: 1D partitions, face sizes and boundary tags.
//! - [`broken_space`]: piecewise polynomial functions, jumps and broken seminorms.
//! - [`lifting`]: the element-local lifting of jumps into the gradient.
//! - [`reconstruction`]: the continuous piecewise-linear quasi-interpolant.
//! - [`functional`]: the discrete DG energy, the conforming energy and their gradients.
//! - [`optimizer`]: BFGS / L-BFGS minimisation and the DG and CG solvers.
//! - [`exact`]: the closed-form benchmark solution for the hat-shaped exponent.
//! - [`harness`]: convergence studies, method comparisons, property suites and output.

pub mod basis;
pub mod broken_space;
pub mod dense;
pub mod error;
pub mod exact;
pub mod exponent;
pub mod functional;
pub mod harness;
pub mod lifting;
pub mod mesh;
pub mod optimizer;
pub mod quadrature;
pub mod reconstruction;

pub use broken_space::{BrokenFunction, Continuity, Side};
pub use error::{Error, Result};
pub use exact::ExactSolution;
pub use exponent::{ExponentField, WeightedSampleSet};
pub use functional::{FunctionalSpec, TermBreakdown, VolumeQuadrature};
pub use lifting::LiftingConfig;
pub use mesh::{BoundaryKind, Mesh1D};
pub use optimizer::{BfgsConfig, SolveReport};
