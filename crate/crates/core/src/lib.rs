//! Regularized boundary-integral operators for the 3-D Helmholtz equation.
//!
//! The library builds error-function mollifications of the four Calderón
//! operators (single layer `S`, double layer `K`, its adjoint `Kt`, and the
//! hypersingular operator `T = H + W`), discretizes them with a Nyström
//! method on curved triangular surface meshes, and provides drivers for
//! convergence studies and sound-soft / sound-hard scattering solves.
//!
//! Module layout, bottom to top:
//!
//! * [`special`] — erf/erfc, Dawson function, spherical Bessel/Hankel
//!   functions, complex spherical harmonics.
//! * [`quad1d`] — adaptive 1-D Gauss–Kronrod quadrature (oracle workhorse).
//! * [`moments`] — the radial moment families `C_j`, `S_j`, `C̃_j`, `S̃_j`
//!   by recurrence, small-argument series, and independent quadrature.
//! * [`regularizer`] — per-operator moment systems and the mollifier
//!   `σ_p(t)` with stable near-zero evaluation.
//! * [`geometry`] — analytic surfaces (sphere, torus, bean) and curved
//!   triangular meshes with exact charts.
//! * [`quadrature`] — symmetric reference-triangle rules and the composite
//!   surface rule.
//! * [`operators`] — regularized kernel evaluation and dense/streaming
//!   Nyström application.
//! * [`solvers`] — SVD pseudoinverse and non-restarted complex GMRES.
//! * [`sphere`] — closed-form sphere eigenvalues and error metrics.
//! * [`scattering`] — combined-field equations, boundary data, far fields.
//! * [`experiments`] — sweep drivers, slope fits, CSV/SVG output.

pub mod experiments;
pub mod geometry;
pub mod moments;
pub mod operators;
pub mod quad1d;
pub mod quadrature;
pub mod regularizer;
pub mod scattering;
pub mod solvers;
pub mod special;
pub mod sphere;

pub use geometry::{Surface, SurfaceMesh};
pub use moments::MomentTable;
pub use operators::{KernelContext, OperatorMatrix};
pub use quadrature::{CompositeQuadrature, ReferenceRule};
pub use regularizer::{OperatorKind, RegularizerSpec};
pub use sphere::HarmonicDensity;

use num_complex::Complex64;

/// Complex scalar used throughout the Nyström path.
pub type C64 = Complex64;

/// Errors surfaced by the numerical layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("adaptive quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("moment system residual too large: {0}")]
    ResidualTooLarge(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator contexts disagree: {0}")]
    ContextMismatch(String),
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
