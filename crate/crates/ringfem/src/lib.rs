//! hp finite elements for a singularly perturbed reaction-diffusion
//! transmission problem on an annulus.
//!
//! The model problem lives on the annulus `a < r < c` split by the interface
//! circle `r = b` into an inner ring `Ω₊` and an outer ring `Ω₋`:
//!
//! ```text
//!   -ε² Δu + u = f₊   in Ω₊ (a < r < b)
//!      -Δu + u = f₋   in Ω₋ (b < r < c)
//!            u = 0    on r = a and r = c
//!    u₊ - u₋   = 0    on r = b
//!    ε² ∂u₊/∂ν - ∂u₋/∂ν = h   on r = b,  ν pointing out of Ω₊
//! ```
//!
//! For small ε the solution develops an `e^{-dist/ε}` boundary layer along
//! `r = a` and an interface layer on the inner side of `r = b`; the outer ring
//! stays smooth.  The discretization is a conforming tensor-product space of
//! degree `p` on a layer-adapted annular mesh whose anisotropic *needle*
//! bands (width proportional to `p·ε`) absorb the layers, giving energy-norm
//! convergence that is exponential in `p` and uniform in ε.
//!
//! Module map:
//! - [`geometry`]: annulus data, region tags, boundary-fitted layer frames.
//! - [`quadrature`]: Gauss-Legendre / Gauss-Lobatto rules and the nodal
//!   barycentric Lagrange basis.
//! - [`bessel`]: exponentially scaled modified Bessel functions (the radial
//!   solution basis).
//! - [`problem`]: data cases (constant benchmark, manufactured polynomial)
//!   and coefficient weights.
//! - [`oracle`]: closed-form exact radial solutions and the ε→0 limit.
//! - [`mesh`]: regime-dependent layer meshes with exact polar element maps.
//! - [`space`]: global conforming numbering, Dirichlet elimination, field
//!   evaluation.
//! - [`skyline`]: symmetric profile storage and LDLᵀ factorization.
//! - [`assembly`]: weighted stiffness-mass assembly, interface load, direct
//!   solve with iterative refinement.
//! - [`postproc`]: error norms, the independent 1D norm oracle, and the
//!   exponential-rate fit.
//! - [`expansion`]: leading-order matched-asymptotics composite diagnostic.
//! - [`driver`]: end-to-end pipeline producing sweep records.

pub mod assembly;
pub mod bessel;
pub mod driver;
pub mod expansion;
pub mod geometry;
pub mod mesh;
pub mod oracle;
pub mod postproc;
pub mod problem;
pub mod quadrature;
pub mod skyline;
pub mod space;

/// Library error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid user-supplied configuration (radii, degree, lists, flags).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Mesh parameters that would produce overlapping or inverted bands.
    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),
    /// Loss of positive definiteness during factorization.
    #[error("factorization breakdown at pivot {pivot}: {detail}")]
    Breakdown { pivot: usize, detail: String },
    /// A numerical contract was violated (residual, singular system, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::DegenerateMesh(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub mod prelude {
    pub use crate::assembly::{assemble, solve_spd, SparseSystem};
    pub use crate::bessel::{bessel_scaled, ScaledBessel};
    pub use crate::driver::{solve_case, RunOutput, RunParams};
    pub use crate::expansion::{build_composite, composite_error, CompositeApprox};
    pub use crate::geometry::{AnnularGeometry, Region};
    pub use crate::mesh::{build_mesh, Band, Element, LayerMesh, Regime};
    pub use crate::oracle::{
        limit_solution, manufactured, radial_exact, ExactSolution, LimitSolution, RadialExact,
    };
    pub use crate::postproc::{
        error_norms, exact_energy_norm, field_norms, fit_rate, records_to_csv, records_to_json,
        ErrorNorms, RateFit, SweepRecord,
    };
    pub use crate::problem::{DataCase, TransmissionProblem};
    pub use crate::quadrature::{gauss_legendre, gauss_lobatto, NodalBasis1D, QuadRule};
    pub use crate::skyline::Profile;
    pub use crate::space::{build_space, DiscreteField, FeSpace};
    pub use crate::{Error, Result};
}
