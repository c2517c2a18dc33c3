//! Galerkin finite elements for two-parameter singularly perturbed
//! convection-diffusion problems on the unit square.
//!
//! The discretization uses tensor-product Q_k Lagrange elements on a
//! Bakhvalov-type graded mesh whose transition points track the layer
//! widths `1/mu0`, `1/mu1` and `sqrt(eps1)`. The crate provides
//!
//! - mesh generation plus width diagnostics ([`mesh`]),
//! - problem data with a built-in manufactured solution ([`problem`]),
//! - the nodal space, interpolation and the corrected interpolant
//!   operators ([`femspace`]),
//! - Gauss quadrature and deterministic assembly ([`quadrature`],
//!   [`assembly`]),
//! - banded LU and ILU(0)-preconditioned GMRES solvers ([`linsolve`]),
//! - error norms, convergence rates and the case pipeline ([`analysis`]),
//! - sweep orchestration with CSV/markdown/JSON reports ([`study`]).

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod femspace;
pub mod linsolve;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod study;

pub use analysis::{
    energy_error, energy_norm, rate, run_case, CaseParams, ErrorNorms, ErrorReport,
};
pub use assembly::{assemble, CsrMatrix, SparseSystem};
pub use error::{Error, Result};
pub use femspace::{FemSpace, GridFunction};
pub use linsolve::{solve, SolveReport, SolverConfig, SolverMethod};
pub use mesh::{
    build_mesh, compute_mu, verify_mesh_lemmas, LemmaReport, MeshParams, MeshWarning, TensorMesh,
};
pub use problem::{builtin, layer_template, test_problem, LayerKind, LayerParams, ProblemSpec};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use study::{emit, run_study, OutputFormat, StudyConfig, StudyResult};
