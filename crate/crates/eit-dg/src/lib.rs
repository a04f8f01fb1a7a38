//! Electrical impedance tomography on structured meshes.
//!
//! The crate reconstructs an interior conductivity from boundary
//! current/voltage data. Its pieces, bottom to top:
//!
//! * [`mesh`]: uniform rectangular meshes with deterministic cell/edge
//!   orderings;
//! * [`dgcore`]: the piecewise-quadratic DG space, functions, boundary
//!   traces, and inner products;
//! * [`mdldg`]: a minimal-dissipation local DG discretization of
//!   `div(sigma grad u) = -r` in mixed form, with local elimination of the
//!   flux and a banded Cholesky factorization of the reduced system;
//! * [`dtn`]: the boundary current map `f -> sigma du/dnu`, its first
//!   derivative in `sigma`, and the adjoint of that derivative;
//! * [`inverse`]: Tikhonov-regularized output least squares solved by
//!   Gauss-Newton steps with an inner conjugate-gradient iteration and a
//!   discrepancy-principle stopping rule;
//! * [`experiments`]: phantoms, the four-function boundary measurement suite,
//!   synthetic data generation with multiplicative noise, convergence-order
//!   studies, and reconstruction metrics.
//!
//! With the default `parallel` feature, per-cell and per-measurement loops
//! run on rayon; results are bit-identical to the sequential fallback (see
//! [`par`]).

pub mod dgcore;
pub mod dtn;
pub mod error;
pub mod experiments;
pub mod inverse;
pub mod mdldg;
pub mod mesh;
pub mod par;

pub use dgcore::{BoundaryTrace, DgFunction, DgSpace, FluxField};
pub use error::{Error, Result};
pub use mesh::{build_mesh, classify_edges, Mesh, Rect};
