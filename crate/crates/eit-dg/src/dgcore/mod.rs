//! Piecewise-quadratic DG function spaces: basis, quadrature, functions,
//! boundary traces, and inner products.

pub mod basis;
pub mod function;
pub mod inner;
pub(crate) mod linalg;
pub mod quad;
pub mod space;
pub mod trace;

pub use function::{DgFunction, FluxField};
pub use inner::{boundary_norm, inner_boundary, inner_h1, inner_l2, inner_l2_flux, l2_norm};
pub use space::{same_space, DgSpace};
pub use trace::BoundaryTrace;
