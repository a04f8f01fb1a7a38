//! Minimal-dissipation local DG discretization of scalar elliptic problems
//! in mixed form, reduced to a banded SPD system for the scalar unknown.

pub mod band;
pub mod operators;
pub mod system;

pub use band::{BandCholesky, BandMatrix};
pub use operators::LdgOperators;
pub use system::{assemble, assemble_with, boundary_flux, EllipticProblem, LdgSolution, LdgSystem};

/// Default upwinding vector. Any fixed nonzero vector works; (1, 1) has a
/// nonzero component against every edge normal of a tensor mesh, so no edge
/// is ambiguous.
pub const DEFAULT_FLOW: [f64; 2] = [1.0, 1.0];

/// Default prefactor of the `1/|e|` boundary stabilization.
pub const DEFAULT_STAB_SCALE: f64 = 1.0;
