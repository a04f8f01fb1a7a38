//! The fixed suite of boundary voltage patterns driving every study.

use std::sync::Arc;

use crate::dgcore::{BoundaryTrace, DgSpace};

/// Number of voltage patterns in the suite.
pub const N_MEASUREMENTS: usize = 4;

/// Pointwise value of pattern `j` (0-based) at a boundary point.
pub fn pattern(j: usize, x: f64, y: f64) -> f64 {
    let s = x + y;
    match j {
        0 => s.sin(),
        1 => s.cos(),
        2 => (2.0 * s).sin(),
        3 => (2.0 * s).cos(),
        _ => panic!("pattern index {j} out of range"),
    }
}

/// The four linearly independent sine/cosine voltage patterns sampled at the
/// boundary quadrature points of `space`.
pub fn measurement_suite(space: &Arc<DgSpace>) -> Vec<BoundaryTrace> {
    (0..N_MEASUREMENTS)
        .map(|j| BoundaryTrace::from_fn(space, |x, y| pattern(j, x, y)))
        .collect()
}
