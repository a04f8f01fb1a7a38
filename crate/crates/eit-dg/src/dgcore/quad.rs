//! Gauss-Legendre quadrature rules.
//!
//! All integration in this crate uses the 4-point rule per direction: tensor
//! 4x4 on cells, 4 points on edges. The rule is exact for polynomials up to
//! degree 7, which covers every product of two quadratic basis functions and
//! a linear gradient factor that the assembly produces.

/// 4-point Gauss-Legendre nodes on `[-1, 1]`, ascending.
pub const GAUSS_NODES: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];

/// Weights matching [`GAUSS_NODES`]; they sum to 2.
pub const GAUSS_WEIGHTS: [f64; 4] = [
    0.34785484513745385,
    0.6521451548625461,
    0.6521451548625461,
    0.34785484513745385,
];

/// Number of edge quadrature points.
pub const N_EDGE_QP: usize = 4;

/// Number of cell quadrature points (tensor product).
pub const N_CELL_QP: usize = 16;

/// Reference coordinates of the tensor-product cell rule.
///
/// Index `q = b * 4 + a` pairs node `a` in xi with node `b` in eta.
pub fn cell_points() -> [[f64; 2]; N_CELL_QP] {
    let mut pts = [[0.0; 2]; N_CELL_QP];
    for b in 0..4 {
        for a in 0..4 {
            pts[b * 4 + a] = [GAUSS_NODES[a], GAUSS_NODES[b]];
        }
    }
    pts
}

/// Weights of the tensor-product cell rule; they sum to 4.
pub fn cell_weights() -> [f64; N_CELL_QP] {
    let mut w = [0.0; N_CELL_QP];
    for b in 0..4 {
        for a in 0..4 {
            w[b * 4 + a] = GAUSS_WEIGHTS[a] * GAUSS_WEIGHTS[b];
        }
    }
    w
}
