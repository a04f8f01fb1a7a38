//! Quadratic monomial basis on the reference cell `[-1, 1]^2`.
//!
//! The six shape functions are `{1, xi, eta, xi^2, xi*eta, eta^2}` in this
//! order. The value of a function at the cell center is therefore not its
//! first coefficient alone once the quadratic terms are nonzero evaluated off
//! center; at the center itself (`xi = eta = 0`) only the constant survives.

/// Degrees of freedom per cell for the scalar space.
pub const N_BASIS: usize = 6;

/// Values of all shape functions at `(xi, eta)`.
#[inline]
pub fn eval(xi: f64, eta: f64) -> [f64; N_BASIS] {
    [1.0, xi, eta, xi * xi, xi * eta, eta * eta]
}

/// Reference-coordinate gradients of all shape functions at `(xi, eta)`.
#[inline]
pub fn grad_ref(xi: f64, eta: f64) -> [[f64; 2]; N_BASIS] {
    [
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [2.0 * xi, 0.0],
        [eta, xi],
        [0.0, 2.0 * eta],
    ]
}
