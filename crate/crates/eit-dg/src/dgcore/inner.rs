//! Inner products: L2 over the domain, H1 (with caller-supplied discrete
//! gradients), and L2 over the boundary.
//!
//! Domain products are evaluated through the reference mass matrix, which is
//! exact for piecewise polynomials; the boundary product uses the 4-point
//! edge rule on every boundary edge. All sums run in fixed cell/edge order.

use super::basis::N_BASIS;
use super::function::{DgFunction, FluxField};
use super::linalg::matvec6;
use super::quad::{GAUSS_WEIGHTS, N_EDGE_QP};
use super::space::check_same_space;
use super::trace::BoundaryTrace;
use crate::error::Result;

/// `int_Omega a b`.
pub fn inner_l2(a: &DgFunction, b: &DgFunction) -> Result<f64> {
    check_same_space(a.space(), b.space(), "inner_l2")?;
    let space = a.space();
    let jac = space.cell_jacobian();
    let mut total = 0.0;
    for k in 0..space.n_cells() {
        let ca: &[f64; N_BASIS] = a.cell_coeffs(k).try_into().unwrap();
        let cb: &[f64; N_BASIS] = b.cell_coeffs(k).try_into().unwrap();
        let mb = matvec6(&space.mass_ref, cb);
        let mut s = 0.0;
        for m in 0..N_BASIS {
            s += ca[m] * mb[m];
        }
        total += jac * s;
    }
    Ok(total)
}

/// `int_Omega qa . qb` for vector fields.
pub fn inner_l2_flux(a: &FluxField, b: &FluxField) -> Result<f64> {
    check_same_space(a.space(), b.space(), "inner_l2_flux")?;
    let space = a.space();
    let jac = space.cell_jacobian();
    let mut total = 0.0;
    for k in 0..space.n_cells() {
        for comp in 0..2 {
            let ca: &[f64; N_BASIS] = a.component_coeffs(k, comp).try_into().unwrap();
            let cb: &[f64; N_BASIS] = b.component_coeffs(k, comp).try_into().unwrap();
            let mb = matvec6(&space.mass_ref, cb);
            let mut s = 0.0;
            for m in 0..N_BASIS {
                s += ca[m] * mb[m];
            }
            total += jac * s;
        }
    }
    Ok(total)
}

/// `int_Omega a b + int_Omega grad_a . grad_b`, with the discrete gradients
/// supplied by the caller (typically lifted gradients).
pub fn inner_h1(
    a: &DgFunction,
    b: &DgFunction,
    grad_a: &FluxField,
    grad_b: &FluxField,
) -> Result<f64> {
    Ok(inner_l2(a, b)? + inner_l2_flux(grad_a, grad_b)?)
}

/// `int_{boundary} a b` over all boundary edges.
pub fn inner_boundary(a: &BoundaryTrace, b: &BoundaryTrace) -> Result<f64> {
    check_same_space(a.space(), b.space(), "inner_boundary")?;
    let mesh = &a.space().mesh;
    let mut total = 0.0;
    for (e, edge) in mesh.boundary_edges.iter().enumerate() {
        let jac = 0.5 * edge.length;
        let mut s = 0.0;
        for q in 0..N_EDGE_QP {
            s += GAUSS_WEIGHTS[q] * a.get(e, q) * b.get(e, q);
        }
        total += jac * s;
    }
    Ok(total)
}

/// `sqrt(inner_l2(a, a))`.
pub fn l2_norm(a: &DgFunction) -> f64 {
    inner_l2(a, a).expect("same space").max(0.0).sqrt()
}

/// `sqrt(inner_boundary(a, a))`.
pub fn boundary_norm(a: &BoundaryTrace) -> f64 {
    inner_boundary(a, a).expect("same space").max(0.0).sqrt()
}
