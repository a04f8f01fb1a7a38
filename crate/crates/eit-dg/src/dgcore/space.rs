//! The piecewise-quadratic DG space on a structured mesh.
//!
//! `DgSpace` owns the mesh plus every quadrature/basis table the assembly
//! and evaluation routines need. Tables are computed once; all cells share
//! them because the mesh is uniform. Spaces are handed around as
//! `Arc<DgSpace>` and functions refuse to combine across different spaces.

use std::sync::Arc;

use super::basis::{self, N_BASIS};
use super::linalg::{cholesky6, chol_solve6, matvec6, Mat6};
use super::quad::{self, N_CELL_QP, N_EDGE_QP};
use crate::error::Result;
use crate::mesh::{Mesh, Side};

/// Number of vector degrees of freedom per cell (two components).
pub const N_FLUX_BASIS: usize = 2 * N_BASIS;

#[derive(Debug)]
pub struct DgSpace {
    pub mesh: Mesh,
    /// Reference coordinates of the 16 cell quadrature points.
    pub cell_qp_ref: [[f64; 2]; N_CELL_QP],
    /// Reference weights of the cell rule (sum 4).
    pub cell_qp_w: [f64; N_CELL_QP],
    /// `phi_cell[q][m]`: basis value at cell quadrature point `q`.
    pub phi_cell: [[f64; N_BASIS]; N_CELL_QP],
    /// `dphi_ref[q][m]`: reference gradient at cell quadrature point `q`.
    pub dphi_ref: [[[f64; 2]; N_BASIS]; N_CELL_QP],
    /// `phi_side[side][q][m]`: basis value at edge quadrature point `q` of a
    /// cell side, with the edge parameter ascending in the tangential
    /// coordinate (so the two sides of a shared edge see matching points).
    pub phi_side: [[[f64; N_BASIS]; N_EDGE_QP]; 4],
    /// Reference mass matrix `int phi_i phi_j` over `[-1,1]^2`.
    pub mass_ref: Mat6,
    mass_ref_chol: Mat6,
    /// Physical coordinates of every cell quadrature point, `len = n_cells * 16`.
    qp_phys: Vec<[f64; 2]>,
}

/// Index of a cell side in the side-local tables.
pub fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::Bottom => 2,
        Side::Top => 3,
    }
}

impl DgSpace {
    pub fn new(mesh: Mesh) -> Arc<Self> {
        let cell_qp_ref = quad::cell_points();
        let cell_qp_w = quad::cell_weights();

        let mut phi_cell = [[0.0; N_BASIS]; N_CELL_QP];
        let mut dphi_ref = [[[0.0; 2]; N_BASIS]; N_CELL_QP];
        for q in 0..N_CELL_QP {
            let [xi, eta] = cell_qp_ref[q];
            phi_cell[q] = basis::eval(xi, eta);
            dphi_ref[q] = basis::grad_ref(xi, eta);
        }

        let mut phi_side = [[[0.0; N_BASIS]; N_EDGE_QP]; 4];
        for q in 0..N_EDGE_QP {
            let t = quad::GAUSS_NODES[q];
            phi_side[side_index(Side::Left)][q] = basis::eval(-1.0, t);
            phi_side[side_index(Side::Right)][q] = basis::eval(1.0, t);
            phi_side[side_index(Side::Bottom)][q] = basis::eval(t, -1.0);
            phi_side[side_index(Side::Top)][q] = basis::eval(t, 1.0);
        }

        let mut mass_ref = [[0.0; N_BASIS]; N_BASIS];
        for q in 0..N_CELL_QP {
            for i in 0..N_BASIS {
                for j in 0..N_BASIS {
                    mass_ref[i][j] += cell_qp_w[q] * phi_cell[q][i] * phi_cell[q][j];
                }
            }
        }
        let mass_ref_chol =
            cholesky6(&mass_ref).expect("reference mass matrix is positive definite");

        let mut qp_phys = Vec::with_capacity(mesh.cells.len() * N_CELL_QP);
        for cell in &mesh.cells {
            let [cx, cy] = cell.center();
            let (ax, ay) = (0.5 * cell.hx(), 0.5 * cell.hy());
            for q in 0..N_CELL_QP {
                let [xi, eta] = cell_qp_ref[q];
                qp_phys.push([cx + ax * xi, cy + ay * eta]);
            }
        }

        Arc::new(DgSpace {
            mesh,
            cell_qp_ref,
            cell_qp_w,
            phi_cell,
            dphi_ref,
            phi_side,
            mass_ref,
            mass_ref_chol,
            qp_phys,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    /// Scalar degrees of freedom (6 per cell).
    pub fn n_dofs(&self) -> usize {
        self.n_cells() * N_BASIS
    }

    /// Jacobian of the reference-to-physical map (constant on a uniform mesh).
    pub fn cell_jacobian(&self) -> f64 {
        0.25 * self.mesh.hx() * self.mesh.hy()
    }

    /// Scale factors turning reference gradients into physical ones.
    pub fn grad_scale(&self) -> [f64; 2] {
        [2.0 / self.mesh.hx(), 2.0 / self.mesh.hy()]
    }

    /// Physical coordinates of cell `k`'s quadrature point `q`.
    pub fn qp_phys(&self, k: usize, q: usize) -> [f64; 2] {
        self.qp_phys[k * N_CELL_QP + q]
    }

    /// Solves `M_K c = rhs` for one cell, where `M_K` is the physical cell
    /// mass matrix `cell_jacobian() * mass_ref`.
    pub(crate) fn cell_mass_solve(&self, rhs: &[f64; N_BASIS]) -> [f64; N_BASIS] {
        let mut x = chol_solve6(&self.mass_ref_chol, rhs);
        let s = 1.0 / self.cell_jacobian();
        for v in &mut x {
            *v *= s;
        }
        x
    }

    /// Applies the physical cell mass matrix to local coefficients.
    pub(crate) fn cell_mass_apply(&self, c: &[f64; N_BASIS]) -> [f64; N_BASIS] {
        let mut y = matvec6(&self.mass_ref, c);
        let s = self.cell_jacobian();
        for v in &mut y {
            *v *= s;
        }
        y
    }

    /// Solves with the reference mass matrix (no jacobian scaling).
    pub(crate) fn ref_mass_solve(&self, rhs: &[f64; N_BASIS]) -> [f64; N_BASIS] {
        chol_solve6(&self.mass_ref_chol, rhs)
    }
}

/// True when `a` and `b` are interchangeable spaces.
pub fn same_space(a: &Arc<DgSpace>, b: &Arc<DgSpace>) -> bool {
    Arc::ptr_eq(a, b) || a.mesh.same_layout(&b.mesh)
}

/// Checks space compatibility, naming the caller in the error.
pub fn check_same_space(a: &Arc<DgSpace>, b: &Arc<DgSpace>, what: &str) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(crate::error::Error::mismatch(format!(
            "{what}: operands live on different spaces ({}x{} vs {}x{})",
            a.mesh.nx, a.mesh.ny, b.mesh.nx, b.mesh.ny
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, Rect};

    #[test]
    fn reference_mass_matrix_matches_monomial_moments() {
        let space = DgSpace::new(build_mesh(Rect::unit(), 2, 2).unwrap());
        // int over [-1,1]^2 of 1*1 = 4, xi*xi = 4/3, xi^2*xi^2 = 4/5,
        // xi^2 * eta^2 = 4/9, 1 * xi^2 = 4/3, xi*eta * xi*eta = 4/9.
        let m = &space.mass_ref;
        assert!((m[0][0] - 4.0).abs() < 1e-14);
        assert!((m[1][1] - 4.0 / 3.0).abs() < 1e-14);
        assert!((m[3][3] - 4.0 / 5.0).abs() < 1e-14);
        assert!((m[5][3] - 4.0 / 9.0).abs() < 1e-14);
        assert!((m[0][3] - 4.0 / 3.0).abs() < 1e-14);
        assert!((m[4][4] - 4.0 / 9.0).abs() < 1e-14);
        // Odd moments vanish.
        assert!(m[0][1].abs() < 1e-15);
        assert!(m[1][2].abs() < 1e-15);
        assert!(m[3][4].abs() < 1e-15);
    }

    #[test]
    fn quadrature_points_land_inside_their_cells() {
        let space = DgSpace::new(build_mesh(Rect::symmetric(), 3, 2).unwrap());
        for k in 0..space.n_cells() {
            let cell = space.mesh.cells[k];
            for q in 0..N_CELL_QP {
                let [x, y] = space.qp_phys(k, q);
                assert!(cell.contains(x, y));
            }
        }
    }

    #[test]
    fn side_tables_match_direct_evaluation() {
        let space = DgSpace::new(build_mesh(Rect::unit(), 1, 1).unwrap());
        let t = quad::GAUSS_NODES[2];
        let direct = basis::eval(t, 1.0);
        assert_eq!(space.phi_side[side_index(Side::Top)][2], direct);
    }
}
