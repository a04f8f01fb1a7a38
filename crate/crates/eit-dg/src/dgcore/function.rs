//! Piecewise-polynomial functions on a [`DgSpace`].
//!
//! `DgFunction` holds 6 coefficients per cell (scalar fields: conductivity,
//! potentials, updates); `FluxField` holds 12 (vector fields: gradients and
//! fluxes, x components first). Coefficients refer to the monomial basis in
//! reference coordinates, so a function's value at a cell center is exactly
//! its constant coefficient.

use std::io::{self, Write};
use std::sync::Arc;

use super::basis::{self, N_BASIS};
use super::quad::N_CELL_QP;
use super::space::{check_same_space, side_index, DgSpace};
use crate::error::Result;
use crate::mesh::Side;
use crate::par;

/// Scalar DG function.
#[derive(Clone, Debug)]
pub struct DgFunction {
    space: Arc<DgSpace>,
    coeffs: Vec<f64>,
}

/// Vector-valued DG function (one quadratic per component per cell).
#[derive(Clone, Debug)]
pub struct FluxField {
    space: Arc<DgSpace>,
    /// Layout per cell: 6 x-component coefficients, then 6 y-component ones.
    coeffs: Vec<f64>,
}

impl DgFunction {
    pub fn zeros(space: &Arc<DgSpace>) -> Self {
        DgFunction { space: space.clone(), coeffs: vec![0.0; space.n_dofs()] }
    }

    pub fn constant(space: &Arc<DgSpace>, value: f64) -> Self {
        let mut f = Self::zeros(space);
        for k in 0..space.n_cells() {
            f.coeffs[k * N_BASIS] = value;
        }
        f
    }

    pub fn from_coeffs(space: &Arc<DgSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(crate::error::Error::mismatch(format!(
                "coefficient vector has length {}, space has {} dofs",
                coeffs.len(),
                space.n_dofs()
            )));
        }
        Ok(DgFunction { space: space.clone(), coeffs })
    }

    /// Cell-local L2 projection of a pointwise function.
    pub fn project(space: &Arc<DgSpace>, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let locals = par::map_indexed(space.n_cells(), |k| {
            let mut rhs = [0.0; N_BASIS];
            for q in 0..N_CELL_QP {
                let [x, y] = space.qp_phys(k, q);
                let w = space.cell_qp_w[q] * f(x, y);
                for m in 0..N_BASIS {
                    rhs[m] += w * space.phi_cell[q][m];
                }
            }
            // Jacobians cancel between the quadrature weight and the mass
            // matrix, so the reference solve is the projection.
            space.ref_mass_solve(&rhs)
        });
        let mut coeffs = Vec::with_capacity(space.n_dofs());
        for local in locals {
            coeffs.extend_from_slice(&local);
        }
        DgFunction { space: space.clone(), coeffs }
    }

    /// Projection from values sampled at the cell quadrature points
    /// (`values[k * 16 + q]`).
    pub fn project_qp_values(space: &Arc<DgSpace>, values: &[f64]) -> Result<Self> {
        if values.len() != space.n_cells() * N_CELL_QP {
            return Err(crate::error::Error::mismatch(format!(
                "expected {} quadrature samples, got {}",
                space.n_cells() * N_CELL_QP,
                values.len()
            )));
        }
        let locals = par::map_indexed(space.n_cells(), |k| {
            let mut rhs = [0.0; N_BASIS];
            for q in 0..N_CELL_QP {
                let w = space.cell_qp_w[q] * values[k * N_CELL_QP + q];
                for m in 0..N_BASIS {
                    rhs[m] += w * space.phi_cell[q][m];
                }
            }
            space.ref_mass_solve(&rhs)
        });
        let mut coeffs = Vec::with_capacity(space.n_dofs());
        for local in locals {
            coeffs.extend_from_slice(&local);
        }
        Ok(DgFunction { space: space.clone(), coeffs })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn cell_coeffs(&self, k: usize) -> &[f64] {
        &self.coeffs[k * N_BASIS..(k + 1) * N_BASIS]
    }

    /// Value at reference coordinates inside cell `k`.
    pub fn eval_ref(&self, k: usize, xi: f64, eta: f64) -> f64 {
        let phi = basis::eval(xi, eta);
        let c = self.cell_coeffs(k);
        (0..N_BASIS).map(|m| c[m] * phi[m]).sum()
    }

    /// Value at a physical point known to lie in cell `k`.
    pub fn eval_in_cell(&self, k: usize, x: f64, y: f64) -> f64 {
        let [xi, eta] = self.space.mesh.cells[k].to_reference(x, y);
        self.eval_ref(k, xi, eta)
    }

    /// Value at an arbitrary physical point (the containing cell is located
    /// first; outside points clamp to the nearest cell).
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_in_cell(self.space.mesh.locate(x, y), x, y)
    }

    /// Values at the 16 quadrature points of cell `k`.
    pub fn eval_cell_qps(&self, k: usize) -> [f64; N_CELL_QP] {
        let c = self.cell_coeffs(k);
        let mut vals = [0.0; N_CELL_QP];
        for q in 0..N_CELL_QP {
            let phi = &self.space.phi_cell[q];
            vals[q] = (0..N_BASIS).map(|m| c[m] * phi[m]).sum();
        }
        vals
    }

    /// Values at the 4 quadrature points of one side of cell `k`.
    pub fn eval_side_qps(&self, k: usize, side: Side) -> [f64; 4] {
        let c = self.cell_coeffs(k);
        let tab = &self.space.phi_side[side_index(side)];
        let mut vals = [0.0; 4];
        for q in 0..4 {
            vals[q] = (0..N_BASIS).map(|m| c[m] * tab[q][m]).sum();
        }
        vals
    }

    /// Value at each cell center (the constant coefficient).
    pub fn cell_center_values(&self) -> Vec<f64> {
        (0..self.space.n_cells()).map(|k| self.coeffs[k * N_BASIS]).collect()
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &DgFunction) -> Result<()> {
        check_same_space(&self.space, &other.space, "DgFunction::axpy")?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &DgFunction) -> Result<DgFunction> {
        check_same_space(&self.space, &other.space, "DgFunction::sub")?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(DgFunction { space: self.space.clone(), coeffs })
    }

    /// Writes `x,y,value` rows, one per cell center, in cell order.
    pub fn write_centers_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "x,y,value")?;
        for (k, cell) in self.space.mesh.cells.iter().enumerate() {
            let [cx, cy] = cell.center();
            writeln!(out, "{},{},{}", cx, cy, self.coeffs[k * N_BASIS])?;
        }
        Ok(())
    }

    /// Writes `cell,c0..c5` rows with the full coefficient set.
    pub fn write_coeffs_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "cell,c0,c1,c2,c3,c4,c5")?;
        for k in 0..self.space.n_cells() {
            let c = self.cell_coeffs(k);
            writeln!(out, "{},{},{},{},{},{},{}", k, c[0], c[1], c[2], c[3], c[4], c[5])?;
        }
        Ok(())
    }
}

impl FluxField {
    pub fn zeros(space: &Arc<DgSpace>) -> Self {
        FluxField { space: space.clone(), coeffs: vec![0.0; space.n_dofs() * 2] }
    }

    pub fn from_coeffs(space: &Arc<DgSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() * 2 {
            return Err(crate::error::Error::mismatch(format!(
                "flux coefficient vector has length {}, space needs {}",
                coeffs.len(),
                space.n_dofs() * 2
            )));
        }
        Ok(FluxField { space: space.clone(), coeffs })
    }

    /// Cell-local L2 projection of a pointwise vector field (test support).
    pub fn project(space: &Arc<DgSpace>, f: impl Fn(f64, f64) -> [f64; 2] + Sync) -> Self {
        let locals = par::map_indexed(space.n_cells(), |k| {
            let mut rhs = [[0.0; N_BASIS]; 2];
            for q in 0..N_CELL_QP {
                let [x, y] = space.qp_phys(k, q);
                let v = f(x, y);
                for c in 0..2 {
                    let w = space.cell_qp_w[q] * v[c];
                    for m in 0..N_BASIS {
                        rhs[c][m] += w * space.phi_cell[q][m];
                    }
                }
            }
            [space.ref_mass_solve(&rhs[0]), space.ref_mass_solve(&rhs[1])]
        });
        let mut coeffs = Vec::with_capacity(space.n_dofs() * 2);
        for local in locals {
            coeffs.extend_from_slice(&local[0]);
            coeffs.extend_from_slice(&local[1]);
        }
        FluxField { space: space.clone(), coeffs }
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Local coefficients of one component (0 = x, 1 = y) of cell `k`.
    pub fn component_coeffs(&self, k: usize, comp: usize) -> &[f64] {
        let base = k * 2 * N_BASIS + comp * N_BASIS;
        &self.coeffs[base..base + N_BASIS]
    }

    /// Vector value at reference coordinates inside cell `k`.
    pub fn eval_ref(&self, k: usize, xi: f64, eta: f64) -> [f64; 2] {
        let phi = basis::eval(xi, eta);
        let mut out = [0.0; 2];
        for comp in 0..2 {
            let c = self.component_coeffs(k, comp);
            out[comp] = (0..N_BASIS).map(|m| c[m] * phi[m]).sum();
        }
        out
    }

    /// Vector value at a physical point known to lie in cell `k`.
    pub fn eval_in_cell(&self, k: usize, x: f64, y: f64) -> [f64; 2] {
        let [xi, eta] = self.space.mesh.cells[k].to_reference(x, y);
        self.eval_ref(k, xi, eta)
    }

    /// Vector values at the 16 quadrature points of cell `k`.
    pub fn eval_cell_qps(&self, k: usize) -> [[f64; 2]; N_CELL_QP] {
        let mut vals = [[0.0; 2]; N_CELL_QP];
        for comp in 0..2 {
            let c = self.component_coeffs(k, comp);
            for q in 0..N_CELL_QP {
                let phi = &self.space.phi_cell[q];
                vals[q][comp] = (0..N_BASIS).map(|m| c[m] * phi[m]).sum();
            }
        }
        vals
    }

    /// Component values at the 4 quadrature points of one side of cell `k`.
    pub fn eval_side_qps(&self, k: usize, side: Side, comp: usize) -> [f64; 4] {
        let c = self.component_coeffs(k, comp);
        let tab = &self.space.phi_side[side_index(side)];
        let mut vals = [0.0; 4];
        for q in 0..4 {
            vals[q] = (0..N_BASIS).map(|m| c[m] * tab[q][m]).sum();
        }
        vals
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &FluxField) -> Result<()> {
        check_same_space(&self.space, &other.space, "FluxField::axpy")?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, Rect};

    fn space(n: usize) -> Arc<DgSpace> {
        DgSpace::new(build_mesh(Rect::unit(), n, n).unwrap())
    }

    #[test]
    fn projection_reproduces_quadratics_exactly() {
        let space = space(3);
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - y + 0.5 * x * x - x * y + 3.0 * y * y;
        let fh = DgFunction::project(&space, f);
        for (x, y) in [(0.1, 0.9), (0.5, 0.5), (0.99, 0.01), (1.0 / 3.0, 2.0 / 3.0)] {
            assert!((fh.eval(x, y) - f(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_error_shrinks_at_third_order() {
        // L2 projection of a smooth non-polynomial: halving h divides the
        // error by about 8.
        let f = |x: f64, y: f64| (x + y).sin();
        let err = |n: usize| -> f64 {
            let space = space(n);
            let fh = DgFunction::project(&space, f);
            let mut e2 = 0.0;
            for k in 0..space.n_cells() {
                let vals = fh.eval_cell_qps(k);
                for q in 0..N_CELL_QP {
                    let [x, y] = space.qp_phys(k, q);
                    e2 += space.cell_jacobian() * space.cell_qp_w[q] * (vals[q] - f(x, y)).powi(2);
                }
            }
            e2.sqrt()
        };
        let (e8, e16, e32) = (err(8), err(16), err(32));
        let r1 = e8 / e16;
        let r2 = e16 / e32;
        assert!((6.0..10.5).contains(&r1), "ratio {r1}");
        assert!((6.0..10.5).contains(&r2), "ratio {r2}");
    }

    #[test]
    fn qp_value_projection_matches_function_projection() {
        let space = space(4);
        let f = |x: f64, y: f64| (3.0 * x).cos() * (2.0 * y).sin();
        let direct = DgFunction::project(&space, f);
        let mut samples = Vec::new();
        for k in 0..space.n_cells() {
            for q in 0..N_CELL_QP {
                let [x, y] = space.qp_phys(k, q);
                samples.push(f(x, y));
            }
        }
        let via_samples = DgFunction::project_qp_values(&space, &samples).unwrap();
        for (a, b) in direct.coeffs().iter().zip(via_samples.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn center_value_is_the_constant_coefficient() {
        let space = space(2);
        let fh = DgFunction::project(&space, |x, y| x * x + y);
        let centers = fh.cell_center_values();
        for (k, cell) in space.mesh.cells.iter().enumerate() {
            let [cx, cy] = cell.center();
            assert!((centers[k] - fh.eval(cx, cy)).abs() < 1e-13);
        }
    }

    #[test]
    fn flux_projection_reproduces_linear_fields() {
        let space = space(2);
        let qh = FluxField::project(&space, |x, y| [2.0 * x - y, x + 3.0]);
        let [qx, qy] = qh.eval_in_cell(space.mesh.locate(0.7, 0.2), 0.7, 0.2);
        assert!((qx - 1.2).abs() < 1e-13);
        assert!((qy - 3.7).abs() < 1e-13);
    }

    #[test]
    fn cross_space_operations_are_rejected() {
        let a = DgFunction::zeros(&space(2));
        let mut b = DgFunction::zeros(&space(3));
        assert!(b.axpy(1.0, &a).is_err());
        assert!(a.sub(&b).is_err());
    }

    #[test]
    fn csv_writers_emit_one_row_per_cell() {
        let space = space(2);
        let fh = DgFunction::constant(&space, 1.5);
        let mut buf = Vec::new();
        fh.write_centers_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,y,value");
        assert_eq!(lines[1], "0.25,0.25,1.5");
        let mut buf = Vec::new();
        fh.write_coeffs_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(1).unwrap().starts_with("0,1.5,0,0,"));
    }
}
