//! Functions on the domain boundary, sampled at edge quadrature points.
//!
//! A `BoundaryTrace` stores one value per (boundary edge, quadrature point)
//! pair in the mesh's boundary-edge order. Dirichlet data, measured fluxes,
//! and measurement residuals all live here.

use std::io::{self, Write};
use std::sync::Arc;

use super::quad::{GAUSS_NODES, N_EDGE_QP};
use super::space::{check_same_space, DgSpace};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct BoundaryTrace {
    space: Arc<DgSpace>,
    /// `values[e * 4 + q]` for boundary edge `e`, quadrature point `q`.
    values: Vec<f64>,
}

impl BoundaryTrace {
    pub fn zeros(space: &Arc<DgSpace>) -> Self {
        let n = space.mesh.boundary_edges.len() * N_EDGE_QP;
        BoundaryTrace { space: space.clone(), values: vec![0.0; n] }
    }

    /// Samples a pointwise function at every boundary quadrature point.
    pub fn from_fn(space: &Arc<DgSpace>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut trace = Self::zeros(space);
        for (e, edge) in space.mesh.boundary_edges.iter().enumerate() {
            for q in 0..N_EDGE_QP {
                let [x, y] = edge.point(GAUSS_NODES[q]);
                trace.values[e * N_EDGE_QP + q] = f(x, y);
            }
        }
        trace
    }

    pub fn from_values(space: &Arc<DgSpace>, values: Vec<f64>) -> Result<Self> {
        let n = space.mesh.boundary_edges.len() * N_EDGE_QP;
        if values.len() != n {
            return Err(crate::error::Error::mismatch(format!(
                "boundary trace needs {n} values, got {}",
                values.len()
            )));
        }
        Ok(BoundaryTrace { space: space.clone(), values })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, edge: usize, q: usize) -> f64 {
        self.values[edge * N_EDGE_QP + q]
    }

    #[inline]
    pub fn set(&mut self, edge: usize, q: usize, v: f64) {
        self.values[edge * N_EDGE_QP + q] = v;
    }

    pub fn edge_values(&self, edge: usize) -> &[f64] {
        &self.values[edge * N_EDGE_QP..(edge + 1) * N_EDGE_QP]
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &BoundaryTrace) -> Result<()> {
        check_same_space(&self.space, &other.space, "BoundaryTrace::axpy")?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &BoundaryTrace) -> Result<BoundaryTrace> {
        check_same_space(&self.space, &other.space, "BoundaryTrace::sub")?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(BoundaryTrace { space: self.space.clone(), values })
    }

    /// Writes `edge,qp,x,y,value` rows in edge-major order.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "edge,qp,x,y,value")?;
        for (e, edge) in self.space.mesh.boundary_edges.iter().enumerate() {
            for q in 0..N_EDGE_QP {
                let [x, y] = edge.point(GAUSS_NODES[q]);
                writeln!(out, "{},{},{},{},{}", e, q, x, y, self.get(e, q))?;
            }
        }
        Ok(())
    }
}
