//! Discrete gradient/divergence pair and boundary terms for the LDG scheme.
//!
//! The mixed form introduces the flux `q = sigma grad(u)` as a separate
//! unknown and couples the two fields only through numerical traces on cell
//! edges. With the alternating trace choice used here (the scalar trace taken
//! from the upwind cell, the flux trace from the downwind cell, relative to a
//! fixed direction that is nowhere tangent to an edge), the discrete
//! divergence is exactly minus the transpose of the discrete gradient, so the
//! whole scheme reduces to a symmetric positive definite system for `u`
//! alone. This module builds the gradient operator `G`, the boundary lift,
//! and the penalty terms; the reduced system itself is assembled in
//! [`super::system`].

use std::sync::Arc;

use crate::dgcore::basis::N_BASIS;
use crate::dgcore::linalg::{chol_solve6, cholesky6, Mat6};
use crate::dgcore::quad::{GAUSS_WEIGHTS, N_CELL_QP, N_EDGE_QP};
use crate::dgcore::space::{side_index, DgSpace, N_FLUX_BASIS};
use crate::dgcore::{BoundaryTrace, DgFunction, FluxField};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryFlow, EdgeFlow, Side};
use crate::par;

/// One 12x6 block of the gradient operator: rows are the flux test functions
/// of some cell, columns the scalar basis of `col`.
#[derive(Clone)]
struct GBlock {
    col: usize,
    m: [[f64; N_BASIS]; N_FLUX_BASIS],
}

/// Boundary edge bookkeeping shared by lift, penalty, and flux extraction.
#[derive(Clone, Copy, Debug)]
pub(crate) struct BoundaryEdgeInfo {
    pub cell: usize,
    pub side: Side,
    /// Outward normal component along the edge axis (+-1 in x or y).
    pub normal: [f64; 2],
    pub outflow: bool,
    /// Penalty weight `alpha_e` (zero on inflow edges).
    pub alpha: f64,
    /// Edge length / 2, the 1D quadrature Jacobian.
    pub jac: f64,
}

/// Mesh-level pieces of the LDG discretization for one transport direction
/// and penalty scale: the gradient blocks, their transpose layout, and the
/// boundary edge table.
pub struct LdgOperators {
    space: Arc<DgSpace>,
    flow: EdgeFlow,
    alpha_stab_scale: f64,
    /// Row-major blocks: `blocks[k]` are the blocks with test rows in cell `k`.
    blocks: Vec<Vec<GBlock>>,
    /// Column-major blocks: `blocks_t[k]` are the blocks with trial columns in
    /// cell `k`, stored transposed for gather-style products.
    blocks_t: Vec<Vec<GBlock>>,
    pub(crate) boundary: Vec<BoundaryEdgeInfo>,
}

/// Per-cell Cholesky factors of the sigma-weighted flux mass matrix
/// (one 6x6 factor per cell, shared by both vector components), plus the
/// reciprocal coefficient values at the cell quadrature points.
pub struct SigmaMass {
    pub(crate) chol: Vec<Mat6>,
    pub(crate) inv_qp: Vec<f64>,
}

impl LdgOperators {
    pub fn new(space: &Arc<DgSpace>, v: [f64; 2], alpha_stab_scale: f64) -> Result<Arc<Self>> {
        if !(alpha_stab_scale > 0.0) || !alpha_stab_scale.is_finite() {
            return Err(Error::invalid(format!(
                "penalty scale must be positive and finite, got {alpha_stab_scale}"
            )));
        }
        let flow = crate::mesh::classify_edges(&space.mesh, v)?;
        let n = space.n_cells();
        let mut blocks: Vec<Vec<GBlock>> = Vec::with_capacity(n);

        // Volume part: integral of u * div(w) over the cell, identical for
        // every cell of the uniform mesh up to the fixed geometric scaling.
        let vol = volume_block(space);
        for _ in 0..n {
            blocks.push(vec![GBlock { col: usize::MAX, m: vol }]);
        }
        for (k, list) in blocks.iter_mut().enumerate() {
            list[0].col = k;
        }

        // Interior edges: the scalar trace is the upwind value (the flux
        // trace in the scalar equation then takes the downwind side, which
        // is what makes the reduced system symmetric), tested against both
        // neighbors with their own outward normals.
        for (e, fl) in space.mesh.interior_edges.iter().zip(&flow.interior) {
            let jac = e.length / 2.0;
            for &cell in &e.cells {
                let side = interior_side(e, cell);
                let sign = if cell == e.cells[0] { 1.0 } else { -1.0 };
                let n_out = [sign * e.normal[0], sign * e.normal[1]];
                let up_side = interior_side(e, fl.upwind_cell);
                let m = edge_block(space, side, up_side, n_out, jac, -1.0);
                push_block(&mut blocks[cell], fl.upwind_cell, m);
            }
        }

        // Transpose layout for gather-style products with the adjoint.
        let mut blocks_t: Vec<Vec<GBlock>> = vec![Vec::new(); n];
        for (row, list) in blocks.iter().enumerate() {
            for b in list {
                let mut mt = [[0.0; N_BASIS]; N_FLUX_BASIS];
                #[allow(clippy::needless_range_loop)]
                for i in 0..N_FLUX_BASIS {
                    for j in 0..N_BASIS {
                        mt[i][j] = b.m[i][j];
                    }
                }
                blocks_t[b.col].push(GBlock { col: row, m: mt });
            }
        }

        let boundary = space
            .mesh
            .boundary_edges
            .iter()
            .zip(&flow.boundary)
            .map(|(e, fl)| {
                let outflow = matches!(fl, BoundaryFlow::Outflow);
                BoundaryEdgeInfo {
                    cell: e.cell,
                    side: e.side,
                    normal: e.normal,
                    outflow,
                    alpha: if outflow { alpha_stab_scale / e.length } else { 0.0 },
                    jac: e.length / 2.0,
                }
            })
            .collect();

        Ok(Arc::new(LdgOperators {
            space: space.clone(),
            flow,
            alpha_stab_scale,
            blocks,
            blocks_t,
            boundary,
        }))
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn flow(&self) -> &EdgeFlow {
        &self.flow
    }

    pub fn alpha_stab_scale(&self) -> f64 {
        self.alpha_stab_scale
    }

    pub(crate) fn row_blocks(&self, cell: usize) -> impl Iterator<Item = (usize, &[[f64; N_BASIS]; N_FLUX_BASIS])> {
        self.blocks[cell].iter().map(|b| (b.col, &b.m))
    }

    /// `y = G u`: flux-space load vector, 12 entries per cell.
    pub(crate) fn apply_g(&self, u: &[f64]) -> Vec<f64> {
        let n = self.space.n_cells();
        debug_assert_eq!(u.len(), n * N_BASIS);
        let rows = par::map_indexed(n, |k| {
            let mut out = [0.0; N_FLUX_BASIS];
            for b in &self.blocks[k] {
                let uc = &u[b.col * N_BASIS..(b.col + 1) * N_BASIS];
                for (i, row) in b.m.iter().enumerate() {
                    let mut s = 0.0;
                    for j in 0..N_BASIS {
                        s += row[j] * uc[j];
                    }
                    out[i] += s;
                }
            }
            out
        });
        let mut y = vec![0.0; n * N_FLUX_BASIS];
        for (k, row) in rows.iter().enumerate() {
            y[k * N_FLUX_BASIS..(k + 1) * N_FLUX_BASIS].copy_from_slice(row);
        }
        y
    }

    /// `y = G^T z` for a flux-space vector `z`: scalar-space load vector.
    pub(crate) fn apply_g_transpose(&self, z: &[f64]) -> Vec<f64> {
        let n = self.space.n_cells();
        debug_assert_eq!(z.len(), n * N_FLUX_BASIS);
        let rows = par::map_indexed(n, |c| {
            let mut out = [0.0; N_BASIS];
            for b in &self.blocks_t[c] {
                let zr = &z[b.col * N_FLUX_BASIS..(b.col + 1) * N_FLUX_BASIS];
                for (i, row) in b.m.iter().enumerate() {
                    let zi = zr[i];
                    if zi != 0.0 {
                        for j in 0..N_BASIS {
                            out[j] += row[j] * zi;
                        }
                    }
                }
            }
            out
        });
        let mut y = vec![0.0; n * N_BASIS];
        for (c, row) in rows.iter().enumerate() {
            y[c * N_BASIS..(c + 1) * N_BASIS].copy_from_slice(row);
        }
        y
    }

    /// Boundary lift `g1`: the Dirichlet trace tested against flux functions,
    /// entering the flux equation with a plus sign. `values[edge][qp]`.
    pub(crate) fn boundary_lift(&self, b: &BoundaryTrace) -> Vec<f64> {
        let n = self.space.n_cells();
        let mut y = vec![0.0; n * N_FLUX_BASIS];
        for (e_idx, info) in self.boundary.iter().enumerate() {
            let vals = b.edge_values(e_idx);
            let phi = &self.space.phi_side[side_index(info.side)];
            let base = info.cell * N_FLUX_BASIS;
            for comp in 0..2 {
                let nc = info.normal[comp];
                if nc == 0.0 {
                    continue;
                }
                for q in 0..N_EDGE_QP {
                    let w = info.jac * GAUSS_WEIGHTS[q] * vals[q] * nc;
                    for j in 0..N_BASIS {
                        y[base + comp * N_BASIS + j] += w * phi[q][j];
                    }
                }
            }
        }
        y
    }

    /// Cholesky factors of the flux mass matrix weighted by `1/sigma`, with a
    /// positivity check at every quadrature point.
    pub(crate) fn sigma_mass(&self, sigma: &DgFunction) -> Result<SigmaMass> {
        crate::dgcore::space::check_same_space(self.space(), sigma.space(), "coefficient")?;
        let n = self.space.n_cells();
        let jac = self.space.cell_jacobian();
        let w = self.space.cell_qp_w;
        let phi = &self.space.phi_cell;
        let results = par::map_indexed(n, |k| -> Result<(Mat6, [f64; N_CELL_QP])> {
            let vals = sigma.eval_cell_qps(k);
            let mut inv = [0.0; N_CELL_QP];
            for (q, &s) in vals.iter().enumerate() {
                if !(s > 0.0) || !s.is_finite() {
                    let [x, y] = self.space.qp_phys(k, q);
                    return Err(Error::CoefficientRange(format!(
                        "conductivity must be positive: value {s:e} at ({x:.4}, {y:.4}) in cell {k}"
                    )));
                }
                inv[q] = 1.0 / s;
            }
            let mut m = [[0.0; N_BASIS]; N_BASIS];
            for q in 0..N_CELL_QP {
                let wq = jac * w[q] * inv[q];
                for i in 0..N_BASIS {
                    let pi = phi[q][i] * wq;
                    for j in 0..=i {
                        m[i][j] += pi * phi[q][j];
                    }
                }
            }
            for i in 0..N_BASIS {
                for j in i + 1..N_BASIS {
                    m[i][j] = m[j][i];
                }
            }
            let chol = cholesky6(&m)?;
            Ok((chol, inv))
        });
        let mut chol = Vec::with_capacity(n);
        let mut inv_qp = Vec::with_capacity(n * N_CELL_QP);
        for r in results {
            let (c, inv) = r?;
            chol.push(c);
            inv_qp.extend_from_slice(&inv);
        }
        Ok(SigmaMass { chol, inv_qp })
    }

    /// Solves the block-diagonal flux mass system `M z = rhs` in place.
    /// `mass = None` uses the unweighted mass matrix.
    pub(crate) fn mass_solve_flux(&self, mass: Option<&SigmaMass>, rhs: &mut [f64]) {
        let n = self.space.n_cells();
        debug_assert_eq!(rhs.len(), n * N_FLUX_BASIS);
        let cols = par::map_indexed(n, |k| {
            let base = k * N_FLUX_BASIS;
            let mut out = [0.0; N_FLUX_BASIS];
            for comp in 0..2 {
                let mut r = [0.0; N_BASIS];
                r.copy_from_slice(&rhs[base + comp * N_BASIS..base + (comp + 1) * N_BASIS]);
                let x = match mass {
                    Some(sm) => chol_solve6(&sm.chol[k], &r),
                    None => self.space.cell_mass_solve(&r),
                };
                out[comp * N_BASIS..(comp + 1) * N_BASIS].copy_from_slice(&x);
            }
            out
        });
        for (k, col) in cols.iter().enumerate() {
            rhs[k * N_FLUX_BASIS..(k + 1) * N_FLUX_BASIS].copy_from_slice(col);
        }
    }

    /// Gradient reconstruction: lifts the boundary data into the flux space
    /// and returns `M^{-1} (-G f + g1)` with unit weight. With
    /// `zero_trace` the lift uses homogeneous data, so the result is the
    /// gradient of `f` extended by zero; otherwise the function's own
    /// boundary trace is used and smooth functions reproduce their gradient.
    pub fn lifted_gradient(&self, f: &DgFunction, zero_trace: bool) -> Result<FluxField> {
        crate::dgcore::space::check_same_space(self.space(), f.space(), "function")?;
        let mut z = self.apply_g(f.coeffs());
        for v in z.iter_mut() {
            *v = -*v;
        }
        if !zero_trace {
            let trace = own_trace(self.space(), f, &self.boundary);
            let lift = self.boundary_lift(&trace);
            for (a, b) in z.iter_mut().zip(&lift) {
                *a += b;
            }
        }
        self.mass_solve_flux(None, &mut z);
        FluxField::from_coeffs(self.space(), z)
    }

    /// Applies the reduced operator `G^T M^{-1} G + penalty + reaction mass`
    /// to scalar coefficients, returning a load vector. Boundary data does
    /// not enter: this is the homogeneous (zero-trace) action.
    pub(crate) fn apply_reduced(
        &self,
        mass: Option<&SigmaMass>,
        reaction: f64,
        p: &[f64],
    ) -> Vec<f64> {
        let mut z = self.apply_g(p);
        self.mass_solve_flux(mass, &mut z);
        let mut y = self.apply_g_transpose(&z);
        self.add_penalty(p, &mut y);
        if reaction != 0.0 {
            let n = self.space.n_cells();
            for k in 0..n {
                let pk: [f64; N_BASIS] = p[k * N_BASIS..(k + 1) * N_BASIS].try_into().unwrap();
                let mp = self.space.cell_mass_apply(&pk);
                for j in 0..N_BASIS {
                    y[k * N_BASIS + j] += reaction * mp[j];
                }
            }
        }
        y
    }

    /// Adds the outflow-edge penalty `alpha_e <u, v>_e` to a load vector.
    pub(crate) fn add_penalty(&self, p: &[f64], y: &mut [f64]) {
        for info in &self.boundary {
            if !info.outflow {
                continue;
            }
            let phi = &self.space.phi_side[side_index(info.side)];
            let base = info.cell * N_BASIS;
            let pk = &p[base..base + N_BASIS];
            for q in 0..N_EDGE_QP {
                let mut uval = 0.0;
                for j in 0..N_BASIS {
                    uval += pk[j] * phi[q][j];
                }
                let w = info.alpha * info.jac * GAUSS_WEIGHTS[q] * uval;
                for j in 0..N_BASIS {
                    y[base + j] += w * phi[q][j];
                }
            }
        }
    }

    /// Penalty load from boundary data: `alpha_e <b, v>_e` on outflow edges.
    pub(crate) fn penalty_lift(&self, b: &BoundaryTrace) -> Vec<f64> {
        let mut y = vec![0.0; self.space.n_cells() * N_BASIS];
        for (e_idx, info) in self.boundary.iter().enumerate() {
            if !info.outflow {
                continue;
            }
            let vals = b.edge_values(e_idx);
            let phi = &self.space.phi_side[side_index(info.side)];
            let base = info.cell * N_BASIS;
            for q in 0..N_EDGE_QP {
                let w = info.alpha * info.jac * GAUSS_WEIGHTS[q] * vals[q];
                for j in 0..N_BASIS {
                    y[base + j] += w * phi[q][j];
                }
            }
        }
        y
    }
}

/// Samples a function's own boundary trace at the edge quadrature points.
pub(crate) fn own_trace(
    space: &Arc<DgSpace>,
    f: &DgFunction,
    boundary: &[BoundaryEdgeInfo],
) -> BoundaryTrace {
    let mut values = Vec::with_capacity(boundary.len() * N_EDGE_QP);
    for info in boundary {
        values.extend_from_slice(&f.eval_side_qps(info.cell, info.side));
    }
    BoundaryTrace::from_values(space, values).expect("edge-major trace length")
}

fn push_block(list: &mut Vec<GBlock>, col: usize, m: [[f64; N_BASIS]; N_FLUX_BASIS]) {
    for b in list.iter_mut() {
        if b.col == col {
            for i in 0..N_FLUX_BASIS {
                for j in 0..N_BASIS {
                    b.m[i][j] += m[i][j];
                }
            }
            return;
        }
    }
    list.push(GBlock { col, m });
}

/// The volume contribution `integral_K u div(w)`: rows are flux tests
/// (x-component first), columns the scalar basis. Same for every cell.
fn volume_block(space: &DgSpace) -> [[f64; N_BASIS]; N_FLUX_BASIS] {
    let jac = space.cell_jacobian();
    let gs = space.grad_scale();
    let mut m = [[0.0; N_BASIS]; N_FLUX_BASIS];
    for q in 0..N_CELL_QP {
        let w = jac * space.cell_qp_w[q];
        for comp in 0..2 {
            for i in 0..N_BASIS {
                let dwi = space.dphi_ref[q][i][comp] * gs[comp];
                for j in 0..N_BASIS {
                    m[comp * N_BASIS + i][j] += w * space.phi_cell[q][j] * dwi;
                }
            }
        }
    }
    m
}

/// Edge contribution `s * integral_e trace(u) (w . n)` where the trace comes
/// from side `trace_side` of the downwind cell and tests live on `test_side`
/// of the row cell. The two sides see the edge quadrature points in the same
/// tangential order, so pointwise pairing is valid.
fn edge_block(
    space: &DgSpace,
    test_side: Side,
    trace_side: Side,
    n_out: [f64; 2],
    jac: f64,
    s: f64,
) -> [[f64; N_BASIS]; N_FLUX_BASIS] {
    let phi_test = &space.phi_side[side_index(test_side)];
    let phi_trace = &space.phi_side[side_index(trace_side)];
    let mut m = [[0.0; N_BASIS]; N_FLUX_BASIS];
    for q in 0..N_EDGE_QP {
        let w = s * jac * GAUSS_WEIGHTS[q];
        for comp in 0..2 {
            let nc = n_out[comp];
            if nc == 0.0 {
                continue;
            }
            for i in 0..N_BASIS {
                let ti = w * nc * phi_test[q][i];
                for j in 0..N_BASIS {
                    m[comp * N_BASIS + i][j] += ti * phi_trace[q][j];
                }
            }
        }
    }
    m
}

/// Which side of `cell` an interior edge lies on.
fn interior_side(e: &crate::mesh::InteriorEdge, cell: usize) -> Side {
    use crate::mesh::Axis;
    let first = cell == e.cells[0];
    match (e.axis, first) {
        (Axis::Vertical, true) => Side::Right,
        (Axis::Vertical, false) => Side::Left,
        (Axis::Horizontal, true) => Side::Top,
        (Axis::Horizontal, false) => Side::Bottom,
    }
}
