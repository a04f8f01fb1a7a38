//! Reduced symmetric system for the scalar unknown and flux recovery.
//!
//! Eliminating the flux from the mixed form leaves
//! `A u = G^T M^{-1} (g1 + m) + penalty lift + reaction source` with
//! `A = G^T M^{-1} G + penalty + reaction mass`, which is symmetric positive
//! definite and banded on the structured mesh. `A` is assembled once per
//! coefficient into a banded Cholesky factor; the flux is recovered per cell
//! afterwards as `q = M^{-1} (-G u + g1 + m)`.

use std::sync::Arc;

use crate::dgcore::basis::N_BASIS;
use crate::dgcore::linalg::chol_solve6;
use crate::dgcore::quad::{GAUSS_WEIGHTS, N_CELL_QP, N_EDGE_QP};
use crate::dgcore::space::{check_same_space, side_index, DgSpace, N_FLUX_BASIS};
use crate::dgcore::{BoundaryTrace, DgFunction, FluxField};
use crate::error::{Error, Result};
use crate::par;

use super::band::{BandCholesky, BandMatrix};
use super::operators::{LdgOperators, SigmaMass};

/// Coefficients and data of one scalar elliptic boundary value problem
/// `div(sigma grad u) - reaction * u = -source`, `u = dirichlet` on the
/// boundary.
#[derive(Clone)]
pub struct EllipticProblem {
    pub sigma: DgFunction,
    pub reaction: f64,
    pub source: Option<DgFunction>,
    pub dirichlet: Option<BoundaryTrace>,
}

/// Factorized reduced system for a fixed coefficient, reusable across
/// right-hand sides (several Dirichlet data sets, linearized sources, ...).
pub struct LdgSystem {
    ops: Arc<LdgOperators>,
    mass: SigmaMass,
    reaction: f64,
    factor: BandCholesky,
    source: Option<DgFunction>,
    dirichlet: Option<BoundaryTrace>,
}

/// One solve: scalar field, recovered flux, and the numerical boundary flux
/// trace (the scheme's conservative flux, including the penalty correction
/// on outflow edges).
pub struct LdgSolution {
    pub u: DgFunction,
    pub q: FluxField,
    pub flux: BoundaryTrace,
    /// Relative residual of the reduced linear system, from a matrix-free
    /// re-application of the operator to the solution.
    pub linear_residual: f64,
}

/// Builds the operators and factorizes the reduced system in one step.
pub fn assemble(
    space: &Arc<DgSpace>,
    problem: EllipticProblem,
    v: [f64; 2],
    alpha_stab_scale: f64,
) -> Result<LdgSystem> {
    let ops = LdgOperators::new(space, v, alpha_stab_scale)?;
    assemble_with(&ops, problem)
}

/// Factorizes the reduced system reusing already-built operators.
pub fn assemble_with(ops: &Arc<LdgOperators>, problem: EllipticProblem) -> Result<LdgSystem> {
    let space = ops.space();
    check_same_space(space, problem.sigma.space(), "conductivity")?;
    if let Some(src) = &problem.source {
        check_same_space(space, src.space(), "source")?;
    }
    if let Some(b) = &problem.dirichlet {
        check_same_space(space, b.space(), "boundary data")?;
    }
    if !problem.reaction.is_finite() || problem.reaction < 0.0 {
        return Err(Error::invalid(format!(
            "reaction coefficient must be finite and nonnegative, got {}",
            problem.reaction
        )));
    }
    let mass = ops.sigma_mass(&problem.sigma)?;
    let factor = assemble_matrix(ops, &mass, problem.reaction)?;
    Ok(LdgSystem {
        ops: ops.clone(),
        mass,
        reaction: problem.reaction,
        factor,
        source: problem.source,
        dirichlet: problem.dirichlet,
    })
}

impl LdgSystem {
    pub fn space(&self) -> &Arc<DgSpace> {
        self.ops.space()
    }

    pub fn ops(&self) -> &Arc<LdgOperators> {
        &self.ops
    }

    pub fn bandwidth(&self) -> usize {
        self.factor.bandwidth()
    }

    /// Solves with the data stored in the problem.
    pub fn solve(&self) -> Result<LdgSolution> {
        self.solve_parts(self.source.as_ref(), self.dirichlet.as_ref(), None)
    }

    /// Solves with the given Dirichlet data and no volume source.
    pub fn solve_dirichlet(&self, b: &BoundaryTrace) -> Result<LdgSolution> {
        check_same_space(self.space(), b.space(), "boundary data")?;
        self.solve_parts(None, Some(b), None)
    }

    /// Solves with the given volume source and homogeneous Dirichlet data.
    pub fn solve_source(&self, r: &DgFunction) -> Result<LdgSolution> {
        check_same_space(self.space(), r.space(), "source")?;
        self.solve_parts(Some(r), None, None)
    }

    /// Solves the linearized problem driven by a flux-equation source:
    /// `values[k * 16 + q]` holds a vector value at cell quadrature point
    /// `(k, q)`, tested against flux functions with the `1/sigma` weight.
    /// Boundary data is homogeneous.
    pub fn solve_mixed_source(&self, values: &[[f64; 2]]) -> Result<LdgSolution> {
        let n = self.space().n_cells();
        if values.len() != n * N_CELL_QP {
            return Err(Error::mismatch(format!(
                "mixed source has {} values, expected {}",
                values.len(),
                n * N_CELL_QP
            )));
        }
        self.solve_parts(None, None, Some(values))
    }

    /// Matrix-free action of the reduced operator (homogeneous boundary).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.ops.apply_reduced(Some(&self.mass), self.reaction, u)
    }

    /// Direct banded solve of `A x = f` for an arbitrary load vector.
    pub fn solve_load(&self, f: &[f64]) -> Vec<f64> {
        self.factor.solve(f)
    }

    /// Pointwise values of `q / sigma` (the unweighted solution gradient)
    /// at every cell quadrature point, in cell-major order.
    pub fn gradient_at_qps(&self, q: &FluxField) -> Result<Vec<[f64; 2]>> {
        check_same_space(self.space(), q.space(), "flux")?;
        let n = self.space().n_cells();
        let per_cell = par::map_indexed(n, |k| {
            let qv = q.eval_cell_qps(k);
            let mut out = [[0.0; 2]; N_CELL_QP];
            for (i, g) in out.iter_mut().enumerate() {
                let w = self.mass.inv_qp[k * N_CELL_QP + i];
                *g = [qv[i][0] * w, qv[i][1] * w];
            }
            out
        });
        Ok(per_cell.into_iter().flatten().collect())
    }

    fn solve_parts(
        &self,
        source: Option<&DgFunction>,
        dirichlet: Option<&BoundaryTrace>,
        qp_source: Option<&[[f64; 2]]>,
    ) -> Result<LdgSolution> {
        let space = self.space();
        let n = space.n_cells();

        // Flux-equation load z = boundary lift + linearized source.
        let mut z = match dirichlet {
            Some(b) => self.ops.boundary_lift(b),
            None => vec![0.0; n * N_FLUX_BASIS],
        };
        if let Some(vals) = qp_source {
            self.add_mixed_source(vals, &mut z);
        }

        // Scalar-equation load.
        let mut f = vec![0.0; n * N_BASIS];
        if let Some(r) = source {
            for k in 0..n {
                let rk: [f64; N_BASIS] =
                    r.coeffs()[k * N_BASIS..(k + 1) * N_BASIS].try_into().unwrap();
                let mr = space.cell_mass_apply(&rk);
                f[k * N_BASIS..(k + 1) * N_BASIS].copy_from_slice(&mr);
            }
        }
        if let Some(b) = dirichlet {
            for (a, p) in f.iter_mut().zip(self.ops.penalty_lift(b)) {
                *a += p;
            }
        }
        let mut w = z.clone();
        self.ops.mass_solve_flux(Some(&self.mass), &mut w);
        for (a, g) in f.iter_mut().zip(self.ops.apply_g_transpose(&w)) {
            *a += g;
        }

        let u = self.factor.solve(&f);

        // Residual check against the matrix-free operator.
        let au = self.apply(&u);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..f.len() {
            num += (au[i] - f[i]) * (au[i] - f[i]);
            den += f[i] * f[i];
        }
        let linear_residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
        if !linear_residual.is_finite() || linear_residual > 1e-6 {
            return Err(Error::SolverFailure(format!(
                "reduced solve residual {linear_residual:e} exceeds tolerance"
            )));
        }

        // Flux recovery q = M^{-1} (z - G u).
        let gu = self.ops.apply_g(&u);
        for (a, g) in z.iter_mut().zip(&gu) {
            *a -= g;
        }
        self.ops.mass_solve_flux(Some(&self.mass), &mut z);
        let q = FluxField::from_coeffs(space, z)?;
        let u = DgFunction::from_coeffs(space, u)?;
        let flux = self.numerical_boundary_flux(&u, &q, dirichlet);
        Ok(LdgSolution { u, q, flux, linear_residual })
    }

    fn add_mixed_source(&self, values: &[[f64; 2]], z: &mut [f64]) {
        let space = self.space();
        let jac = space.cell_jacobian();
        let n = space.n_cells();
        let adds = par::map_indexed(n, |k| {
            let mut out = [0.0; N_FLUX_BASIS];
            for q in 0..N_CELL_QP {
                let wq = jac * space.cell_qp_w[q] * self.mass.inv_qp[k * N_CELL_QP + q];
                let v = values[k * N_CELL_QP + q];
                for comp in 0..2 {
                    let c = wq * v[comp];
                    if c != 0.0 {
                        for j in 0..N_BASIS {
                            out[comp * N_BASIS + j] += c * space.phi_cell[q][j];
                        }
                    }
                }
            }
            out
        });
        for (k, add) in adds.iter().enumerate() {
            for (a, b) in z[k * N_FLUX_BASIS..(k + 1) * N_FLUX_BASIS].iter_mut().zip(add) {
                *a += b;
            }
        }
    }

    /// The scheme's boundary flux trace: `q . n` on inflow edges and
    /// `q . n - alpha_e (u - b)` on outflow edges. This is the trace whose
    /// total over the whole boundary vanishes exactly for a conservative
    /// (reaction- and source-free) solve.
    pub fn numerical_boundary_flux(
        &self,
        u: &DgFunction,
        q: &FluxField,
        dirichlet: Option<&BoundaryTrace>,
    ) -> BoundaryTrace {
        let space = self.space();
        let mut values = Vec::with_capacity(self.ops.boundary.len() * N_EDGE_QP);
        for (e_idx, info) in self.ops.boundary.iter().enumerate() {
            let qn = normal_component(q, info);
            if info.outflow {
                let uv = u.eval_side_qps(info.cell, info.side);
                for qp in 0..N_EDGE_QP {
                    let b = dirichlet.map_or(0.0, |d| d.edge_values(e_idx)[qp]);
                    values.push(qn[qp] - info.alpha * (uv[qp] - b));
                }
            } else {
                values.extend_from_slice(&qn);
            }
        }
        BoundaryTrace::from_values(space, values).expect("edge-major trace length")
    }
}

/// Plain normal trace `q . n` of a flux field on the boundary, without the
/// penalty correction.
pub fn boundary_flux(u: &DgFunction, q: &FluxField) -> Result<BoundaryTrace> {
    check_same_space(u.space(), q.space(), "flux")?;
    let space = u.space();
    let mut values = Vec::with_capacity(space.mesh.boundary_edges.len() * N_EDGE_QP);
    for e in &space.mesh.boundary_edges {
        let qx = q.eval_side_qps(e.cell, e.side, 0);
        let qy = q.eval_side_qps(e.cell, e.side, 1);
        for qp in 0..N_EDGE_QP {
            values.push(qx[qp] * e.normal[0] + qy[qp] * e.normal[1]);
        }
    }
    BoundaryTrace::from_values(space, values)
}

fn normal_component(q: &FluxField, info: &super::operators::BoundaryEdgeInfo) -> [f64; N_EDGE_QP] {
    let qx = q.eval_side_qps(info.cell, info.side, 0);
    let qy = q.eval_side_qps(info.cell, info.side, 1);
    let mut out = [0.0; N_EDGE_QP];
    for qp in 0..N_EDGE_QP {
        out[qp] = qx[qp] * info.normal[0] + qy[qp] * info.normal[1];
    }
    out
}

/// Assembles `G^T M^{-1} G + penalty + reaction mass` into a banded matrix
/// and factorizes it.
fn assemble_matrix(
    ops: &Arc<LdgOperators>,
    mass: &SigmaMass,
    reaction: f64,
) -> Result<BandCholesky> {
    let space = ops.space();
    let n_cells = space.n_cells();
    let n = n_cells * N_BASIS;

    // Bandwidth from the actual coupling pattern.
    let mut bw = N_BASIS - 1;
    for k in 0..n_cells {
        let cols: Vec<usize> = ops.row_blocks(k).map(|(c, _)| c).collect();
        for &ci in &cols {
            for &cj in &cols {
                let d = ci.abs_diff(cj) * N_BASIS + N_BASIS - 1;
                bw = bw.max(d);
            }
        }
    }

    let mut a = BandMatrix::zeros(n, bw);

    // Per-cell contributions B_i^T M^{-1} B_j for every ordered pair of
    // blocks with col_i >= col_j (the lower triangle of A).
    type PairBlock = (usize, usize, [[f64; N_BASIS]; N_BASIS]);
    let contribs: Vec<Vec<PairBlock>> = par::map_indexed(n_cells, |k| {
        let blocks: Vec<(usize, &[[f64; N_BASIS]; N_FLUX_BASIS])> = ops.row_blocks(k).collect();
        // W_j = M_k^{-1} B_j, component by component, column by column.
        let mut solved: Vec<[[f64; N_BASIS]; N_FLUX_BASIS]> = Vec::with_capacity(blocks.len());
        for (_, b) in &blocks {
            let mut w = [[0.0; N_BASIS]; N_FLUX_BASIS];
            for comp in 0..2 {
                for col in 0..N_BASIS {
                    let mut rhs = [0.0; N_BASIS];
                    for row in 0..N_BASIS {
                        rhs[row] = b[comp * N_BASIS + row][col];
                    }
                    let x = chol_solve6(&mass.chol[k], &rhs);
                    for row in 0..N_BASIS {
                        w[comp * N_BASIS + row][col] = x[row];
                    }
                }
            }
            solved.push(w);
        }
        let mut out = Vec::new();
        for (ci, mb_i) in blocks.iter() {
            for (bj, (cj, _)) in blocks.iter().enumerate() {
                if ci < cj {
                    continue;
                }
                let wj = &solved[bj];
                let mut t = [[0.0; N_BASIS]; N_BASIS];
                for row in 0..N_FLUX_BASIS {
                    for p in 0..N_BASIS {
                        let bip = mb_i[row][p];
                        if bip != 0.0 {
                            for r in 0..N_BASIS {
                                t[p][r] += bip * wj[row][r];
                            }
                        }
                    }
                }
                out.push((*ci, *cj, t));
            }
        }
        out
    });
    for list in &contribs {
        for (ci, cj, t) in list {
            add_block(&mut a, *ci, *cj, t);
        }
    }

    // Outflow penalty: edge mass matrices on the diagonal blocks.
    for info in &ops.boundary {
        if !info.outflow {
            continue;
        }
        let phi = &space.phi_side[side_index(info.side)];
        let mut e = [[0.0; N_BASIS]; N_BASIS];
        for q in 0..N_EDGE_QP {
            let w = info.alpha * info.jac * GAUSS_WEIGHTS[q];
            for i in 0..N_BASIS {
                for j in 0..N_BASIS {
                    e[i][j] += w * phi[q][i] * phi[q][j];
                }
            }
        }
        add_block(&mut a, info.cell, info.cell, &e);
    }

    // Reaction term: scaled cell mass on the diagonal blocks.
    if reaction != 0.0 {
        let jac = space.cell_jacobian();
        let mut m = [[0.0; N_BASIS]; N_BASIS];
        for i in 0..N_BASIS {
            for j in 0..N_BASIS {
                m[i][j] = reaction * jac * space.mass_ref[i][j];
            }
        }
        for k in 0..n_cells {
            add_block(&mut a, k, k, &m);
        }
    }

    a.cholesky()
}

/// Adds a 6x6 block at cell block position (ci, cj), lower triangle only.
fn add_block(a: &mut BandMatrix, ci: usize, cj: usize, t: &[[f64; N_BASIS]; N_BASIS]) {
    debug_assert!(ci >= cj);
    if ci == cj {
        for p in 0..N_BASIS {
            for r in 0..=p {
                a.add(ci * N_BASIS + p, cj * N_BASIS + r, t[p][r]);
            }
        }
    } else {
        for p in 0..N_BASIS {
            for r in 0..N_BASIS {
                a.add(ci * N_BASIS + p, cj * N_BASIS + r, t[p][r]);
            }
        }
    }
}
