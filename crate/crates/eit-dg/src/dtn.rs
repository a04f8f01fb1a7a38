//! Boundary current map and its linearization.
//!
//! For a conductivity `sigma` and boundary voltage `f`, the forward map
//! solves `div(sigma grad u) = 0`, `u = f` on the boundary, and returns the
//! outgoing current trace `sigma du/dnu`. [`ForwardCache`] factorizes the
//! conductivity operator once and keeps the solutions of every measurement,
//! so that applying the derivative of the map (one linearized solve per
//! call) and its adjoint (one adjoint solve plus one smoothing solve) reuse
//! the factorization.
//!
//! The derivative of the map in `sigma` is exact for the discrete scheme:
//! perturbing the coefficient only touches the `1/sigma`-weighted flux mass
//! term, so the directional derivative solves the same system driven by the
//! mixed source `dsigma * grad u_j`. The adjoint pulls a boundary residual
//! `phi` back into the volume: with `u*` the forward solution for boundary
//! data `phi`, the pairing `<DF dsigma, phi>` on the boundary equals
//! `(dsigma, grad u_j . grad u*)` over the domain, and the returned update
//! direction is the Riesz representative of that functional in H1, i.e. the
//! solution of `-lap(w) + w = grad u_j . grad u*` with `w = 0` on the
//! boundary.

use std::sync::Arc;

use crate::dgcore::quad::N_CELL_QP;
use crate::dgcore::space::check_same_space;
use crate::dgcore::{BoundaryTrace, DgFunction, DgSpace, FluxField};
use crate::error::{Error, Result};
use crate::mdldg::{assemble, EllipticProblem, LdgSystem, DEFAULT_FLOW, DEFAULT_STAB_SCALE};

/// One boundary measurement solved against the cached conductivity:
/// the interior voltage, its weighted flux, the boundary current, and the
/// unweighted gradient sampled at cell quadrature points.
pub struct MeasurementSolution {
    pub u: DgFunction,
    pub q: FluxField,
    pub flux: BoundaryTrace,
    grad_qp: Vec<[f64; 2]>,
}

impl MeasurementSolution {
    /// `grad u` at cell quadrature points, cell-major.
    pub fn gradient_qp(&self) -> &[[f64; 2]] {
        &self.grad_qp
    }
}

/// A conductivity with its factorized forward operator and the solutions of
/// a fixed set of boundary measurements.
pub struct ForwardCache {
    sigma: DgFunction,
    system: LdgSystem,
    measurements: Vec<MeasurementSolution>,
}

impl ForwardCache {
    /// Factorizes the operator for `sigma` and solves one forward problem
    /// per boundary datum.
    pub fn new(sigma: &DgFunction, boundary_data: &[BoundaryTrace]) -> Result<Self> {
        let space = sigma.space();
        let problem = EllipticProblem {
            sigma: sigma.clone(),
            reaction: 0.0,
            source: None,
            dirichlet: None,
        };
        let system = assemble(space, problem, DEFAULT_FLOW, DEFAULT_STAB_SCALE)?;
        let mut measurements = Vec::with_capacity(boundary_data.len());
        for f in boundary_data {
            let sol = system.solve_dirichlet(f)?;
            let grad_qp = system.gradient_at_qps(&sol.q)?;
            measurements.push(MeasurementSolution { u: sol.u, q: sol.q, flux: sol.flux, grad_qp });
        }
        Ok(Self { sigma: sigma.clone(), system, measurements })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        self.system.space()
    }

    pub fn sigma(&self) -> &DgFunction {
        &self.sigma
    }

    pub fn system(&self) -> &LdgSystem {
        &self.system
    }

    pub fn n_measurements(&self) -> usize {
        self.measurements.len()
    }

    pub fn measurement(&self, j: usize) -> &MeasurementSolution {
        &self.measurements[j]
    }

    fn measurement_checked(&self, j: usize) -> Result<&MeasurementSolution> {
        self.measurements.get(j).ok_or_else(|| {
            Error::mismatch(format!(
                "measurement index {j} out of range ({} cached)",
                self.measurements.len()
            ))
        })
    }

    /// Directional derivative of the boundary current map at the cached
    /// conductivity, in the direction `dsigma`, for measurement `j`.
    ///
    /// Solves the cached system driven by the mixed source
    /// `dsigma * grad u_j` with homogeneous boundary data and returns the
    /// boundary current of the linearized solution.
    pub fn df_apply(&self, j: usize, dsigma: &DgFunction) -> Result<BoundaryTrace> {
        let m = self.measurement_checked(j)?;
        check_same_space(self.space(), dsigma.space(), "perturbation")?;
        let n = self.space().n_cells();
        let mut values = Vec::with_capacity(n * N_CELL_QP);
        for k in 0..n {
            let ds = dsigma.eval_cell_qps(k);
            for (qp, d) in ds.iter().enumerate() {
                let g = m.grad_qp[k * N_CELL_QP + qp];
                values.push([d * g[0], d * g[1]]);
            }
        }
        Ok(self.system.solve_mixed_source(&values)?.flux)
    }

    /// Adjoint of [`Self::df_apply`] against the H1 inner product: maps a
    /// boundary residual `phi` to the interior update direction `w` solving
    /// `-lap(w) + w = grad u_j . grad u*`, `w = 0` on the boundary, where
    /// `u*` is the forward solution with boundary data `phi`.
    pub fn df_adjoint_apply(
        &self,
        j: usize,
        phi: &BoundaryTrace,
        sobolev: &SobolevSolver,
    ) -> Result<DgFunction> {
        let m = self.measurement_checked(j)?;
        check_same_space(self.space(), phi.space(), "boundary residual")?;
        check_same_space(self.space(), sobolev.space(), "smoothing solver")?;
        let star = self.system.solve_dirichlet(phi)?;
        let grad_star = self.system.gradient_at_qps(&star.q)?;
        let s: Vec<f64> = m
            .grad_qp
            .iter()
            .zip(&grad_star)
            .map(|(a, b)| a[0] * b[0] + a[1] * b[1])
            .collect();
        let s = DgFunction::project_qp_values(self.space(), &s)?;
        Ok(sobolev.solve(&s)?.u)
    }
}

/// Factorized `-lap(w) + w` operator with homogeneous Dirichlet data. One
/// instance per mesh serves every adjoint application and the regularization
/// smoothing of the inversion.
pub struct SobolevSolver {
    system: LdgSystem,
}

impl SobolevSolver {
    pub fn new(space: &Arc<DgSpace>) -> Result<Self> {
        let problem = EllipticProblem {
            sigma: DgFunction::constant(space, 1.0),
            reaction: 1.0,
            source: None,
            dirichlet: None,
        };
        let system = assemble(space, problem, DEFAULT_FLOW, DEFAULT_STAB_SCALE)?;
        Ok(Self { system })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        self.system.space()
    }

    pub fn system(&self) -> &LdgSystem {
        &self.system
    }

    /// Solves `-lap(w) + w = s`, `w = 0` on the boundary.
    pub fn solve(&self, s: &DgFunction) -> Result<crate::mdldg::LdgSolution> {
        self.system.solve_source(s)
    }
}

/// One-shot forward map: voltage-to-current for a single boundary datum.
pub fn forward_map(
    sigma: &DgFunction,
    f: &BoundaryTrace,
) -> Result<(DgFunction, FluxField, BoundaryTrace)> {
    check_same_space(sigma.space(), f.space(), "boundary data")?;
    let problem = EllipticProblem {
        sigma: sigma.clone(),
        reaction: 0.0,
        source: None,
        dirichlet: Some(f.clone()),
    };
    let sol = assemble(sigma.space(), problem, DEFAULT_FLOW, DEFAULT_STAB_SCALE)?.solve()?;
    Ok((sol.u, sol.q, sol.flux))
}
