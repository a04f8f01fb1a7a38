//! Regularized output least squares for the interior conductivity.
//!
//! The misfit `1/2 sum_j ||F(sigma, f_j) - g_j||^2` over the boundary plus
//! the Tikhonov term `alpha/2 ||sigma - sigma0||^2` in H1 is minimized by
//! Gauss-Newton steps. Each step solves the normal equation
//!
//! ```text
//! (sum_j (DF)* DF + alpha (Id - lap)) dsigma
//!     = sum_j (DF)* (g_j - F_j) - alpha (Id - lap)(sigma - sigma0)
//! ```
//!
//! with an inner conjugate-gradient iteration whose step and stopping rules
//! are spelled out in [`cg_solve`]. The outer loop stops by the discrepancy
//! principle (`misfit <= tau * delta`) when the data carry noise, and by an
//! absolute floor or misfit stagnation when they do not.
//!
//! Two inner products coexist here by construction: the adjoint returns H1
//! Riesz representatives (smoothed updates), while the CG recurrence
//! measures residuals in L2. The iteration below follows that prescription
//! literally rather than reconciling the two spaces.

use std::sync::Arc;

use crate::dgcore::basis::N_BASIS;
use crate::dgcore::inner::{inner_boundary, inner_l2, inner_l2_flux};
use crate::dgcore::space::check_same_space;
use crate::dgcore::{BoundaryTrace, DgFunction, DgSpace};
use crate::dtn::{ForwardCache, SobolevSolver};
use crate::error::{Error, Result};
use crate::mdldg::LdgOperators;
use crate::par;

/// Misfit level below which a noise-free reconstruction is converged.
const NOISE_FREE_MISFIT_FLOOR: f64 = 1e-8;

/// Relative misfit reduction per outer iteration below which a noise-free
/// reconstruction has stagnated.
const NOISE_FREE_STAGNATION: f64 = 1e-3;

/// Parameters of the regularized Gauss-Newton iteration.
#[derive(Clone)]
pub struct InverseConfig {
    /// Tikhonov weight of the H1 distance to `sigma0`.
    pub alpha_reg: f64,
    /// Discrepancy factor: stop once the misfit falls below `tau * delta`.
    pub tau: f64,
    /// Inner stopping factor: accept the update once the linearized misfit
    /// falls below `rho` times the current misfit.
    pub rho: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Initial guess and regularization anchor.
    pub sigma0: DgFunction,
}

impl InverseConfig {
    /// Defaults: `tau = 3`, `rho = 0.9`, `alpha = 1e-8`, 50 iterations for
    /// both loops.
    pub fn new(sigma0: DgFunction) -> Self {
        Self { alpha_reg: 1e-8, tau: 3.0, rho: 0.9, max_outer: 50, max_inner: 50, sigma0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_reg.is_finite() && self.alpha_reg >= 0.0) {
            return Err(Error::invalid(format!(
                "regularization weight must be finite and nonnegative, got {}",
                self.alpha_reg
            )));
        }
        if !(self.tau.is_finite() && self.tau > 1.0) {
            return Err(Error::invalid(format!("tau must exceed 1, got {}", self.tau)));
        }
        if !(self.rho.is_finite() && self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::invalid(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        // The inner tolerance and the discrepancy factor must be compatible,
        // otherwise the accepted linearization error can exceed the noise
        // margin the outer loop is aiming for.
        if self.rho * self.rho * self.tau <= 2.0 {
            return Err(Error::invalid(format!(
                "rho^2 tau = {} must exceed 2",
                self.rho * self.rho * self.tau
            )));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::invalid("iteration limits must be positive"));
        }
        Ok(())
    }
}

/// Boundary voltage/current pairs driving a reconstruction, plus the noise
/// bound `delta` used by the discrepancy rule.
pub struct Measurements {
    pairs: Vec<(BoundaryTrace, BoundaryTrace)>,
    delta: f64,
}

impl Measurements {
    pub fn new(pairs: Vec<(BoundaryTrace, BoundaryTrace)>, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::invalid(format!("delta must be finite and nonnegative: {delta}")));
        }
        if let Some((f0, _)) = pairs.first() {
            for (f, g) in &pairs {
                check_same_space(f0.space(), f.space(), "voltage trace")?;
                check_same_space(f0.space(), g.space(), "current trace")?;
            }
        }
        Ok(Self { pairs, delta })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Applied boundary voltage of measurement `j`.
    pub fn voltage(&self, j: usize) -> &BoundaryTrace {
        &self.pairs[j].0
    }

    /// Measured boundary current of measurement `j`.
    pub fn current(&self, j: usize) -> &BoundaryTrace {
        &self.pairs[j].1
    }

    pub fn voltages(&self) -> Vec<BoundaryTrace> {
        self.pairs.iter().map(|(f, _)| f.clone()).collect()
    }
}

/// One finished outer iteration.
#[derive(Clone, Copy, Debug)]
pub struct IterationRecord {
    pub k: usize,
    /// Data misfit after the update.
    pub misfit: f64,
    pub inner_iterations: usize,
    /// H1 norm of the applied update.
    pub dsigma_h1: f64,
}

/// Current conductivity iterate with its forward solutions and history.
pub struct ReconstructionState {
    pub sigma: DgFunction,
    pub iteration: usize,
    pub cache: ForwardCache,
    /// `sum_j ||F(sigma, f_j) - g_j||` over the boundary.
    pub misfit: f64,
    pub history: Vec<IterationRecord>,
}

impl ReconstructionState {
    /// Solves the forward problems for `sigma` and evaluates the misfit.
    pub fn initial(sigma: DgFunction, meas: &Measurements) -> Result<Self> {
        let cache = ForwardCache::new(&sigma, &meas.voltages())?;
        let misfit = data_misfit(&cache, meas)?;
        Ok(Self { sigma, iteration: 0, cache, misfit, history: Vec::new() })
    }
}

/// `sum_j ||F_j - g_j||` over the boundary for the cached forward solutions.
pub fn data_misfit(cache: &ForwardCache, meas: &Measurements) -> Result<f64> {
    let mut total = 0.0;
    for j in 0..meas.len() {
        let diff = cache.measurement(j).flux.sub(meas.current(j))?;
        total += inner_boundary(&diff, &diff)?.sqrt();
    }
    Ok(total)
}

/// The regularized objective
/// `1/2 sum_j ||F_j - g_j||^2 + alpha/2 ||sigma - sigma0||_H1^2`.
pub fn objective(
    state: &ReconstructionState,
    meas: &Measurements,
    cfg: &InverseConfig,
) -> Result<f64> {
    let mut value = 0.0;
    for j in 0..meas.len() {
        let diff = state.cache.measurement(j).flux.sub(meas.current(j))?;
        value += 0.5 * inner_boundary(&diff, &diff)?;
    }
    if cfg.alpha_reg > 0.0 {
        let v = state.sigma.sub(&cfg.sigma0)?;
        let ops = state.cache.system().ops();
        let gv = ops.lifted_gradient(&v, true)?;
        value += 0.5 * cfg.alpha_reg * (inner_l2(&v, &v)? + inner_l2_flux(&gv, &gv)?);
    }
    Ok(value)
}

/// H1 norm with the zero-trace lifted gradient.
fn h1_norm(ops: &LdgOperators, v: &DgFunction) -> Result<f64> {
    let gv = ops.lifted_gradient(v, true)?;
    Ok((inner_l2(v, v)? + inner_l2_flux(&gv, &gv)?).sqrt())
}

/// Applies `M^{-1} K` where `K` is the zero-trace weak Laplacian: gradient
/// lift, unweighted flux mass solve, divergence transpose, scalar mass solve.
fn smoothing_application(ops: &LdgOperators, p: &DgFunction) -> Result<DgFunction> {
    let space = ops.space();
    let mut g = ops.apply_g(p.coeffs());
    ops.mass_solve_flux(None, &mut g);
    let load = ops.apply_g_transpose(&g);
    let mut out = vec![0.0; load.len()];
    for k in 0..space.n_cells() {
        let lk: [f64; N_BASIS] = load[k * N_BASIS..(k + 1) * N_BASIS].try_into().unwrap();
        out[k * N_BASIS..(k + 1) * N_BASIS].copy_from_slice(&space.cell_mass_solve(&lk));
    }
    DgFunction::from_coeffs(space, out)
}

/// Sums `df_adjoint_apply(j, t_j)` over the measurements, in index order.
fn adjoint_sum(
    cache: &ForwardCache,
    sobolev: &SobolevSolver,
    traces: &[BoundaryTrace],
) -> Result<DgFunction> {
    let parts = par::map_indexed(traces.len(), |j| cache.df_adjoint_apply(j, &traces[j], sobolev));
    let mut out = DgFunction::zeros(sobolev.space());
    for part in parts {
        out.axpy(1.0, &part?)?;
    }
    Ok(out)
}

/// The Gauss-Newton normal operator
/// `p -> sum_j (DF)* DF p + alpha (Id + M^{-1} K) p`.
pub fn apply_normal_operator(
    state: &ReconstructionState,
    sobolev: &SobolevSolver,
    p: &DgFunction,
    cfg: &InverseConfig,
) -> Result<DgFunction> {
    let m = state.cache.n_measurements();
    let dfp = par::map_indexed(m, |j| state.cache.df_apply(j, p));
    let dfp: Vec<BoundaryTrace> = dfp.into_iter().collect::<Result<_>>()?;
    let mut out = adjoint_sum(&state.cache, sobolev, &dfp)?;
    if cfg.alpha_reg > 0.0 {
        out.axpy(cfg.alpha_reg, p)?;
        out.axpy(cfg.alpha_reg, &smoothing_application(sobolev.system().ops(), p)?)?;
    }
    Ok(out)
}

/// Result of one inner conjugate-gradient run.
pub struct CgOutcome {
    pub update: DgFunction,
    pub iterations: usize,
    /// The alpha_l denominator vanished or lost finiteness; the update is
    /// the last valid iterate.
    pub breakdown: bool,
    /// Linearized misfit `sum_j ||g_j - F_j - DF dsigma_l||` per iterate,
    /// starting with iterate 0 (the plain misfit).
    pub linearized_misfits: Vec<f64>,
    /// H1 norm of the returned update.
    pub update_h1: f64,
}

/// Conjugate gradients on the Gauss-Newton normal equation.
///
/// Starting from `dsigma_0 = 0`, `p_0 = r_0` (the negative gradient of the
/// regularized objective at the current iterate), each step uses
///
/// ```text
/// a_l = ||r||^2_L2 / (sum_j ||DF p||^2_bnd + alpha ||p||^2 + alpha ||grad p||^2)
/// ```
///
/// updates `dsigma`, `r`, and `p = r + (||r_new||^2/||r||^2) p`, and stops
/// once the linearized misfit falls below `rho` times the entering misfit,
/// or after `max_inner` steps, or on denominator breakdown.
pub fn cg_solve(
    state: &ReconstructionState,
    sobolev: &SobolevSolver,
    meas: &Measurements,
    cfg: &InverseConfig,
) -> Result<CgOutcome> {
    let space = state.sigma.space();
    check_same_space(space, sobolev.space(), "smoothing solver")?;
    let ops = sobolev.system().ops();
    let m = meas.len();
    let alpha = cfg.alpha_reg;

    // Residual traces e_j = g_j - F_j and the entering misfit.
    let mut residuals = Vec::with_capacity(m);
    for j in 0..m {
        residuals.push(meas.current(j).sub(&state.cache.measurement(j).flux)?);
    }
    let misfit: f64 = residuals
        .iter()
        .map(|e| inner_boundary(e, e).map(f64::sqrt))
        .sum::<Result<f64>>()?;

    // r_0 = sum_j (DF)* e_j - alpha (Id + M^{-1} K)(sigma - sigma0).
    let mut r = adjoint_sum(&state.cache, sobolev, &residuals)?;
    if alpha > 0.0 {
        let v = state.sigma.sub(&cfg.sigma0)?;
        r.axpy(-alpha, &v)?;
        r.axpy(-alpha, &smoothing_application(ops, &v)?)?;
    }

    let mut update = DgFunction::zeros(space);
    let mut linearized = vec![misfit];
    let mut rr = inner_l2(&r, &r)?;
    let rr_floor = rr * 1e-28;
    if rr == 0.0 {
        return Ok(CgOutcome {
            update,
            iterations: 0,
            breakdown: false,
            linearized_misfits: linearized,
            update_h1: 0.0,
        });
    }

    let mut p = r.clone();
    let mut df_sums = vec![BoundaryTrace::zeros(space); m];
    let mut breakdown = false;
    let mut iterations = 0;
    let target = cfg.rho * misfit;

    for _ in 0..cfg.max_inner {
        let dfp = par::map_indexed(m, |j| state.cache.df_apply(j, &p));
        let dfp: Vec<BoundaryTrace> = dfp.into_iter().collect::<Result<_>>()?;
        let mut den = 0.0;
        for t in &dfp {
            den += inner_boundary(t, t)?;
        }
        if alpha > 0.0 {
            let gp = ops.lifted_gradient(&p, true)?;
            den += alpha * (inner_l2(&p, &p)? + inner_l2_flux(&gp, &gp)?);
        }
        if !(den.is_finite() && den > 0.0) {
            breakdown = true;
            break;
        }
        let step = rr / den;

        update.axpy(step, &p)?;
        let mut lin = 0.0;
        for j in 0..m {
            df_sums[j].axpy(step, &dfp[j])?;
            let rem = residuals[j].sub(&df_sums[j])?;
            lin += inner_boundary(&rem, &rem)?.sqrt();
        }
        linearized.push(lin);
        iterations += 1;
        if lin < target {
            break;
        }

        // r <- r - step * (normal operator applied to p).
        let mut ap = adjoint_sum(&state.cache, sobolev, &dfp)?;
        if alpha > 0.0 {
            ap.axpy(alpha, &p)?;
            ap.axpy(alpha, &smoothing_application(ops, &p)?)?;
        }
        r.axpy(-step, &ap)?;
        let rr_next = inner_l2(&r, &r)?;
        if !rr_next.is_finite() {
            breakdown = true;
            break;
        }
        if rr_next <= rr_floor {
            break;
        }
        let beta = rr_next / rr;
        rr = rr_next;
        p.scale(beta);
        p.axpy(1.0, &r)?;
    }

    let update_h1 = h1_norm(ops, &update)?;
    Ok(CgOutcome { update, iterations, breakdown, linearized_misfits: linearized, update_h1 })
}

fn outer_context(k: usize, e: Error) -> Error {
    match e {
        Error::SolverFailure(m) => Error::SolverFailure(format!("outer iteration {k}: {m}")),
        Error::CoefficientRange(m) => {
            Error::CoefficientRange(format!("outer iteration {k}: {m}"))
        }
        other => other,
    }
}

/// Whether the outer loop is done before attempting another update.
fn outer_converged(misfit: f64, previous: f64, delta: f64, tau: f64) -> bool {
    if delta > 0.0 {
        return misfit <= tau * delta;
    }
    if misfit < NOISE_FREE_MISFIT_FLOOR {
        return true;
    }
    previous.is_finite() && previous > 0.0 && (previous - misfit) / previous < NOISE_FREE_STAGNATION
}

/// Gauss-Newton outer loop: repeat `sigma <- sigma + cg_solve(...)` until
/// the discrepancy criterion (noisy data), the misfit floor or stagnation
/// (noise-free data), or the iteration cap.
pub fn gauss_newton(
    meas: &Measurements,
    cfg: &InverseConfig,
    space: &Arc<DgSpace>,
) -> Result<ReconstructionState> {
    cfg.validate()?;
    check_same_space(space, cfg.sigma0.space(), "initial guess")?;
    if !meas.is_empty() {
        check_same_space(space, meas.voltage(0).space(), "measurements")?;
    }
    let sobolev = SobolevSolver::new(space)?;
    let mut state = ReconstructionState::initial(cfg.sigma0.clone(), meas)?;
    let mut previous = f64::INFINITY;

    while state.iteration < cfg.max_outer
        && !outer_converged(state.misfit, previous, meas.delta(), cfg.tau)
    {
        let k = state.iteration;
        let cg = cg_solve(&state, &sobolev, meas, cfg).map_err(|e| outer_context(k, e))?;

        let mut sigma = state.sigma.clone();
        sigma.axpy(1.0, &cg.update)?;
        let cache =
            ForwardCache::new(&sigma, &meas.voltages()).map_err(|e| outer_context(k, e))?;
        let misfit = data_misfit(&cache, meas)?;

        previous = state.misfit;
        state.sigma = sigma;
        state.cache = cache;
        state.misfit = misfit;
        state.iteration += 1;
        state.history.push(IterationRecord {
            k,
            misfit,
            inner_iterations: cg.iterations,
            dsigma_h1: cg.update_h1,
        });
    }
    Ok(state)
}
