//! Synthetic boundary data: forward solves on a strictly finer mesh,
//! pointwise restriction of the numerical flux to the reconstruction mesh,
//! and seeded multiplicative Gaussian noise.

use std::io::{self, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dgcore::inner::inner_boundary;
use crate::dgcore::quad::{GAUSS_NODES, N_EDGE_QP};
use crate::dgcore::{BoundaryTrace, DgFunction, DgSpace};
use crate::error::{Error, Result};
use crate::inverse::Measurements;
use crate::mdldg::{assemble, EllipticProblem, LdgSystem, DEFAULT_FLOW, DEFAULT_STAB_SCALE};
use crate::mesh::Side;

use super::measurements::{measurement_suite, pattern, N_MEASUREMENTS};
use super::phantoms::Phantom;

/// Multiplicative noise `g -> g + epsilon * |g| * xi` with `xi` standard
/// normal, drawn from a ChaCha8 stream seeded with `seed`; one draw per
/// measurement and boundary quadrature point, in storage order. Identical
/// seeds give bitwise identical data on every platform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub epsilon: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn none() -> Self {
        NoiseModel { epsilon: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::invalid(format!("noise level {} out of range", self.epsilon)));
        }
        Ok(())
    }
}

/// Noisy measurements plus the noise-free fluxes they were derived from.
pub struct SyntheticData {
    pub measurements: Measurements,
    pub clean: Vec<BoundaryTrace>,
}

impl SyntheticData {
    /// One CSV per measurement: quadrature-point locations with the applied
    /// voltage and the clean and noisy current densities.
    pub fn write_csv(&self, j: usize, out: &mut impl Write) -> io::Result<()> {
        let f = self.measurements.voltage(j);
        let g_noisy = self.measurements.current(j);
        let g_true = &self.clean[j];
        let space = f.space();
        writeln!(out, "edge,qp,x,y,f,g_true,g_noisy")?;
        for (e_idx, e) in space.mesh.boundary_edges.iter().enumerate() {
            for (qp, &t) in GAUSS_NODES.iter().enumerate() {
                let [x, y] = e.point(t);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    e_idx,
                    qp,
                    x,
                    y,
                    f.get(e_idx, qp),
                    g_true.get(e_idx, qp),
                    g_noisy.get(e_idx, qp)
                )?;
            }
        }
        Ok(())
    }
}

/// Locates the fine boundary edge under any point of a coarser boundary,
/// assuming both meshes cover the same rectangle.
struct BoundaryLocator<'a> {
    space: &'a Arc<DgSpace>,
    /// edge index per side, ordered along the side
    by_side: [Vec<usize>; 4],
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::Bottom => 2,
        Side::Top => 3,
    }
}

impl<'a> BoundaryLocator<'a> {
    fn new(space: &'a Arc<DgSpace>) -> Self {
        let mesh = &space.mesh;
        let mut by_side: [Vec<usize>; 4] = Default::default();
        for (idx, e) in mesh.boundary_edges.iter().enumerate() {
            let i = e.cell % mesh.nx;
            let j = e.cell / mesh.nx;
            let along = match e.side {
                Side::Bottom | Side::Top => i,
                Side::Left | Side::Right => j,
            };
            let bucket = &mut by_side[side_slot(e.side)];
            if bucket.len() <= along {
                bucket.resize(along + 1, usize::MAX);
            }
            bucket[along] = idx;
        }
        BoundaryLocator { space, by_side }
    }

    /// Boundary edge of this mesh containing `(x, y)` on the given side.
    fn locate(&self, side: Side, x: f64, y: f64) -> usize {
        let mesh = &self.space.mesh;
        let (along, h, n) = match side {
            Side::Bottom | Side::Top => (x - mesh.rect.xmin, mesh.cells[0].hx(), mesh.nx),
            Side::Left | Side::Right => (y - mesh.rect.ymin, mesh.cells[0].hy(), mesh.ny),
        };
        let i = ((along / h).floor() as isize).clamp(0, n as isize - 1) as usize;
        self.by_side[side_slot(side)][i]
    }
}

/// Numerical normal flux of a solve at an arbitrary boundary point: the raw
/// `q . n`, penalty-corrected by `alpha_e (u - b)` on outflow edges, exactly
/// as the quadrature-point trace is built.
fn flux_at(
    system: &LdgSystem,
    u: &DgFunction,
    q: &crate::dgcore::FluxField,
    edge: usize,
    x: f64,
    y: f64,
    b: f64,
) -> f64 {
    let info = &system.ops().boundary[edge];
    let qv = q.eval_in_cell(info.cell, x, y);
    let mut g = qv[0] * info.normal[0] + qv[1] * info.normal[1];
    if info.outflow {
        g -= info.alpha * (u.eval_in_cell(info.cell, x, y) - b);
    }
    g
}

fn check_compatible(fine: &Arc<DgSpace>, coarse: &Arc<DgSpace>) -> Result<()> {
    let (fm, cm) = (&fine.mesh, &coarse.mesh);
    if fm.rect != cm.rect {
        return Err(Error::invalid("data mesh and reconstruction mesh cover different rectangles"));
    }
    if fm.nx < 2 * cm.nx || fm.ny < 2 * cm.ny {
        return Err(Error::invalid(format!(
            "data mesh {}x{} must be at least twice the reconstruction mesh {}x{} per direction",
            fm.nx, fm.ny, cm.nx, cm.ny
        )));
    }
    Ok(())
}

/// Solves the four forward problems for `phantom` on the fine mesh, restricts
/// the numerical boundary flux to the coarse quadrature points, and perturbs
/// it with the noise model. Also returns the clean fluxes.
pub fn generate_data_full(
    phantom: &Phantom,
    fine: &Arc<DgSpace>,
    coarse: &Arc<DgSpace>,
    noise: &NoiseModel,
) -> Result<SyntheticData> {
    noise.validate()?;
    check_compatible(fine, coarse)?;
    if !phantom.aligned_with(&fine.mesh) {
        return Err(Error::invalid(format!(
            "phantom {:?} has a discontinuity off the mesh lines of the {}x{} data mesh",
            phantom.name, fine.mesh.nx, fine.mesh.ny
        )));
    }

    let sigma = DgFunction::project(fine, |x, y| phantom.value(x, y));
    let problem = EllipticProblem { sigma, reaction: 0.0, source: None, dirichlet: None };
    let system = assemble(fine, problem, DEFAULT_FLOW, DEFAULT_STAB_SCALE)?;
    let locator = BoundaryLocator::new(fine);

    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let voltages = measurement_suite(coarse);
    let mut clean = Vec::with_capacity(N_MEASUREMENTS);
    let mut pairs = Vec::with_capacity(N_MEASUREMENTS);
    let mut delta = 0.0;
    for (j, f) in voltages.iter().enumerate() {
        let b_fine = BoundaryTrace::from_fn(fine, |x, y| pattern(j, x, y));
        let sol = system.solve_dirichlet(&b_fine)?;

        let n_edges = coarse.mesh.boundary_edges.len();
        let mut values = vec![0.0; n_edges * N_EDGE_QP];
        for (e_idx, e) in coarse.mesh.boundary_edges.iter().enumerate() {
            for (qp, &t) in GAUSS_NODES.iter().enumerate() {
                let [x, y] = e.point(t);
                let fe = locator.locate(e.side, x, y);
                values[e_idx * N_EDGE_QP + qp] =
                    flux_at(&system, &sol.u, &sol.q, fe, x, y, pattern(j, x, y));
            }
        }
        let g_true = BoundaryTrace::from_values(coarse, values)?;

        let mut g_noisy = g_true.clone();
        for v in g_noisy.values_mut() {
            let xi: f64 = rng.sample(StandardNormal);
            *v += noise.epsilon * v.abs() * xi;
        }
        let diff = g_noisy.sub(&g_true)?;
        delta += inner_boundary(&diff, &diff)?.sqrt();

        clean.push(g_true);
        pairs.push((f.clone(), g_noisy));
    }

    Ok(SyntheticData { measurements: Measurements::new(pairs, delta)?, clean })
}

/// [`generate_data_full`] without the clean fluxes.
pub fn generate_data(
    phantom: &Phantom,
    fine: &Arc<DgSpace>,
    coarse: &Arc<DgSpace>,
    noise: &NoiseModel,
) -> Result<Measurements> {
    Ok(generate_data_full(phantom, fine, coarse, noise)?.measurements)
}
