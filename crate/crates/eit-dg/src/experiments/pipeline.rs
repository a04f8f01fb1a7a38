//! End-to-end reconstruction runs: phantom -> synthetic data on a finer
//! mesh -> regularized Gauss-Newton on the reconstruction mesh.

use std::sync::Arc;

use crate::dgcore::{DgFunction, DgSpace};
use crate::error::{Error, Result};
use crate::inverse::{gauss_newton, InverseConfig, ReconstructionState};
use crate::mesh::{build_mesh, Rect};

use super::data::{generate_data_full, NoiseModel, SyntheticData};
use super::phantoms::Phantom;

/// Regularization anchor (and initial iterate) for a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Anchor {
    Constant(f64),
    /// The phantom's background, leaving only the inclusions unknown.
    Background,
}

#[derive(Clone, Copy, Debug)]
pub struct RunSettings {
    pub mesh: usize,
    /// Data mesh refinement relative to `mesh`; must be at least 2.
    pub fine_factor: usize,
    pub noise: NoiseModel,
    pub alpha: f64,
    pub tau: f64,
    pub rho: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub anchor: Anchor,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            mesh: 32,
            fine_factor: 2,
            noise: NoiseModel::none(),
            alpha: 1e-8,
            tau: 3.0,
            rho: 0.9,
            max_outer: 50,
            max_inner: 50,
            anchor: Anchor::Background,
        }
    }
}

pub struct ReconstructionRun {
    pub space: Arc<DgSpace>,
    pub anchor: DgFunction,
    pub data: SyntheticData,
    pub state: ReconstructionState,
}

/// Builds the meshes, manufactures data, and runs the outer iteration.
pub fn run_reconstruction(
    phantom: &Phantom,
    rect: Rect,
    settings: &RunSettings,
) -> Result<ReconstructionRun> {
    if settings.fine_factor < 2 {
        return Err(Error::invalid(format!(
            "data mesh factor {} keeps the data too close to the reconstruction mesh",
            settings.fine_factor
        )));
    }
    let n = settings.mesh;
    let space = DgSpace::new(build_mesh(rect, n, n)?);
    let fine = DgSpace::new(build_mesh(rect, n * settings.fine_factor, n * settings.fine_factor)?);
    if !phantom.aligned_with(&space.mesh) {
        return Err(Error::invalid(format!(
            "phantom {:?} has a discontinuity off the mesh lines of the {n}x{n} reconstruction mesh",
            phantom.name
        )));
    }

    let data = generate_data_full(phantom, &fine, &space, &settings.noise)?;

    let anchor = match settings.anchor {
        Anchor::Constant(c) => {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::invalid(format!("anchor conductivity {c} out of range")));
            }
            DgFunction::constant(&space, c)
        }
        Anchor::Background => DgFunction::project(&space, |_, y| phantom.background_value(y)),
    };

    let mut cfg = InverseConfig::new(anchor.clone());
    cfg.alpha_reg = settings.alpha;
    cfg.tau = settings.tau;
    cfg.rho = settings.rho;
    cfg.max_outer = settings.max_outer;
    cfg.max_inner = settings.max_inner;
    cfg.validate()?;

    let state = gauss_newton(&data.measurements, &cfg, &space)?;
    Ok(ReconstructionRun { space, anchor, data, state })
}
