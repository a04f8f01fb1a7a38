//! One driver per run mode, each writing its artifacts into the output
//! directory. Everything except the wall-clock line in `summary.txt` is
//! deterministic for a fixed config and seed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use eit_dg::dgcore::quad::GAUSS_NODES;
use eit_dg::experiments::{
    excess_center_of_mass, height, measurement_suite, run_eoc, run_reconstruction,
};
use eit_dg::inverse::ReconstructionState;
use eit_dg::mdldg::{assemble, EllipticProblem, DEFAULT_FLOW, DEFAULT_STAB_SCALE};
use eit_dg::mesh::build_mesh;
use eit_dg::{BoundaryTrace, DgFunction, DgSpace};

use crate::config::RunConfig;
use crate::CliError;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn run_eoc_mode(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let case = cfg.eoc_case()?;
    let report = run_eoc(case, &cfg.eoc.meshes)?;
    let mut out = create(dir, "eoc.csv")?;
    report.write_csv(&mut out)?;
    out.flush()?;

    println!("case {}", case.name());
    let (ou, of) = (report.orders_u(), report.orders_flux_x());
    for i in 0..report.meshes.len() {
        let fmt = |o: &Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "  {:>4}x{:<4} err_u {:.3e} ({}) err_flux {:.3e} ({})",
            report.meshes[i],
            report.meshes[i],
            report.err_u[i],
            fmt(&ou[i]),
            report.err_flux_x[i],
            fmt(&of[i]),
        );
    }
    Ok(())
}

pub fn run_forward_mode(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let rect = cfg.rect()?;
    let n = cfg.mesh.n;
    let space = DgSpace::new(build_mesh(rect, n, n)?);
    let phantom = cfg.phantom()?;
    if !phantom.aligned_with(&space.mesh) {
        return Err(CliError::Config(format!(
            "phantom {:?} has a discontinuity off the mesh lines of the {n}x{n} mesh",
            phantom.name
        )));
    }
    let dirichlet = match cfg.forward_pattern()? {
        Some(j) => measurement_suite(&space)[j].clone(),
        None => BoundaryTrace::zeros(&space),
    };
    let problem = EllipticProblem {
        sigma: DgFunction::project(&space, |x, y| phantom.value(x, y)),
        reaction: 0.0,
        source: None,
        dirichlet: Some(dirichlet),
    };
    let sol = assemble(&space, problem, DEFAULT_FLOW, DEFAULT_STAB_SCALE)?.solve()?;

    let mut centers = create(dir, "u_centers.csv")?;
    sol.u.write_centers_csv(&mut centers)?;
    centers.flush()?;
    let mut coeffs = create(dir, "u_coeffs.csv")?;
    sol.u.write_coeffs_csv(&mut coeffs)?;
    coeffs.flush()?;

    let mut flux = create(dir, "flux.csv")?;
    writeln!(flux, "edge,qp,x,y,flux")?;
    for (e_idx, e) in space.mesh.boundary_edges.iter().enumerate() {
        for (qp, &t) in GAUSS_NODES.iter().enumerate() {
            let [x, y] = e.point(t);
            writeln!(flux, "{},{},{},{},{}", e_idx, qp, x, y, sol.flux.get(e_idx, qp))?;
        }
    }
    flux.flush()?;

    println!("forward solve on {n}x{n}, boundary {}", cfg.forward.boundary);
    Ok(())
}

pub fn run_reconstruct_mode(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let phantom = cfg.phantom()?;
    let settings = cfg.run_settings();
    let start = Instant::now();
    let run = run_reconstruction(&phantom, cfg.rect()?, &settings)?;
    let wall = start.elapsed().as_secs_f64();
    let state: &ReconstructionState = &run.state;

    for j in 0..run.data.measurements.len() {
        let mut out = create(dir, &format!("measurement_{}.csv", j + 1))?;
        run.data.write_csv(j, &mut out)?;
        out.flush()?;
    }

    let mut iters = create(dir, "iterations.csv")?;
    writeln!(iters, "k,misfit,inner_iterations,dsigma_h1")?;
    for rec in &state.history {
        writeln!(iters, "{},{},{},{}", rec.k, rec.misfit, rec.inner_iterations, rec.dsigma_h1)?;
    }
    iters.flush()?;

    let mut centers = create(dir, "sigma_centers.csv")?;
    state.sigma.write_centers_csv(&mut centers)?;
    centers.flush()?;
    let mut coeffs = create(dir, "sigma_coeffs.csv")?;
    state.sigma.write_coeffs_csv(&mut coeffs)?;
    coeffs.flush()?;

    let h = height(&state.sigma);
    let com = excess_center_of_mass(&state.sigma, &run.anchor)?;
    let mut summary = create(dir, "summary.txt")?;
    writeln!(summary, "phantom = {}", phantom.name)?;
    writeln!(summary, "mesh = {}", settings.mesh)?;
    writeln!(summary, "epsilon = {}", settings.noise.epsilon)?;
    writeln!(summary, "seed = {}", settings.noise.seed)?;
    writeln!(summary, "delta = {}", run.data.measurements.delta())?;
    writeln!(summary, "outer_iterations = {}", state.iteration)?;
    writeln!(summary, "final_misfit = {}", state.misfit)?;
    writeln!(summary, "height = {}", h)?;
    match com {
        Some([cx, cy]) => writeln!(summary, "center_of_mass = {cx} {cy}")?,
        None => writeln!(summary, "center_of_mass = none")?,
    }
    writeln!(summary, "wall_seconds = {wall:.3}")?;
    summary.flush()?;

    println!(
        "reconstructed {} on {}x{}: {} outer iterations, misfit {:.3e}, height {:.3}",
        phantom.name, settings.mesh, settings.mesh, state.iteration, state.misfit, h
    );
    Ok(())
}
