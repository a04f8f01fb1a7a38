use eit_dg::experiments::{
    excess_center_of_mass, height, run_reconstruction, Anchor, NoiseModel, Phantom, RunSettings,
};
use eit_dg::mesh::Rect;
use std::time::Instant;

fn main() {
    for epsilon in [0.0, 1e-3] {
        let settings = RunSettings {
            fine_factor: 4,
            noise: NoiseModel { epsilon, seed: 7 },
            max_outer: 80,
            anchor: Anchor::Constant(1.0),
            ..RunSettings::default()
        };
        let t = Instant::now();
        let run = run_reconstruction(&Phantom::one_blob(), Rect::symmetric(), &settings).unwrap();
        let com = excess_center_of_mass(&run.state.sigma, &run.anchor).unwrap();
        println!(
            "eps {epsilon:.0e} cap 80: iters {}, misfit {:.4e} (tau*delta {:.4e}), height {:.4}, com {:?}, {:.0} s",
            run.state.iteration,
            run.state.misfit,
            3.0 * run.data.measurements.delta(),
            height(&run.state.sigma),
            com,
            t.elapsed().as_secs_f64()
        );
        for rec in run.state.history.iter().rev().take(6).collect::<Vec<_>>().iter().rev() {
            println!("  k {} misfit {:.4e} inner {}", rec.k, rec.misfit, rec.inner_iterations);
        }
    }
}
