//! Rayon-parallel core versus the sequential fallback on the three hot
//! paths: system assembly, the four-measurement forward cache, and one
//! application of the Gauss-Newton normal operator. Both arms produce
//! bit-identical results; the bench only compares wall time.

use std::sync::Arc;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use eit_dg::dtn::{ForwardCache, SobolevSolver};
use eit_dg::experiments::measurement_suite;
use eit_dg::inverse::{
    apply_normal_operator, InverseConfig, Measurements, ReconstructionState,
};
use eit_dg::mdldg::{assemble, EllipticProblem, DEFAULT_FLOW, DEFAULT_STAB_SCALE};
use eit_dg::mesh::{build_mesh, Rect};
use eit_dg::{DgFunction, DgSpace};

const ARMS: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn space(n: usize) -> Arc<DgSpace> {
    DgSpace::new(build_mesh(Rect::symmetric(), n, n).unwrap())
}

fn bump(space: &Arc<DgSpace>) -> DgFunction {
    DgFunction::project(space, |x, y| 1.0 + (-8.0 * (x * x + (y - 0.55) * (y - 0.55))).exp())
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for n in [16usize, 32] {
        let space = space(n);
        let problem = EllipticProblem {
            sigma: bump(&space),
            reaction: 0.0,
            source: None,
            dirichlet: None,
        };
        for (label, enabled) in ARMS {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                eit_dg::par::set_parallel(enabled);
                b.iter(|| {
                    assemble(&space, problem.clone(), DEFAULT_FLOW, DEFAULT_STAB_SCALE).unwrap()
                });
            });
        }
    }
    eit_dg::par::set_parallel(true);
    group.finish();
}

fn bench_forward_cache(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_cache");
    let space = space(32);
    let sigma = bump(&space);
    let suite = measurement_suite(&space);
    for (label, enabled) in ARMS {
        group.bench_function(label, |b| {
            eit_dg::par::set_parallel(enabled);
            b.iter(|| ForwardCache::new(&sigma, &suite).unwrap());
        });
    }
    eit_dg::par::set_parallel(true);
    group.finish();
}

fn bench_normal_operator(c: &mut Criterion) {
    let mut group = c.benchmark_group("normal_operator");
    let space = space(32);
    let suite = measurement_suite(&space);
    let cache = ForwardCache::new(&bump(&space), &suite).unwrap();
    let pairs = (0..suite.len())
        .map(|j| (suite[j].clone(), cache.measurement(j).flux.clone()))
        .collect();
    let meas = Measurements::new(pairs, 0.0).unwrap();
    let anchor = DgFunction::constant(&space, 1.0);
    let state = ReconstructionState::initial(anchor.clone(), &meas).unwrap();
    let sobolev = SobolevSolver::new(&space).unwrap();
    let cfg = InverseConfig::new(anchor);
    let direction = DgFunction::project(&space, |x, y| (2.0 * x).cos() * (3.0 * y).sin());
    for (label, enabled) in ARMS {
        group.bench_function(label, |b| {
            eit_dg::par::set_parallel(enabled);
            b.iter(|| apply_normal_operator(&state, &sobolev, &direction, &cfg).unwrap());
        });
    }
    eit_dg::par::set_parallel(true);
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_secs(1))
        .measurement_time(Duration::from_secs(3));
    targets = bench_assembly, bench_forward_cache, bench_normal_operator
}
criterion_main!(benches);
