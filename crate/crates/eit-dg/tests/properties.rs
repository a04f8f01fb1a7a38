//! Randomized structural properties: mesh geometry, upwind classification,
//! exactness of projection and the solver on polynomial data, and noise
//! determinism.

use proptest::prelude::*;

use eit_dg::dgcore::inner::inner_l2;
use eit_dg::experiments::{generate_data, NoiseModel, Phantom};
use eit_dg::mdldg::{assemble, EllipticProblem, DEFAULT_FLOW, DEFAULT_STAB_SCALE};
use eit_dg::mesh::{build_mesh, classify_edges, BoundaryFlow, Rect};
use eit_dg::{BoundaryTrace, DgFunction, DgSpace};

fn arb_rect() -> impl Strategy<Value = Rect> {
    (-3.0f64..3.0, 0.3f64..4.0, -3.0f64..3.0, 0.3f64..4.0)
        .prop_map(|(x0, w, y0, h)| Rect::new(x0, x0 + w, y0, y0 + h).unwrap())
}

/// Coefficients of a full quadratic a + bx + cy + dx^2 + exy + fy^2.
fn arb_quadratic() -> impl Strategy<Value = [f64; 6]> {
    proptest::array::uniform6(-2.0f64..2.0)
}

fn eval_quadratic(c: &[f64; 6], x: f64, y: f64) -> f64 {
    c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cells_tile_the_rectangle(rect in arb_rect(), nx in 1usize..10, ny in 1usize..10) {
        let mesh = build_mesh(rect, nx, ny).unwrap();
        prop_assert_eq!(mesh.cells.len(), nx * ny);
        prop_assert_eq!(mesh.boundary_edges.len(), 2 * (nx + ny));
        prop_assert_eq!(mesh.interior_edges.len(), (nx - 1) * ny + nx * (ny - 1));
        let total: f64 = mesh.cells.iter().map(|c| c.area()).sum();
        prop_assert!((total - rect.area()).abs() < 1e-12 * rect.area());
    }

    #[test]
    fn edges_touch_the_cells_they_claim(rect in arb_rect(), nx in 1usize..8, ny in 1usize..8) {
        let mesh = build_mesh(rect, nx, ny).unwrap();
        for e in &mesh.interior_edges {
            let [mx, my] = e.point(0.0);
            for &k in &e.cells {
                let c = &mesh.cells[k];
                prop_assert!(c.contains(mx, my), "midpoint off cell {k}");
            }
            prop_assert_ne!(e.cells[0], e.cells[1]);
        }
        for e in &mesh.boundary_edges {
            let [mx, my] = e.point(0.0);
            prop_assert!(mesh.cells[e.cell].contains(mx, my));
            let on_rim = (mx - rect.xmin).abs() < 1e-12
                || (mx - rect.xmax).abs() < 1e-12
                || (my - rect.ymin).abs() < 1e-12
                || (my - rect.ymax).abs() < 1e-12;
            prop_assert!(on_rim, "boundary edge midpoint ({mx},{my}) inside the domain");
        }
    }

    #[test]
    fn reversing_the_flow_swaps_every_classification(
        nx in 1usize..8,
        ny in 1usize..8,
        vx in 0.1f64..3.0,
        vy in 0.1f64..3.0,
        flip_x in any::<bool>(),
        flip_y in any::<bool>(),
    ) {
        let v = [if flip_x { -vx } else { vx }, if flip_y { -vy } else { vy }];
        let mesh = build_mesh(Rect::symmetric(), nx, ny).unwrap();
        let fwd = classify_edges(&mesh, v).unwrap();
        let rev = classify_edges(&mesh, [-v[0], -v[1]]).unwrap();
        for (a, b) in fwd.interior.iter().zip(&rev.interior) {
            prop_assert_eq!(a.upwind_cell, b.downwind_cell);
            prop_assert_eq!(a.downwind_cell, b.upwind_cell);
        }
        let mut outflow = 0usize;
        for (a, b) in fwd.boundary.iter().zip(&rev.boundary) {
            prop_assert_ne!(a == &BoundaryFlow::Outflow, b == &BoundaryFlow::Outflow);
            if *a == BoundaryFlow::Outflow {
                outflow += 1;
            }
        }
        // A diagonal direction leaves through exactly two of the four sides.
        prop_assert_eq!(outflow, nx + ny);
    }

    #[test]
    fn quadratics_are_represented_exactly(
        rect in arb_rect(),
        nx in 1usize..7,
        ny in 1usize..7,
        c in arb_quadratic(),
        px in 0.0f64..1.0,
        py in 0.0f64..1.0,
    ) {
        let space = DgSpace::new(build_mesh(rect, nx, ny).unwrap());
        let f = DgFunction::project(&space, |x, y| eval_quadratic(&c, x, y));
        let x = rect.xmin + px * (rect.xmax - rect.xmin);
        let y = rect.ymin + py * (rect.ymax - rect.ymin);
        let exact = eval_quadratic(&c, x, y);
        prop_assert!((f.eval(x, y) - exact).abs() < 1e-9 * (1.0 + exact.abs()));

        // Re-projecting the represented function changes nothing.
        let again = DgFunction::project(&space, |x, y| f.eval(x, y));
        let diff = again.sub(&f).unwrap();
        let norm = inner_l2(&diff, &diff).unwrap().sqrt();
        prop_assert!(norm < 1e-9, "reprojection moved the function by {norm:e}");
    }

    #[test]
    fn boundary_traces_sample_the_function(
        nx in 1usize..7,
        ny in 1usize..7,
        c in arb_quadratic(),
    ) {
        let space = DgSpace::new(build_mesh(Rect::symmetric(), nx, ny).unwrap());
        let trace = BoundaryTrace::from_fn(&space, |x, y| eval_quadratic(&c, x, y));
        for (e_idx, e) in space.mesh.boundary_edges.iter().enumerate() {
            for (qp, &t) in eit_dg::dgcore::quad::GAUSS_NODES.iter().enumerate() {
                let [x, y] = e.point(t);
                let expected = eval_quadratic(&c, x, y);
                prop_assert!((trace.get(e_idx, qp) - expected).abs() < 1e-12 * (1.0 + expected.abs()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Harmonic quadratics lie in the discrete space, so any mesh and any
    /// constant conductivity reproduce them to solver roundoff.
    #[test]
    fn harmonic_quadratics_solve_exactly(
        rect in arb_rect(),
        nx in 1usize..9,
        ny in 1usize..9,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        cx in -2.0f64..2.0,
        dy in -2.0f64..2.0,
        sigma in 0.5f64..3.0,
    ) {
        let exact = move |x: f64, y: f64| a * (x * x - y * y) + b * x * y + cx * x + dy * y;
        let space = DgSpace::new(build_mesh(rect, nx, ny).unwrap());
        let problem = EllipticProblem {
            sigma: DgFunction::constant(&space, sigma),
            reaction: 0.0,
            source: None,
            dirichlet: Some(BoundaryTrace::from_fn(&space, exact)),
        };
        let sol = assemble(&space, problem, DEFAULT_FLOW, DEFAULT_STAB_SCALE).unwrap()
            .solve().unwrap();
        let diff = sol.u.sub(&DgFunction::project(&space, exact)).unwrap();
        let err = inner_l2(&diff, &diff).unwrap().sqrt();
        prop_assert!(err <= 1e-9, "u error {err:e} on {nx}x{ny}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn synthetic_data_is_seed_deterministic(seed in any::<u64>(), eps in 0.0f64..0.05) {
        let coarse = DgSpace::new(build_mesh(Rect::symmetric(), 4, 4).unwrap());
        let fine = DgSpace::new(build_mesh(Rect::symmetric(), 8, 8).unwrap());
        let p = Phantom::one_blob();
        let noise = NoiseModel { epsilon: eps, seed };
        let a = generate_data(&p, &fine, &coarse, &noise).unwrap();
        let b = generate_data(&p, &fine, &coarse, &noise).unwrap();
        prop_assert_eq!(a.delta().to_bits(), b.delta().to_bits());
        for j in 0..a.len() {
            let (av, bv) = (a.current(j).values(), b.current(j).values());
            prop_assert!(av.iter().zip(bv).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}
