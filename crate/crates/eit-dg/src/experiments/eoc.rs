//! Convergence studies against manufactured solutions, reporting domain L2
//! errors of the scalar field and both flux components with observed orders.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use crate::dgcore::inner::inner_l2;
use crate::dgcore::{BoundaryTrace, DgFunction, DgSpace, FluxField};
use crate::error::{Error, Result};
use crate::mdldg::{assemble, EllipticProblem, DEFAULT_FLOW, DEFAULT_STAB_SCALE};
use crate::mesh::{build_mesh, Rect};

/// A boundary-value problem with known exact solution on the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManufacturedCase {
    /// sigma = exp(-(x^2+y^2)), u = sin(x+y): everything smooth, the flux
    /// components superconverge past second order on tensor meshes.
    SmoothCoefficient,
    /// sigma jumps 1 -> 10 across x = 1/2 while sigma*grad(u) stays smooth:
    /// u keeps third order, the flux components hold second.
    InterfaceCoefficient,
}

impl ManufacturedCase {
    pub fn name(&self) -> &'static str {
        match self {
            ManufacturedCase::SmoothCoefficient => "smooth",
            ManufacturedCase::InterfaceCoefficient => "interface",
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "smooth" => Ok(ManufacturedCase::SmoothCoefficient),
            "interface" => Ok(ManufacturedCase::InterfaceCoefficient),
            _ => Err(Error::invalid(format!(
                "unknown convergence case {name:?}; expected smooth or interface"
            ))),
        }
    }

    pub fn sigma(&self, x: f64, y: f64) -> f64 {
        match self {
            ManufacturedCase::SmoothCoefficient => (-(x * x + y * y)).exp(),
            ManufacturedCase::InterfaceCoefficient => {
                if x < 0.5 {
                    1.0
                } else {
                    10.0
                }
            }
        }
    }

    pub fn exact_u(&self, x: f64, y: f64) -> f64 {
        match self {
            ManufacturedCase::SmoothCoefficient => (x + y).sin(),
            ManufacturedCase::InterfaceCoefficient => interface_g(x, y) / self.sigma(x, y),
        }
    }

    /// Exact flux sigma * grad(u); smooth across the interface by design.
    pub fn exact_flux(&self, x: f64, y: f64) -> [f64; 2] {
        match self {
            ManufacturedCase::SmoothCoefficient => {
                let g = self.sigma(x, y) * (x + y).cos();
                [g, g]
            }
            ManufacturedCase::InterfaceCoefficient => interface_grad_g(x, y),
        }
    }

    /// Source -div(sigma grad u).
    pub fn source(&self, x: f64, y: f64) -> f64 {
        match self {
            ManufacturedCase::SmoothCoefficient => {
                2.0 * (-(x * x + y * y)).exp() * ((x + y) * (x + y).cos() + (x + y).sin())
            }
            ManufacturedCase::InterfaceCoefficient => {
                let (s, c) = ((FRAC_PI_2 * x).sin(), (FRAC_PI_2 * x).cos());
                let (a, b, r2) = (x - 0.5, y - 0.5, x * x + y * y + 1.0);
                let gxx = -FRAC_PI_2 * FRAC_PI_2 * s * a * b * r2
                    + 2.0 * FRAC_PI_2 * c * (b * r2 + a * b * 2.0 * x)
                    + s * (2.0 * b * 2.0 * x + a * b * 2.0);
                let gyy = s * a * (4.0 * y + b * 2.0);
                -(gxx + gyy)
            }
        }
    }
}

// g = sin(pi x / 2) (x - 1/2)(y - 1/2)(x^2 + y^2 + 1); the interface
// solution is u = g / sigma, so sigma * grad(u) = grad(g) globally.
fn interface_g(x: f64, y: f64) -> f64 {
    (FRAC_PI_2 * x).sin() * (x - 0.5) * (y - 0.5) * (x * x + y * y + 1.0)
}

fn interface_grad_g(x: f64, y: f64) -> [f64; 2] {
    let (s, c) = ((FRAC_PI_2 * x).sin(), (FRAC_PI_2 * x).cos());
    let (a, b, r2) = (x - 0.5, y - 0.5, x * x + y * y + 1.0);
    [
        FRAC_PI_2 * c * a * b * r2 + s * b * r2 + s * a * b * 2.0 * x,
        s * a * (r2 + b * 2.0 * y),
    ]
}

/// Per-mesh errors and observed convergence orders of a refinement study.
#[derive(Clone, Debug)]
pub struct EocReport {
    pub case: ManufacturedCase,
    pub meshes: Vec<usize>,
    pub err_u: Vec<f64>,
    pub err_flux_x: Vec<f64>,
    pub err_flux_y: Vec<f64>,
}

fn orders_of(errs: &[f64]) -> Vec<Option<f64>> {
    let mut o = vec![None];
    for w in errs.windows(2) {
        o.push(Some((w[0] / w[1]).log2()));
    }
    o
}

impl EocReport {
    pub fn orders_u(&self) -> Vec<Option<f64>> {
        orders_of(&self.err_u)
    }

    pub fn orders_flux_x(&self) -> Vec<Option<f64>> {
        orders_of(&self.err_flux_x)
    }

    pub fn orders_flux_y(&self) -> Vec<Option<f64>> {
        orders_of(&self.err_flux_y)
    }

    /// Table in the fixed schema; the flux columns report the first
    /// component, which carries the headline order for both cases.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "mesh,n_cells,err_u,order_u,err_flux,order_flux")?;
        let (ou, of) = (self.orders_u(), self.orders_flux_x());
        for i in 0..self.meshes.len() {
            let fmt = |o: &Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{:e},{},{:e},{}",
                self.meshes[i],
                self.meshes[i] * self.meshes[i],
                self.err_u[i],
                fmt(&ou[i]),
                self.err_flux_x[i],
                fmt(&of[i])
            )?;
        }
        Ok(())
    }
}

/// Quadrature L2 error of one flux component against an exact function.
pub(crate) fn flux_component_error(
    q: &FluxField,
    comp: usize,
    exact: impl Fn(f64, f64) -> f64,
) -> f64 {
    let space = q.space();
    let jac = space.cell_jacobian();
    let mut e2 = 0.0;
    for k in 0..space.n_cells() {
        let vals = q.eval_cell_qps(k);
        for (qp, v) in vals.iter().enumerate() {
            let [x, y] = space.qp_phys(k, qp);
            let d = v[comp] - exact(x, y);
            e2 += jac * space.cell_qp_w[qp] * d * d;
        }
    }
    e2.sqrt()
}

/// Runs the refinement study for `case` over square meshes of the given
/// sizes, which must be increasing.
pub fn run_eoc(case: ManufacturedCase, meshes: &[usize]) -> Result<EocReport> {
    if meshes.is_empty() {
        return Err(Error::invalid("convergence study needs at least one mesh"));
    }
    if meshes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("mesh sizes must be strictly increasing"));
    }
    let mut report = EocReport {
        case,
        meshes: meshes.to_vec(),
        err_u: Vec::new(),
        err_flux_x: Vec::new(),
        err_flux_y: Vec::new(),
    };
    for &n in meshes {
        let space = DgSpace::new(build_mesh(Rect::unit(), n, n)?);
        let problem = EllipticProblem {
            sigma: DgFunction::project(&space, |x, y| case.sigma(x, y)),
            reaction: 0.0,
            source: Some(DgFunction::project(&space, |x, y| case.source(x, y))),
            dirichlet: Some(BoundaryTrace::from_fn(&space, |x, y| case.exact_u(x, y))),
        };
        let sol = assemble(&space, problem, DEFAULT_FLOW, DEFAULT_STAB_SCALE)?.solve()?;

        let diff = sol.u.sub(&DgFunction::project(&space, |x, y| case.exact_u(x, y)))?;
        report.err_u.push(inner_l2(&diff, &diff)?.sqrt());
        report.err_flux_x.push(flux_component_error(&sol.q, 0, |x, y| case.exact_flux(x, y)[0]));
        report.err_flux_y.push(flux_component_error(&sol.q, 1, |x, y| case.exact_flux(x, y)[1]));
    }
    Ok(report)
}
