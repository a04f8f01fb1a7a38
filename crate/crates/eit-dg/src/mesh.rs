//! Structured rectangular meshes.
//!
//! A mesh partitions an axis-aligned rectangle into `nx * ny` uniform cells.
//! Orderings are fixed so that every run is reproducible:
//!
//! * cells are row-major: cell `(i, j)` has index `j * nx + i`, `i` running
//!   along x and `j` along y;
//! * interior edges list all vertical edges first (row-major over the cell
//!   pairs they separate), then all horizontal edges;
//! * boundary edges list the vertical sides first (left column bottom-to-top,
//!   then right column), then the horizontal sides (bottom row left-to-right,
//!   then top row).
//!
//! Interior edge normals point from `cells[0]` to `cells[1]` (i.e. in +x for
//! vertical edges, +y for horizontal ones); boundary normals point outward.

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let r = Rect { xmin, xmax, ymin, ymax };
        if !(r.xmin.is_finite() && r.xmax.is_finite() && r.ymin.is_finite() && r.ymax.is_finite()) {
            return Err(Error::invalid("rectangle bounds must be finite"));
        }
        if r.xmax <= r.xmin || r.ymax <= r.ymin {
            return Err(Error::invalid(format!(
                "degenerate rectangle [{}, {}] x [{}, {}]",
                xmin, xmax, ymin, ymax
            )));
        }
        Ok(r)
    }

    /// The unit square `[0, 1]^2`.
    pub fn unit() -> Self {
        Rect { xmin: 0.0, xmax: 1.0, ymin: 0.0, ymax: 1.0 }
    }

    /// The square `[-1, 1]^2`.
    pub fn symmetric() -> Self {
        Rect { xmin: -1.0, xmax: 1.0, ymin: -1.0, ymax: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// One mesh cell, stored as its bounding rectangle.
#[derive(Clone, Copy, Debug)]
pub struct Cell {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Cell {
    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax)]
    }

    pub fn hx(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn hy(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.hx() * self.hy()
    }

    /// Maps physical coordinates to reference coordinates in `[-1, 1]^2`.
    pub fn to_reference(&self, x: f64, y: f64) -> [f64; 2] {
        let [cx, cy] = self.center();
        [2.0 * (x - cx) / self.hx(), 2.0 * (y - cy) / self.hy()]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }
}

/// Orientation of an edge segment: vertical edges are lines of constant x
/// (normal along x), horizontal edges lines of constant y (normal along y).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Vertical,
    Horizontal,
}

/// Which side of the domain a boundary edge lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Edge shared by two cells. The unit normal points from `cells[0]` into
/// `cells[1]`.
#[derive(Clone, Copy, Debug)]
pub struct InteriorEdge {
    pub axis: Axis,
    pub cells: [usize; 2],
    pub normal: [f64; 2],
    /// Endpoint with the smaller tangential coordinate.
    pub start: [f64; 2],
    pub length: f64,
}

/// Edge on the domain boundary; the unit normal points outward.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryEdge {
    pub axis: Axis,
    pub cell: usize,
    pub normal: [f64; 2],
    pub side: Side,
    /// Endpoint with the smaller tangential coordinate.
    pub start: [f64; 2],
    pub length: f64,
}

fn edge_point(axis: Axis, start: [f64; 2], length: f64, t: f64) -> [f64; 2] {
    let s = 0.5 * (t + 1.0) * length;
    match axis {
        Axis::Vertical => [start[0], start[1] + s],
        Axis::Horizontal => [start[0] + s, start[1]],
    }
}

impl InteriorEdge {
    /// Point at edge parameter `t` in `[-1, 1]`.
    pub fn point(&self, t: f64) -> [f64; 2] {
        edge_point(self.axis, self.start, self.length, t)
    }
}

impl BoundaryEdge {
    /// Point at edge parameter `t` in `[-1, 1]`.
    pub fn point(&self, t: f64) -> [f64; 2] {
        edge_point(self.axis, self.start, self.length, t)
    }
}

/// Uniform structured mesh of a rectangle.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<Cell>,
    pub interior_edges: Vec<InteriorEdge>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

/// Builds the uniform `nx * ny` mesh of `rect` with the orderings documented
/// at module level.
pub fn build_mesh(rect: Rect, nx: usize, ny: usize) -> Result<Mesh> {
    Rect::new(rect.xmin, rect.xmax, rect.ymin, rect.ymax)?;
    if nx == 0 || ny == 0 {
        return Err(Error::invalid(format!("mesh must have at least one cell per direction, got {nx} x {ny}")));
    }
    let hx = rect.width() / nx as f64;
    let hy = rect.height() / ny as f64;
    // Grid lines are computed from integer multiples so shared edges and cell
    // bounds agree bit-for-bit.
    let xs: Vec<f64> = (0..=nx).map(|i| rect.xmin + i as f64 * hx).collect();
    let ys: Vec<f64> = (0..=ny).map(|j| rect.ymin + j as f64 * hy).collect();

    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(Cell { xmin: xs[i], xmax: xs[i + 1], ymin: ys[j], ymax: ys[j + 1] });
        }
    }

    let idx = |i: usize, j: usize| j * nx + i;

    let mut interior_edges = Vec::with_capacity((nx - 1) * ny + nx * (ny - 1));
    for j in 0..ny {
        for i in 0..nx - 1 {
            interior_edges.push(InteriorEdge {
                axis: Axis::Vertical,
                cells: [idx(i, j), idx(i + 1, j)],
                normal: [1.0, 0.0],
                start: [xs[i + 1], ys[j]],
                length: hy,
            });
        }
    }
    for j in 0..ny - 1 {
        for i in 0..nx {
            interior_edges.push(InteriorEdge {
                axis: Axis::Horizontal,
                cells: [idx(i, j), idx(i, j + 1)],
                normal: [0.0, 1.0],
                start: [xs[i], ys[j + 1]],
                length: hx,
            });
        }
    }

    let mut boundary_edges = Vec::with_capacity(2 * nx + 2 * ny);
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge {
            axis: Axis::Vertical,
            cell: idx(0, j),
            normal: [-1.0, 0.0],
            side: Side::Left,
            start: [xs[0], ys[j]],
            length: hy,
        });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge {
            axis: Axis::Vertical,
            cell: idx(nx - 1, j),
            normal: [1.0, 0.0],
            side: Side::Right,
            start: [xs[nx], ys[j]],
            length: hy,
        });
    }
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge {
            axis: Axis::Horizontal,
            cell: idx(i, 0),
            normal: [0.0, -1.0],
            side: Side::Bottom,
            start: [xs[i], ys[0]],
            length: hx,
        });
    }
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge {
            axis: Axis::Horizontal,
            cell: idx(i, ny - 1),
            normal: [0.0, 1.0],
            side: Side::Top,
            start: [xs[i], ys[ny]],
            length: hx,
        });
    }

    Ok(Mesh { rect, nx, ny, cells, interior_edges, boundary_edges })
}

impl Mesh {
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    pub fn cell_coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn hx(&self) -> f64 {
        self.rect.width() / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.rect.height() / self.ny as f64
    }

    /// True when `other` discretizes the same rectangle with the same
    /// resolution (then all orderings coincide as well).
    pub fn same_layout(&self, other: &Mesh) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.rect == other.rect
    }

    /// Index of the cell containing `(x, y)`; points on shared edges resolve
    /// to the cell with the larger index range clamp, points outside the
    /// rectangle to the nearest cell.
    pub fn locate(&self, x: f64, y: f64) -> usize {
        let fx = (x - self.rect.xmin) / self.hx();
        let fy = (y - self.rect.ymin) / self.hy();
        let i = (fx.floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let j = (fy.floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        self.cell_index(i, j)
    }
}

/// Flow role of an interior edge relative to the upwind direction:
/// `u_hat` is taken from the downwind cell, `q_hat` from the upwind cell.
#[derive(Clone, Copy, Debug)]
pub struct InteriorFlow {
    pub upwind_cell: usize,
    pub downwind_cell: usize,
}

/// Flow role of a boundary edge: inflow edges have `v . n < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryFlow {
    Inflow,
    Outflow,
}

/// Per-edge flow classification for a fixed upwind direction `v`.
#[derive(Clone, Debug)]
pub struct EdgeFlow {
    pub v: [f64; 2],
    pub interior: Vec<InteriorFlow>,
    pub boundary: Vec<BoundaryFlow>,
}

/// Classifies every edge of `mesh` against the upwind direction `v`.
///
/// Fails if `v` is perpendicular to any edge normal; on an axis-aligned mesh
/// that means both components of `v` must be nonzero.
pub fn classify_edges(mesh: &Mesh, v: [f64; 2]) -> Result<EdgeFlow> {
    if !(v[0].is_finite() && v[1].is_finite()) {
        return Err(Error::invalid("upwind direction must be finite"));
    }
    let mut interior = Vec::with_capacity(mesh.interior_edges.len());
    for (e, edge) in mesh.interior_edges.iter().enumerate() {
        let dot = v[0] * edge.normal[0] + v[1] * edge.normal[1];
        if dot == 0.0 {
            return Err(Error::invalid(format!(
                "upwind direction ({}, {}) is perpendicular to interior edge {e}; choose v with nonzero dot product against every edge normal",
                v[0], v[1]
            )));
        }
        let [lo, hi] = edge.cells;
        interior.push(if dot > 0.0 {
            InteriorFlow { upwind_cell: lo, downwind_cell: hi }
        } else {
            InteriorFlow { upwind_cell: hi, downwind_cell: lo }
        });
    }
    let mut boundary = Vec::with_capacity(mesh.boundary_edges.len());
    for (e, edge) in mesh.boundary_edges.iter().enumerate() {
        let dot = v[0] * edge.normal[0] + v[1] * edge.normal[1];
        if dot == 0.0 {
            return Err(Error::invalid(format!(
                "upwind direction ({}, {}) is perpendicular to boundary edge {e}",
                v[0], v[1]
            )));
        }
        boundary.push(if dot < 0.0 { BoundaryFlow::Inflow } else { BoundaryFlow::Outflow });
    }
    Ok(EdgeFlow { v, interior, boundary })
}
