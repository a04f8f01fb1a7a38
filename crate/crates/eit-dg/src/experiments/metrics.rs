//! Summary statistics of reconstructed conductivities, all evaluated on the
//! cell-center grid.

use crate::dgcore::DgFunction;
use crate::error::{Error, Result};

/// Largest conductivity value over all cell centers.
pub fn height(sigma: &DgFunction) -> f64 {
    sigma.cell_center_values().into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Center of mass of the positive part of `sigma - anchor` over cell
/// centers; `None` when the excess vanishes everywhere.
pub fn excess_center_of_mass(sigma: &DgFunction, anchor: &DgFunction) -> Result<Option<[f64; 2]>> {
    if !std::sync::Arc::ptr_eq(sigma.space(), anchor.space()) {
        return Err(Error::mismatch("center of mass needs both fields on one space"));
    }
    let vals = sigma.cell_center_values();
    let base = anchor.cell_center_values();
    let mesh = &sigma.space().mesh;
    let (mut w_total, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for (k, cell) in mesh.cells.iter().enumerate() {
        let w = (vals[k] - base[k]).max(0.0);
        let [x, y] = cell.center();
        w_total += w;
        cx += w * x;
        cy += w * y;
    }
    if w_total == 0.0 {
        return Ok(None);
    }
    Ok(Some([cx / w_total, cy / w_total]))
}

/// A strict local maximum of the cell-center grid.
#[derive(Clone, Copy, Debug)]
pub struct GridMaximum {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Cell centers whose value strictly exceeds all existing 8-neighbors and
/// lies above `threshold`.
pub fn local_maxima(field: &DgFunction, threshold: f64) -> Vec<GridMaximum> {
    let mesh = &field.space().mesh;
    let (nx, ny) = (mesh.nx, mesh.ny);
    let vals = field.cell_center_values();
    let mut found = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let v = vals[iy * nx + ix];
            if v <= threshold {
                continue;
            }
            let mut is_max = true;
            'probe: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                    if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                        continue;
                    }
                    if vals[jy as usize * nx + jx as usize] >= v {
                        is_max = false;
                        break 'probe;
                    }
                }
            }
            if is_max {
                let [x, y] = mesh.cells[iy * nx + ix].center();
                found.push(GridMaximum { ix, iy, x, y, value: v });
            }
        }
    }
    found
}

/// Mean of the cell-center values over centers selected by `region`;
/// `None` when the region contains no center.
pub fn region_mean(field: &DgFunction, region: impl Fn(f64, f64) -> bool) -> Option<f64> {
    let vals = field.cell_center_values();
    let mesh = &field.space().mesh;
    let (mut sum, mut count) = (0.0, 0usize);
    for (k, cell) in mesh.cells.iter().enumerate() {
        let [x, y] = cell.center();
        if region(x, y) {
            sum += vals[k];
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcore::DgSpace;
    use crate::mesh::{build_mesh, Rect};
    use std::sync::Arc;

    fn space() -> Arc<DgSpace> {
        DgSpace::new(build_mesh(Rect::symmetric(), 16, 16).unwrap())
    }

    #[test]
    fn height_of_a_projected_bump_is_its_peak() {
        let s = space();
        let f = DgFunction::project(&s, |x: f64, y: f64| {
            1.0 + (-8.0 * (x * x + (y - 0.55) * (y - 0.55))).exp()
        });
        let h = height(&f);
        // Centers straddle the peak, so the sampled height sits just below 2.
        assert!(h > 1.9 && h <= 2.0 + 1e-9, "height {h}");
    }

    #[test]
    fn center_of_mass_tracks_the_bump_center() {
        let s = space();
        let f = DgFunction::project(&s, |x: f64, y: f64| {
            1.0 + (-8.0 * ((x - 0.25) * (x - 0.25) + y * y)).exp()
        });
        let anchor = DgFunction::constant(&s, 1.0);
        let [cx, cy] = excess_center_of_mass(&f, &anchor).unwrap().unwrap();
        assert!((cx - 0.25).abs() < 0.05 && cy.abs() < 0.05, "({cx},{cy})");
    }

    #[test]
    fn no_excess_means_no_center_of_mass() {
        let s = space();
        let f = DgFunction::constant(&s, 1.0);
        let anchor = DgFunction::constant(&s, 1.5);
        assert!(excess_center_of_mass(&f, &anchor).unwrap().is_none());
    }

    #[test]
    fn two_bumps_give_exactly_two_maxima() {
        let s = space();
        let f = DgFunction::project(&s, |x: f64, y: f64| {
            (-20.0 * ((x + 0.7) * (x + 0.7) + y * y)).exp()
                + (-20.0 * (x * x + (y - 0.7) * (y - 0.7))).exp()
        });
        let maxima = local_maxima(&f, 0.3);
        assert_eq!(maxima.len(), 2);
        let mut centers: Vec<_> = maxima.iter().map(|m| (m.x, m.y)).collect();
        centers.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((centers[0].0 + 0.7).abs() < 0.1 && centers[0].1.abs() < 0.1);
        assert!(centers[1].0.abs() < 0.1 && (centers[1].1 - 0.7).abs() < 0.1);
    }

    #[test]
    fn threshold_filters_out_low_maxima() {
        let s = space();
        let f = DgFunction::project(&s, |x: f64, y: f64| {
            (-20.0 * (x * x + y * y)).exp() + 0.2 * (-20.0 * ((x - 0.6) * (x - 0.6) + (y - 0.6) * (y - 0.6))).exp()
        });
        assert_eq!(local_maxima(&f, 0.5).len(), 1);
        assert_eq!(local_maxima(&f, 0.05).len(), 2);
    }

    #[test]
    fn region_mean_of_half_planes() {
        let s = space();
        let f = DgFunction::project(&s, |_, y: f64| if y > 0.0 { 2.0 } else { 1.0 });
        let top = region_mean(&f, |_, y| y > 0.2).unwrap();
        let bottom = region_mean(&f, |_, y| y < -0.2).unwrap();
        assert!((top - 2.0).abs() < 1e-12);
        assert!((bottom - 1.0).abs() < 1e-12);
        assert!(region_mean(&f, |x, _| x > 2.0).is_none());
    }
}
