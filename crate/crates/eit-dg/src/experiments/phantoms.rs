//! Target conductivities for reconstruction studies: a piecewise-constant
//! background plus isotropic Gaussian bumps.

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Background conductivity, constant or split across a horizontal line.
///
/// The split variant is only meaningful when the line lies on a mesh line of
/// every mesh the phantom is used with; [`Phantom::aligned_with`] checks that.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Background {
    Constant(f64),
    /// `below` for y < at, `above` for y > at. On the line itself the two
    /// branches are averaged, which quadrature never samples on aligned
    /// meshes.
    SplitAtY { at: f64, below: f64, above: f64 },
}

impl Background {
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            Background::Constant(c) => c,
            Background::SplitAtY { at, below, above } => {
                if y < at {
                    below
                } else if y > at {
                    above
                } else {
                    0.5 * (below + above)
                }
            }
        }
    }
}

/// Isotropic Gaussian bump `amplitude * exp(-width * |x - center|^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Blob {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub width: f64,
}

impl Blob {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        self.amplitude * (-self.width * (dx * dx + dy * dy)).exp()
    }
}

#[derive(Clone, Debug)]
pub struct Phantom {
    pub name: &'static str,
    pub background: Background,
    pub blobs: Vec<Blob>,
}

impl Phantom {
    /// Single centered-amplitude bump above the origin on a unit background.
    pub fn one_blob() -> Phantom {
        Phantom {
            name: "one_blob",
            background: Background::Constant(1.0),
            blobs: vec![Blob { amplitude: 1.0, center: [0.0, 0.55], width: 8.0 }],
        }
    }

    /// Two narrower bumps, left of and above the origin.
    pub fn two_blobs() -> Phantom {
        Phantom {
            name: "two_blobs",
            background: Background::Constant(1.0),
            blobs: vec![
                Blob { amplitude: 1.0, center: [-0.7, 0.0], width: 20.0 },
                Blob { amplitude: 1.0, center: [0.0, 0.7], width: 20.0 },
            ],
        }
    }

    /// Background jumping from 1.5 (lower half) to 1 (upper half) across
    /// y = 0, with one bump in each half.
    pub fn discontinuous_background() -> Phantom {
        Phantom {
            name: "discontinuous_background",
            background: Background::SplitAtY { at: 0.0, below: 1.5, above: 1.0 },
            blobs: vec![
                Blob { amplitude: 1.0, center: [0.0, 0.7], width: 20.0 },
                Blob { amplitude: 1.0, center: [0.0, -0.7], width: 20.0 },
            ],
        }
    }

    pub fn by_name(name: &str) -> Result<Phantom> {
        match name {
            "one_blob" => Ok(Phantom::one_blob()),
            "two_blobs" => Ok(Phantom::two_blobs()),
            "discontinuous_background" => Ok(Phantom::discontinuous_background()),
            _ => Err(Error::invalid(format!(
                "unknown phantom {name:?}; expected one_blob, two_blobs, \
                 or discontinuous_background"
            ))),
        }
    }

    /// Conductivity at a point.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let mut v = self.background.value(y);
        for b in &self.blobs {
            v += b.value(x, y);
        }
        v
    }

    /// Background alone (no bumps), the natural anchor for reconstructions
    /// that know the medium but not the inclusions.
    pub fn background_value(&self, y: f64) -> f64 {
        self.background.value(y)
    }

    /// True when any background discontinuity lies on a mesh line, so that
    /// cellwise quadrature never straddles the jump.
    pub fn aligned_with(&self, mesh: &Mesh) -> bool {
        match self.background {
            Background::Constant(_) => true,
            Background::SplitAtY { at, .. } => {
                let hy = mesh.cells[0].hy();
                let k = (at - mesh.rect.ymin) / hy;
                (k - k.round()).abs() < 1e-12 * (1.0 + k.abs())
            }
        }
    }
}
