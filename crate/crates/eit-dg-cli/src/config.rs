//! Declarative run configuration: a TOML file with one `mode` key and one
//! section per concern. Unknown keys are rejected so typos surface as parse
//! errors with line context, and the fully-resolved form (defaults and
//! command-line overrides applied) serializes back to TOML for the manifest.

use serde::{Deserialize, Serialize};

use eit_dg::experiments::{Anchor, Background, Blob, ManufacturedCase, NoiseModel, Phantom, RunSettings};
use eit_dg::mesh::Rect;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Eoc,
    Forward,
    Reconstruct,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSection {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Default for DomainSection {
    fn default() -> Self {
        DomainSection { xmin: -1.0, xmax: 1.0, ymin: -1.0, ymax: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    /// Cells per direction of the working mesh.
    pub n: usize,
    /// Data-mesh refinement for reconstructions.
    pub fine_factor: usize,
}

impl Default for MeshSection {
    fn default() -> Self {
        MeshSection { n: 32, fine_factor: 2 }
    }
}

/// Either a named phantom or a custom background-plus-blobs formula.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhantomSection {
    pub name: Option<String>,
    pub background: Option<BackgroundSpec>,
    pub blobs: Vec<BlobSpec>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BackgroundSpec {
    Constant(f64),
    SplitAtY { at: f64, below: f64, above: f64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlobSpec {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub width: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection { epsilon: 0.0, seed: 0 }
    }
}

/// `sigma0` is a positive number or the string "background".
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnchorSpec {
    Constant(f64),
    Named(AnchorName),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorName {
    Background,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InverseSection {
    pub alpha: f64,
    pub tau: f64,
    pub rho: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub sigma0: AnchorSpec,
}

impl Default for InverseSection {
    fn default() -> Self {
        InverseSection {
            alpha: 1e-8,
            tau: 3.0,
            rho: 0.9,
            max_outer: 50,
            max_inner: 50,
            sigma0: AnchorSpec::Named(AnchorName::Background),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EocSection {
    /// "smooth" or "interface".
    pub case: String,
    pub meshes: Vec<usize>,
}

impl Default for EocSection {
    fn default() -> Self {
        EocSection { case: "smooth".to_string(), meshes: vec![8, 16, 32, 64] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForwardSection {
    /// Dirichlet data: "f1".."f4" from the measurement suite, or "zero".
    pub boundary: String,
}

impl Default for ForwardSection {
    fn default() -> Self {
        ForwardSection { boundary: "f1".to_string() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".to_string() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub domain: DomainSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub phantom: PhantomSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub inverse: InverseSection,
    #[serde(default)]
    pub eoc: EocSection,
    #[serde(default)]
    pub forward: ForwardSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn rect(&self) -> Result<Rect, CliError> {
        let d = &self.domain;
        Rect::new(d.xmin, d.xmax, d.ymin, d.ymax)
            .map_err(|e| CliError::Config(format!("domain: {e}")))
    }

    /// The phantom this run targets: a named one, or a custom formula when
    /// `background`/`blobs` are given instead.
    pub fn phantom(&self) -> Result<Phantom, CliError> {
        let section = &self.phantom;
        match (&section.name, &section.background) {
            (Some(name), None) if section.blobs.is_empty() => {
                Phantom::by_name(name).map_err(|e| CliError::Config(format!("phantom: {e}")))
            }
            (Some(_), _) => Err(CliError::Config(
                "phantom: give either name or background/blobs, not both".to_string(),
            )),
            (None, background) => {
                let background = match background {
                    None => Background::Constant(1.0),
                    Some(BackgroundSpec::Constant(c)) => Background::Constant(*c),
                    Some(BackgroundSpec::SplitAtY { at, below, above }) => {
                        Background::SplitAtY { at: *at, below: *below, above: *above }
                    }
                };
                let blobs = section
                    .blobs
                    .iter()
                    .map(|b| Blob { amplitude: b.amplitude, center: b.center, width: b.width })
                    .collect();
                Ok(Phantom { name: "custom", background, blobs })
            }
        }
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel { epsilon: self.noise.epsilon, seed: self.noise.seed }
    }

    pub fn run_settings(&self) -> RunSettings {
        RunSettings {
            mesh: self.mesh.n,
            fine_factor: self.mesh.fine_factor,
            noise: self.noise(),
            alpha: self.inverse.alpha,
            tau: self.inverse.tau,
            rho: self.inverse.rho,
            max_outer: self.inverse.max_outer,
            max_inner: self.inverse.max_inner,
            anchor: match self.inverse.sigma0 {
                AnchorSpec::Constant(c) => Anchor::Constant(c),
                AnchorSpec::Named(AnchorName::Background) => Anchor::Background,
            },
        }
    }

    pub fn eoc_case(&self) -> Result<ManufacturedCase, CliError> {
        ManufacturedCase::by_name(&self.eoc.case).map_err(|e| CliError::Config(format!("eoc: {e}")))
    }

    /// Dirichlet pattern index for forward mode; `None` means zero data.
    pub fn forward_pattern(&self) -> Result<Option<usize>, CliError> {
        match self.forward.boundary.as_str() {
            "zero" => Ok(None),
            "f1" => Ok(Some(0)),
            "f2" => Ok(Some(1)),
            "f3" => Ok(Some(2)),
            "f4" => Ok(Some(3)),
            other => Err(CliError::Config(format!(
                "forward.boundary {other:?} not recognized; expected f1..f4 or zero"
            ))),
        }
    }

    pub fn manifest(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::Config(format!("manifest: {e}")))
    }
}
