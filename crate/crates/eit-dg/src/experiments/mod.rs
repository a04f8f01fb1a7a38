//! Study harnesses: phantoms, the voltage-pattern suite, synthetic data
//! with seeded noise, convergence reports, reconstruction pipelines, and
//! the summary metrics used to judge them.

pub mod data;
pub mod eoc;
pub mod measurements;
pub mod metrics;
pub mod phantoms;
pub mod pipeline;

pub use data::{generate_data, generate_data_full, NoiseModel, SyntheticData};
pub use eoc::{run_eoc, EocReport, ManufacturedCase};
pub use measurements::{measurement_suite, N_MEASUREMENTS};
pub use metrics::{excess_center_of_mass, height, local_maxima, region_mean, GridMaximum};
pub use phantoms::{Background, Blob, Phantom};
pub use pipeline::{run_reconstruction, Anchor, ReconstructionRun, RunSettings};
