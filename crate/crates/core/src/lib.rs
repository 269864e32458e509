//! Oculomotor feature extraction and cohort statistics for eye-tracking
//! recordings collected under three conditions.

pub mod blinks;
pub mod dispersion;
pub mod error;
pub mod ingest;
pub mod kinematics;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod saccades;
pub mod stats;
pub mod summary;
pub mod synth;
pub mod table;

pub use error::*;
pub use model::*;
