//! Detection of flowering Yellow Flag Iris stands in multispectral
//! orthomosaics from a small set of labeled patches.
//!
//! The pipeline runs in three steps: build a five-channel feature stack
//! ([`spectral`]), calibrate per-channel morphological thresholds and flower
//! peak statistics on labeled patches ([`calibration`]), then detect and
//! validate candidate regions on new imagery ([`detection`]).

pub mod calibration;
pub mod detection;
pub mod error;
pub mod morphology;
pub mod overlay;
pub mod peaks;
pub mod raster;
pub mod score;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
