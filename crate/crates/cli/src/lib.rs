//! Std companion to `cyclic-aoi-core`: configuration files, bundled sweep
//! presets, CSV sweeps, the validation suite and text reports used by the
//! `cyclic-aoi` binary.

pub mod config;
pub mod presets;
pub mod report;
pub mod sweep;
pub mod validate;
