//! Workbench layer over `beeid-core`: file formats, Monte Carlo simulation
//! with deterministic worker fan-out, and run manifests for byte-exact
//! reproduction. The `beeid` binary in this crate ties it all together.

pub mod formats;
pub mod manifest;
pub mod simulate;

pub use beeid_core as core;
