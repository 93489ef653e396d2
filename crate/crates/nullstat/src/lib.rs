//! Manifest loading, fixture catalog, command dispatch, and report emission
//! for the lightlike-hypersurface geometry engine.

pub mod commands;
pub mod manifest;
pub mod report;

pub use commands::{run_to_bytes, OutputFormat, Overrides};
pub use manifest::{fixture_manifest, load_manifest_file, load_manifest_str, Manifest};
