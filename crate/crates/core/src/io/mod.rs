//! Configuration, snapshots, diagnostics CSV and raster export.

pub mod config;
pub mod export;
pub mod snapshot;

pub use config::{parse_config, Equation, InitialCondition, RunConfig};
pub use export::{diagnostics_csv, export_raster, parse_diagnostics_csv, pgm_bytes, write_diagnostics_csv};
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, Snapshot, FORMAT_VERSION};
