//! Config files, diagnostics CSV, binary snapshots, run manifests and the
//! command implementations used by the `crfs` binary.

pub mod commands;
mod config;
mod csv_out;
mod manifest;
mod snapshot;

pub use config::{
    parse_config, parse_config_str, print_defaults, KeySpec, ManufacturedSetup, OutputConfig, RunConfig, ScenarioKind, KEYS,
    SECTIONS,
};
pub use csv_out::{
    fmt_f64, read_diagnostics, write_convergence_table, write_diagnostics, write_json, write_property_report,
    write_twin_report,
};
pub use manifest::{hash_config, RunManifest};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, MAGIC, SNAPSHOT_VERSION};
