//! Configuration documents, CSV output and snapshot files.

pub mod config;
pub mod output;
pub mod snapshot;

pub use config::{parse_config, ConfigDoc};
pub use output::{
    emit_sweep_csv, emit_transition_csv, strip_wall_clock, write_file, RunManifest, SWEEP_HEADER, TRANSITION_HEADER,
    WALL_CLOCK_PREFIX,
};
pub use snapshot::{
    export_snapshot, export_snapshot_file, parse_snapshot, EdgeKind, Snapshot, SnapshotEdge, EDGE_HEADER, NODE_HEADER,
};
