//! Threshold-controlled cascades ("network wake-up") on random geometric
//! graphs and their small-world augmentations.
//!
//! The crate is organised bottom-up:
//!
//! * [`geom`]: point sampling and the planar / periodic distance metrics.
//! * [`graph`]: random geometric graph construction and component analysis.
//! * [`smallworld`]: long-range link augmentation.
//! * [`cascade`]: the threshold activation dynamics.
//! * [`energy`]: communication energy accounting for a finished cascade.
//! * [`montecarlo`]: replicated experiments, parameter sweeps and
//!   transition estimates.
//! * [`io`]: configuration parsing and CSV output.

// Parameter guards use `!(x > 0.0)` so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod energy;
mod error;
pub mod geom;
pub mod graph;
pub mod io;
pub mod montecarlo;
pub mod smallworld;
mod unionfind;

pub use cascade::{
    activation_rule, run_cascade, select_seed, step_asynchronous, step_synchronous,
    CascadeOutcome, CascadeParams, CascadeState, Schedule, SeedSpec,
};
pub use energy::{EnergyModel, EnergyReport};
pub use error::{Error, Result};
pub use geom::{BoundaryMode, Density, Point};
pub use graph::{ComponentLabeling, LongLink, Network};
pub use montecarlo::{ExperimentConfig, ReplicateStats, SweepSpec};
pub use smallworld::{LinkKind, LinkScheme};

/// Version string embedded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
