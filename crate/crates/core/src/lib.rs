//! Reference implementation of the Dataset Storage Standard (DSS) for 6G testbeds.
//!
//! The crate is split along the three parts of the standard:
//!
//! * [`descfiles`]: human-readable description files (testbed, data source,
//!   hardware component, environment, experiment), their validation and the
//!   expansion of a testbed into a globally indexed channel map.
//! * [`model`] and [`storage`]: the typed tensor dataset and its bit-exact
//!   persistence in HDF5 and NetCDF-4.
//! * [`analysis`]: the API layer on top of the storage (domain transforms,
//!   post-processing and plot emission).
//!
//! [`synth`] produces synthetic datasets from geometry, used for demos and as an
//! independent oracle in tests.

pub mod analysis;
pub mod descfiles;
pub mod error;
pub mod model;
pub mod storage;
pub mod synth;

pub use error::{Error, ErrorClass};

/// Version string written to every file and assumed for description files
/// without an explicit `dss_version`.
pub const DSS_VERSION: &str = "1.0";
