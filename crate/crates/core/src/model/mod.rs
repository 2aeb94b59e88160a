//! In-memory dataset model: named axes with coordinates, dataset-type
//! profiles and slicing.
//!
//! Canonical axis orders are fixed per profile: `(tx, rx, time, sample)` for
//! channel sounding and `(speaker, microphone, channel, sample)` for acoustic
//! data. The time axis is always present, with length 1 for single snapshots.
//! Simulation data is a set of ragged time-value series without a dense
//! tensor.

mod axis;
mod dataset;
mod profile;
mod slice;

use thiserror::Error;

use crate::error::ErrorClass;

pub use axis::{AxisDef, AxisKind, CoordinateVec, Domain, Semantics};
pub use dataset::{
    attach_channel_coords, new_dataset, AttrValue, Attrs, ChannelCoords, DssDataset, HardwareAttribute,
    HardwareAttributes, MetadataBundle, Payload, RaggedSeries,
};
pub use profile::{
    register_type, AxisSpec, DatasetProfile, DatasetTypeRegistry, ValueKind, ACOUSTIC, BUILTIN_TYPES,
    CHANNEL_SOUNDING, RESERVED_AXIS_NAMES, SIMULATION,
};
pub use slice::{slice, AxisSel, SliceSelector, AXIS_ALIASES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown dataset type {0:?}")]
    UnknownType(String),
    #[error("profile violation: {0}")]
    ProfileViolation(String),
    #[error("axis error: {0}")]
    Axis(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("dataset type {0:?} already registered")]
    DuplicateType(String),
    #[error("reserved name: {0}")]
    ReservedName(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("norm error: {0}")]
    Norm(String),
    #[error("invalid selector: {0}")]
    Grammar(String),
}

impl ModelError {
    pub fn class(&self) -> ErrorClass {
        match self {
            ModelError::UnknownType(_) => ErrorClass::UnknownType,
            ModelError::ProfileViolation(_) => ErrorClass::ProfileViolation,
            ModelError::Axis(_) => ErrorClass::Axis,
            ModelError::Index(_) => ErrorClass::Index,
            ModelError::DuplicateType(_) => ErrorClass::DuplicateType,
            ModelError::ReservedName(_) => ErrorClass::ReservedName,
            ModelError::Shape(_) => ErrorClass::Shape,
            ModelError::Norm(_) => ErrorClass::Norm,
            ModelError::Grammar(_) => ErrorClass::Grammar,
        }
    }
}

/// Bitwise equality of two float slices.
pub(crate) fn bits_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}
