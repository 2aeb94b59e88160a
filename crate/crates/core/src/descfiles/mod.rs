//! Description files: parsing, validation and cross-file resolution.
//!
//! Five document kinds exist (testbed, data source, hardware component,
//! environment, experiment). Files are YAML with merge keys; anchors give
//! intra-file reuse while cross-file references are plain string ids resolved
//! against a [`Registry`].
//!
//! A document is written either in *direct* form, with the body at top level:
//!
//! ```yaml
//! kind: data_source
//! id: B210
//! source_type: SDR
//! num_channels: 2
//! ```
//!
//! or in *keyed* form, where each top-level key names one document:
//!
//! ```yaml
//! kind: testbed
//! anchors:
//!   B210: &B210 { id: B210 }
//! Techtile: &Techtile
//!   name: "Techtile"
//!   data_chains: []
//! ```
//!
//! The reserved top-level keys are `kind`, `dss_version` and `anchors`
//! (a scratch area for anchor definitions, never typed).

mod channels;
mod emit;
mod parse;
mod pointer;
mod registry;
mod report;
mod resolve;
mod selector;
mod types;
pub mod units;
mod validate;

use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::error::ErrorClass;

pub use channels::{expand_channels, ChannelMap, ChannelRecord, FsLocationLoader, LocationLoader};
pub use emit::to_yaml;
pub use parse::{parse_description, parse_documents};
pub use pointer::{resolve_pointer, Pointer, Segment};
pub use registry::Registry;
pub use report::{ReportItem, Severity, ValidationReport};
pub use resolve::{resolve_experiment, ResolvedExperiment, ResolvedTestbed};
pub use selector::{parse_channel_selector, ChannelSelector};
pub use types::*;
pub use validate::{validate, validate_registry};

#[derive(Debug, Error)]
pub enum DescError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("type error at `{path}`: expected {expected}, found {found}")]
    Type {
        path: String,
        expected: &'static str,
        found: String,
    },
    #[error("invalid channel selector {raw:?}: {message}")]
    Grammar { raw: String, message: String },
    #[error("range error: {0}")]
    Range(String),
    #[error("unresolved {kind} reference {id:?} at `{path}`")]
    UnresolvedRef {
        kind: DocKind,
        id: String,
        path: String,
    },
    #[error("mapping error: {0}")]
    Mapping(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("shape error: {0}")]
    Shape(String),
}

impl DescError {
    pub fn class(&self) -> ErrorClass {
        match self {
            DescError::Syntax { .. } => ErrorClass::Syntax,
            DescError::KindMismatch { .. } => ErrorClass::KindMismatch,
            DescError::Type { .. } => ErrorClass::Type,
            DescError::Grammar { .. } => ErrorClass::Grammar,
            DescError::Range(_) => ErrorClass::Range,
            DescError::UnresolvedRef { .. } => ErrorClass::UnresolvedRef,
            DescError::Mapping(_) => ErrorClass::Mapping,
            DescError::Io { .. } => ErrorClass::Io,
            DescError::Shape(_) => ErrorClass::Shape,
        }
    }

    /// Document pointer the error refers to, when there is one.
    pub fn path(&self) -> Option<&str> {
        match self {
            DescError::Type { path, .. } | DescError::UnresolvedRef { path, .. } => Some(path),
            _ => None,
        }
    }
}

/// The five description-file kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    Testbed,
    DataSource,
    HardwareComponent,
    Environment,
    Experiment,
}

impl DocKind {
    pub const ALL: [DocKind; 5] = [
        DocKind::Testbed,
        DocKind::DataSource,
        DocKind::HardwareComponent,
        DocKind::Environment,
        DocKind::Experiment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DocKind::Testbed => "testbed",
            DocKind::DataSource => "data_source",
            DocKind::HardwareComponent => "hardware_component",
            DocKind::Environment => "environment",
            DocKind::Experiment => "experiment",
        }
    }

    /// Kind implied by a `*.<kind>.yaml` / `*.<kind>.yml` file name.
    pub fn from_file_name(name: &str) -> Option<DocKind> {
        let stem = name
            .strip_suffix(".yaml")
            .or_else(|| name.strip_suffix(".yml"))?;
        let suffix = stem.rsplit_once('.')?.1;
        suffix.parse().ok()
    }
}

impl std::str::FromStr for DocKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DocKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

impl std::fmt::Display for DocKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Typed body of a description document.
#[derive(Debug, Clone, PartialEq)]
pub enum DocBody {
    Testbed(TestbedDesc),
    DataSource(DataSourceDesc),
    HardwareComponent(HardwareComponentDesc),
    Environment(EnvironmentDesc),
    Experiment(ExperimentDesc),
}

impl DocBody {
    pub fn kind(&self) -> DocKind {
        match self {
            DocBody::Testbed(_) => DocKind::Testbed,
            DocBody::DataSource(_) => DocKind::DataSource,
            DocBody::HardwareComponent(_) => DocKind::HardwareComponent,
            DocBody::Environment(_) => DocKind::Environment,
            DocBody::Experiment(_) => DocKind::Experiment,
        }
    }

    pub fn id(&self) -> &str {
        match self {
            DocBody::Testbed(d) => &d.id,
            DocBody::DataSource(d) => &d.id,
            DocBody::HardwareComponent(d) => &d.id,
            DocBody::Environment(d) => &d.id,
            DocBody::Experiment(d) => &d.id,
        }
    }
}

/// Where a document came from.
#[derive(Debug, Clone, Default)]
pub struct Origin {
    pub file: Option<PathBuf>,
    /// Index of the YAML document inside the stream.
    pub document: usize,
    /// Pointer of the body within its YAML document (empty for direct form).
    pub prefix: Pointer,
    /// Full source text the document was parsed from.
    pub text: Option<Arc<str>>,
    /// Report label used when there is no file (e.g. a path inside a
    /// dataset file).
    pub label: Option<String>,
}

/// A parsed, typed description document.
#[derive(Debug, Clone)]
pub struct DescriptionDoc {
    pub dss_version: String,
    pub body: DocBody,
    pub origin: Origin,
    /// Findings made while typing the document (unknown keys, missing fields).
    pub issues: Vec<ReportItem>,
}

impl DescriptionDoc {
    pub fn kind(&self) -> DocKind {
        self.body.kind()
    }

    pub fn id(&self) -> &str {
        self.body.id()
    }

    /// Human-readable source label used in reports.
    pub fn source_label(&self) -> String {
        match (&self.origin.file, &self.origin.label) {
            (Some(p), _) => p.display().to_string(),
            (None, Some(l)) => l.clone(),
            (None, None) => format!("<{}:{}>", self.kind(), self.id()),
        }
    }
}

impl PartialEq for DescriptionDoc {
    fn eq(&self, other: &Self) -> bool {
        self.dss_version == other.dss_version && self.body == other.body
    }
}
