use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::descfiles::DescError;
use crate::model::ModelError;
use crate::storage::StorageError;
use crate::synth::SynthError;

/// Every error class the library can raise.
///
/// Front ends map classes (not individual messages) onto their own error
/// reporting, e.g. process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorClass {
    Syntax,
    KindMismatch,
    Type,
    Grammar,
    Range,
    UnresolvedRef,
    Mapping,
    Io,
    Shape,
    UnknownType,
    ProfileViolation,
    Axis,
    Index,
    DuplicateType,
    ReservedName,
    Norm,
    UnsupportedFeature,
    Format,
    Version,
    Domain,
    NonUniformGrid,
    Selection,
    Profile,
    Window,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 24] = [
        ErrorClass::Syntax,
        ErrorClass::KindMismatch,
        ErrorClass::Type,
        ErrorClass::Grammar,
        ErrorClass::Range,
        ErrorClass::UnresolvedRef,
        ErrorClass::Mapping,
        ErrorClass::Io,
        ErrorClass::Shape,
        ErrorClass::UnknownType,
        ErrorClass::ProfileViolation,
        ErrorClass::Axis,
        ErrorClass::Index,
        ErrorClass::DuplicateType,
        ErrorClass::ReservedName,
        ErrorClass::Norm,
        ErrorClass::UnsupportedFeature,
        ErrorClass::Format,
        ErrorClass::Version,
        ErrorClass::Domain,
        ErrorClass::NonUniformGrid,
        ErrorClass::Selection,
        ErrorClass::Profile,
        ErrorClass::Window,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Syntax => "SyntaxError",
            ErrorClass::KindMismatch => "KindMismatch",
            ErrorClass::Type => "TypeError",
            ErrorClass::Grammar => "GrammarError",
            ErrorClass::Range => "RangeError",
            ErrorClass::UnresolvedRef => "UnresolvedRef",
            ErrorClass::Mapping => "MappingError",
            ErrorClass::Io => "IoError",
            ErrorClass::Shape => "ShapeError",
            ErrorClass::UnknownType => "UnknownType",
            ErrorClass::ProfileViolation => "ProfileViolation",
            ErrorClass::Axis => "AxisError",
            ErrorClass::Index => "IndexError",
            ErrorClass::DuplicateType => "DuplicateType",
            ErrorClass::ReservedName => "ReservedName",
            ErrorClass::Norm => "NormError",
            ErrorClass::UnsupportedFeature => "UnsupportedFeature",
            ErrorClass::Format => "FormatError",
            ErrorClass::Version => "VersionError",
            ErrorClass::Domain => "DomainError",
            ErrorClass::NonUniformGrid => "NonUniformGrid",
            ErrorClass::Selection => "SelectionError",
            ErrorClass::Profile => "ProfileError",
            ErrorClass::Window => "WindowError",
        }
    }
}

impl std::fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Umbrella error over all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Desc(#[from] DescError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Desc(e) => e.class(),
            Error::Model(e) => e.class(),
            Error::Storage(e) => e.class(),
            Error::Analysis(e) => e.class(),
            Error::Synth(e) => e.class(),
        }
    }
}
