//! Persistence of [`DssDataset`] values in HDF5 and NetCDF-4.
//!
//! Both formats share one tree (see `docs/layout.md`):
//!
//! ```text
//! /                        attrs: dss_version, dataset_type, domain, axes,
//!                                 axis_kinds, dataset attributes
//! /data                    tensor, dimensions named after the axes
//! /coords/<axis>           coordinate vector (attrs: unit, semantics)
//! /coords/<axis>_positions     N x 3, meters
//! /coords/<axis>_orientations  N x 4, unit quaternions [w, x, y, z]
//! /metadata/<kind>/<id>    description-file text, verbatim
//! /simulation/run<k>/<metric>  (t, value) pairs
//! /hardware_attributes/<component>/<attribute>
//! ```
//!
//! NetCDF-4 files are HDF5 files following the netCDF-4 conventions, so
//! both flavors are written and read by the same code.

mod h5;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::descfiles::ValidationReport;
use crate::error::ErrorClass;
use crate::model::{DssDataset, ModelError};

pub use h5::{has_array, read_f64_array, write_f64_array};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Hdf5,
    Netcdf4,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Hdf5 => "hdf5",
            Format::Netcdf4 => "netcdf4",
        }
    }

    /// Conventional file extension.
    pub fn extension(self) -> &'static str {
        match self {
            Format::Hdf5 => "dss.h5",
            Format::Netcdf4 => "dss.nc",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = StorageError;

    fn from_str(s: &str) -> Result<Self, StorageError> {
        match s {
            "hdf5" | "h5" => Ok(Format::Hdf5),
            "netcdf4" | "netcdf" | "nc" => Ok(Format::Netcdf4),
            other => Err(StorageError::UnsupportedFeature(format!(
                "unknown format {other:?} (hdf5, netcdf4)"
            ))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Layout violation; `at` is the offending path inside the file.
    #[error("format error at {at}: {message}")]
    Format { at: String, message: String },
    #[error("version error: {0}")]
    Version(String),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl StorageError {
    pub fn class(&self) -> ErrorClass {
        match self {
            StorageError::Io { .. } => ErrorClass::Io,
            StorageError::Format { .. } => ErrorClass::Format,
            StorageError::Version(_) => ErrorClass::Version,
            StorageError::UnsupportedFeature(_) => ErrorClass::UnsupportedFeature,
            StorageError::Model(e) => e.class(),
        }
    }

    pub(crate) fn format(at: impl Into<String>, message: impl Into<String>) -> Self {
        StorageError::Format {
            at: at.into(),
            message: message.into(),
        }
    }
}

/// An opened DSS file.
#[derive(Debug, Clone)]
pub struct DssFile {
    pub dataset: DssDataset,
    pub format: Format,
    /// Result of re-validating the embedded description files.
    pub metadata_report: ValidationReport,
}

/// What the first bytes of a file say about it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Hdf5,
    /// netCDF classic / 64-bit offset / CDF-5.
    NetcdfClassic,
    Unknown,
}

const HDF5_MAGIC: &[u8] = b"\x89HDF\r\n\x1a\n";

pub fn is_hdf5_signature(bytes: &[u8]) -> bool {
    bytes.starts_with(HDF5_MAGIC)
}

pub fn sniff_bytes(bytes: &[u8]) -> Signature {
    if is_hdf5_signature(bytes) {
        Signature::Hdf5
    } else if bytes.len() >= 4 && &bytes[..3] == b"CDF" && matches!(bytes[3], 1 | 2 | 5) {
        Signature::NetcdfClassic
    } else {
        Signature::Unknown
    }
}

pub fn sniff(path: &Path) -> Result<Signature, StorageError> {
    use std::io::Read;
    let io = |source| StorageError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut head = Vec::with_capacity(8);
    std::fs::File::open(path)
        .map_err(io)?
        .take(8)
        .read_to_end(&mut head)
        .map_err(io)?;
    Ok(sniff_bytes(&head))
}

/// Writes `ds` to `path` atomically (temporary file in the same directory,
/// then rename).
pub fn save(ds: &DssDataset, path: impl AsRef<Path>, format: Format) -> Result<(), StorageError> {
    ds.check()?;
    h5::check_storable(ds)?;
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |source| StorageError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = tempfile::Builder::new()
        .prefix(".dss-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(io)?;
    h5::write(ds, tmp.path(), format)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Opens a DSS file, detecting its format from the magic bytes.
pub fn open(path: impl AsRef<Path>) -> Result<DssFile, StorageError> {
    let path = path.as_ref();
    match sniff(path)? {
        Signature::Hdf5 => {}
        Signature::NetcdfClassic => {
            return Err(StorageError::Version(format!(
                "{} is a classic netCDF file; only NetCDF-4 is supported",
                path.display()
            )))
        }
        Signature::Unknown => {
            return Err(StorageError::format(
                "/",
                format!("{} is neither an HDF5 nor a NetCDF-4 file", path.display()),
            ))
        }
    }
    let (dataset, format) = h5::read(path)?;
    let metadata_report = validate_bundle(&dataset);
    Ok(DssFile {
        dataset,
        format,
        metadata_report,
    })
}

/// Re-encodes `src` as `dst_format` at `dst`. Nothing is written when `src`
/// cannot be read.
pub fn convert(src: impl AsRef<Path>, dst: impl AsRef<Path>, dst_format: Format) -> Result<(), StorageError> {
    let file = open(src)?;
    save(&file.dataset, dst, dst_format)
}

/// Validates the description files embedded in a dataset against each
/// other, without filesystem access.
pub fn validate_bundle(ds: &DssDataset) -> ValidationReport {
    let mut registry = crate::descfiles::Registry::detached();
    for ((kind, id), text) in &ds.metadata_bundle {
        registry.add_text(text, &format!("/metadata/{kind}/{id}"), Some(*kind));
    }
    crate::descfiles::validate_registry(&registry)
}
