use std::collections::BTreeMap;

use super::axis::{AxisKind, Domain};
use super::ModelError;

/// Value type of a dataset's payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Real,
    Complex,
    /// Ragged time-value series instead of a dense tensor.
    Series,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisSpec {
    pub name: String,
    pub kind: AxisKind,
}

impl AxisSpec {
    pub fn new(name: impl Into<String>, kind: AxisKind) -> Self {
        AxisSpec { name: name.into(), kind }
    }
}

/// Shape contract of a dataset type.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetProfile {
    pub name: String,
    /// Required axes in canonical order.
    pub axes: Vec<AxisSpec>,
    pub value_kind: ValueKind,
    pub domains: Vec<Domain>,
    /// Numeric attributes that must be present.
    pub required_attrs: Vec<String>,
}

pub const CHANNEL_SOUNDING: &str = "channel_sounding";
pub const ACOUSTIC: &str = "acoustic";
pub const SIMULATION: &str = "simulation";

pub const BUILTIN_TYPES: [&str; 3] = [CHANNEL_SOUNDING, ACOUSTIC, SIMULATION];

/// Names that collide with the storage layout and cannot be axis names.
pub const RESERVED_AXIS_NAMES: [&str; 5] = ["data", "coords", "metadata", "simulation", "hardware_attributes"];

impl DatasetProfile {
    pub fn channel_sounding() -> Self {
        DatasetProfile {
            name: CHANNEL_SOUNDING.into(),
            axes: [AxisKind::Tx, AxisKind::Rx, AxisKind::Time, AxisKind::Sample]
                .into_iter()
                .map(|k| AxisSpec::new(k.as_str(), k))
                .collect(),
            value_kind: ValueKind::Complex,
            domains: vec![Domain::Delay, Domain::Frequency],
            required_attrs: vec!["center_frequency".into(), "bandwidth".into()],
        }
    }

    pub fn acoustic() -> Self {
        DatasetProfile {
            name: ACOUSTIC.into(),
            axes: [AxisKind::Speaker, AxisKind::Microphone, AxisKind::Channel, AxisKind::Sample]
                .into_iter()
                .map(|k| AxisSpec::new(k.as_str(), k))
                .collect(),
            value_kind: ValueKind::Real,
            domains: vec![Domain::Time],
            required_attrs: vec!["sampling_rate".into()],
        }
    }

    pub fn simulation() -> Self {
        DatasetProfile {
            name: SIMULATION.into(),
            axes: Vec::new(),
            value_kind: ValueKind::Series,
            domains: vec![Domain::None, Domain::Time],
            required_attrs: Vec::new(),
        }
    }

    fn check_names(&self) -> Result<(), ModelError> {
        if self.name.is_empty() || self.name.contains('/') {
            return Err(ModelError::ProfileViolation(format!("invalid dataset type name {:?}", self.name)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.axes {
            if RESERVED_AXIS_NAMES.contains(&a.name.as_str()) {
                return Err(ModelError::ReservedName(format!("axis name {:?} is reserved", a.name)));
            }
            if !valid_axis_name(&a.name) {
                return Err(ModelError::ProfileViolation(format!("invalid axis name {:?}", a.name)));
            }
            if !seen.insert(a.name.as_str()) {
                return Err(ModelError::ProfileViolation(format!("axis {:?} listed twice", a.name)));
            }
        }
        if self.value_kind == ValueKind::Series && !self.axes.is_empty() {
            return Err(ModelError::ProfileViolation("series profiles have no dense axes".into()));
        }
        if self.value_kind != ValueKind::Series && self.axes.is_empty() {
            return Err(ModelError::ProfileViolation("a dense profile needs at least one axis".into()));
        }
        if self.domains.is_empty() {
            return Err(ModelError::ProfileViolation("a profile needs at least one domain".into()));
        }
        Ok(())
    }
}

/// Axis names double as dimension and variable names on disk.
pub(crate) fn valid_axis_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.ends_with("_positions")
        && !name.ends_with("_orientations")
}

/// Known dataset types. The built-ins are always present.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetTypeRegistry {
    entries: BTreeMap<String, DatasetProfile>,
}

impl Default for DatasetTypeRegistry {
    fn default() -> Self {
        let entries = [
            DatasetProfile::channel_sounding(),
            DatasetProfile::acoustic(),
            DatasetProfile::simulation(),
        ]
        .into_iter()
        .map(|p| (p.name.clone(), p))
        .collect();
        DatasetTypeRegistry { entries }
    }
}

impl DatasetTypeRegistry {
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&DatasetProfile> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn register(&mut self, profile: DatasetProfile) -> Result<(), ModelError> {
        if BUILTIN_TYPES.contains(&profile.name.as_str()) {
            return Err(ModelError::ReservedName(format!(
                "{:?} is a built-in dataset type",
                profile.name
            )));
        }
        if self.entries.contains_key(&profile.name) {
            return Err(ModelError::DuplicateType(profile.name));
        }
        profile.check_names()?;
        self.entries.insert(profile.name.clone(), profile);
        Ok(())
    }
}

/// Returns a registry extended with `profile`.
pub fn register_type(registry: &DatasetTypeRegistry, profile: DatasetProfile) -> Result<DatasetTypeRegistry, ModelError> {
    let mut next = registry.clone();
    next.register(profile)?;
    Ok(next)
}
