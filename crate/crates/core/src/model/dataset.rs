use std::collections::BTreeMap;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use super::axis::{AxisDef, CoordinateVec, Domain};
use super::profile::{valid_axis_name, DatasetProfile, DatasetTypeRegistry, ValueKind, RESERVED_AXIS_NAMES};
use super::{bits_eq, ModelError};
use crate::descfiles::DocKind;

/// A dataset attribute value. Integers are stored as doubles.
#[derive(Debug, Clone)]
pub enum AttrValue {
    Number(f64),
    Text(String),
}

impl AttrValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Number(x) => Some(*x),
            AttrValue::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            AttrValue::Text(s) => Some(s),
            AttrValue::Number(_) => None,
        }
    }
}

impl PartialEq for AttrValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AttrValue::Number(a), AttrValue::Number(b)) => a.to_bits() == b.to_bits(),
            (AttrValue::Text(a), AttrValue::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl From<f64> for AttrValue {
    fn from(x: f64) -> Self {
        AttrValue::Number(x)
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Text(s.to_string())
    }
}

impl From<String> for AttrValue {
    fn from(s: String) -> Self {
        AttrValue::Text(s)
    }
}

impl std::fmt::Display for AttrValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttrValue::Number(x) => write!(f, "{x}"),
            AttrValue::Text(s) => f.write_str(s),
        }
    }
}

pub type Attrs = BTreeMap<String, AttrValue>;

/// Time-value pairs of one metric in one simulation run.
#[derive(Debug, Clone)]
pub struct RaggedSeries {
    pub run: u32,
    pub metric: String,
    /// `(t in seconds, value)`, strictly increasing in t.
    pub points: Vec<(f64, f64)>,
    pub unit: String,
}

impl RaggedSeries {
    pub fn new(run: u32, metric: impl Into<String>, points: Vec<(f64, f64)>, unit: impl Into<String>) -> Result<Self, ModelError> {
        let s = RaggedSeries {
            run,
            metric: metric.into(),
            points,
            unit: unit.into(),
        };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if !valid_axis_name(&self.metric) {
            return Err(ModelError::ProfileViolation(format!("invalid metric name {:?}", self.metric)));
        }
        if let Some(i) = self.points.windows(2).position(|w| !(w[0].0 < w[1].0)) {
            return Err(ModelError::ProfileViolation(format!(
                "run {} metric {:?}: t not strictly increasing at point {}",
                self.run,
                self.metric,
                i + 1
            )));
        }
        Ok(())
    }
}

impl PartialEq for RaggedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.run == other.run
            && self.metric == other.metric
            && self.unit == other.unit
            && self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| a.0.to_bits() == b.0.to_bits() && a.1.to_bits() == b.1.to_bits())
    }
}

/// Tensor contents.
#[derive(Debug, Clone)]
pub enum Payload {
    Real(ArrayD<f64>),
    Complex(ArrayD<Complex64>),
    /// Sorted by `(run, metric)`.
    Series(Vec<RaggedSeries>),
}

impl Payload {
    pub fn value_kind(&self) -> ValueKind {
        match self {
            Payload::Real(_) => ValueKind::Real,
            Payload::Complex(_) => ValueKind::Complex,
            Payload::Series(_) => ValueKind::Series,
        }
    }

    pub fn shape(&self) -> &[usize] {
        match self {
            Payload::Real(a) => a.shape(),
            Payload::Complex(a) => a.shape(),
            Payload::Series(_) => &[],
        }
    }
}

impl PartialEq for Payload {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Payload::Real(a), Payload::Real(b)) => {
                a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (Payload::Complex(a), Payload::Complex(b)) => {
                a.shape() == b.shape()
                    && a
                        .iter()
                        .zip(b.iter())
                        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
            }
            (Payload::Series(a), Payload::Series(b)) => a == b,
            _ => false,
        }
    }
}

/// Per-index position (meters) and orientation (unit quaternion `[w, x, y, z]`)
/// of one axis.
#[derive(Debug, Clone)]
pub struct ChannelCoords {
    pub positions: Vec<[f64; 3]>,
    pub orientations: Option<Vec<[f64; 4]>>,
}

impl ChannelCoords {
    pub(crate) fn select(&self, indices: &[usize]) -> ChannelCoords {
        ChannelCoords {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            orientations: self
                .orientations
                .as_ref()
                .map(|o| indices.iter().map(|&i| o[i]).collect()),
        }
    }
}

impl PartialEq for ChannelCoords {
    fn eq(&self, other: &Self) -> bool {
        let flat3 = |v: &[[f64; 3]]| v.iter().flatten().copied().collect::<Vec<_>>();
        let flat4 = |v: &[[f64; 4]]| v.iter().flatten().copied().collect::<Vec<_>>();
        bits_eq(&flat3(&self.positions), &flat3(&other.positions))
            && match (&self.orientations, &other.orientations) {
                (None, None) => true,
                (Some(a), Some(b)) => bits_eq(&flat4(a), &flat4(b)),
                _ => false,
            }
    }
}

/// A characterisation array of a hardware component (frequency response,
/// AM-AM profile, ...), one column per unit.
#[derive(Debug, Clone)]
pub struct HardwareAttribute {
    pub values: ArrayD<f64>,
    pub units: Vec<String>,
}

impl PartialEq for HardwareAttribute {
    fn eq(&self, other: &Self) -> bool {
        self.units == other.units
            && self.values.shape() == other.values.shape()
            && self
                .values
                .iter()
                .zip(other.values.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Verbatim description-file texts, keyed by kind and id.
pub type MetadataBundle = BTreeMap<(DocKind, String), String>;

/// Component id, then attribute name.
pub type HardwareAttributes = BTreeMap<String, BTreeMap<String, HardwareAttribute>>;

/// A typed tensor dataset with its coordinates and embedded metadata.
///
/// Equality is bitwise on every floating-point value.
#[derive(Debug, Clone, PartialEq)]
pub struct DssDataset {
    pub dataset_type: String,
    pub axes: Vec<AxisDef>,
    pub payload: Payload,
    pub domain: Domain,
    pub attrs: Attrs,
    pub metadata_bundle: MetadataBundle,
    pub channel_coords: BTreeMap<String, ChannelCoords>,
    pub hardware_attributes: HardwareAttributes,
}

/// Creates a zero-initialised dataset of a registered type.
pub fn new_dataset(
    registry: &DatasetTypeRegistry,
    dataset_type: &str,
    axes: Vec<AxisDef>,
    domain: Domain,
    attrs: Attrs,
) -> Result<DssDataset, ModelError> {
    let profile = registry
        .get(dataset_type)
        .ok_or_else(|| ModelError::UnknownType(dataset_type.to_string()))?;
    let shape: Vec<usize> = axes.iter().map(|a| a.length).collect();
    let payload = match profile.value_kind {
        ValueKind::Real => Payload::Real(ArrayD::zeros(IxDyn(&shape))),
        ValueKind::Complex => Payload::Complex(ArrayD::zeros(IxDyn(&shape))),
        ValueKind::Series => Payload::Series(Vec::new()),
    };
    let ds = DssDataset {
        dataset_type: dataset_type.to_string(),
        axes,
        payload,
        domain,
        attrs,
        metadata_bundle: BTreeMap::new(),
        channel_coords: BTreeMap::new(),
        hardware_attributes: BTreeMap::new(),
    };
    ds.check_profile(profile)?;
    Ok(ds)
}

impl DssDataset {
    /// [`new_dataset`] against the built-in types.
    pub fn new(dataset_type: &str, axes: Vec<AxisDef>, domain: Domain, attrs: Attrs) -> Result<Self, ModelError> {
        new_dataset(&DatasetTypeRegistry::builtin(), dataset_type, axes, domain, attrs)
    }

    /// A simulation dataset from its series.
    pub fn simulation(mut series: Vec<RaggedSeries>, attrs: Attrs) -> Result<Self, ModelError> {
        series.sort_by(|a, b| (a.run, &a.metric).cmp(&(b.run, &b.metric)));
        let ds = DssDataset {
            payload: Payload::Series(series),
            ..DssDataset::new(super::profile::SIMULATION, Vec::new(), Domain::None, attrs)?
        };
        ds.check()?;
        Ok(ds)
    }

    /// Replaces the payload; the shape and value kind must not change.
    pub fn with_payload(mut self, payload: Payload) -> Result<Self, ModelError> {
        if payload.value_kind() != self.payload.value_kind() {
            return Err(ModelError::ProfileViolation(format!(
                "payload is {:?}, dataset holds {:?}",
                payload.value_kind(),
                self.payload.value_kind()
            )));
        }
        if payload.shape() != self.shape().as_slice() && payload.value_kind() != ValueKind::Series {
            return Err(ModelError::Shape(format!(
                "payload shape {:?} does not match axes {:?}",
                payload.shape(),
                self.shape()
            )));
        }
        self.payload = match payload {
            Payload::Series(mut s) => {
                s.sort_by(|a, b| (a.run, &a.metric).cmp(&(b.run, &b.metric)));
                Payload::Series(s)
            }
            other => other,
        };
        self.check_structure()?;
        Ok(self)
    }

    pub fn with_coordinate(mut self, axis: &str, c: CoordinateVec) -> Result<Self, ModelError> {
        let i = self.axis_index(axis)?;
        if c.len() != self.axes[i].length {
            return Err(ModelError::Shape(format!(
                "coordinate of length {} for axis {axis:?} of length {}",
                c.len(),
                self.axes[i].length
            )));
        }
        c.check()?;
        self.axes[i].coordinate = Some(c);
        Ok(self)
    }

    pub fn with_attr(mut self, name: &str, value: impl Into<AttrValue>) -> Self {
        self.attrs.insert(name.to_string(), value.into());
        self
    }

    pub fn with_metadata(mut self, kind: DocKind, id: &str, text: &str) -> Self {
        self.metadata_bundle.insert((kind, id.to_string()), text.to_string());
        self
    }

    pub fn with_hardware_attribute(mut self, component: &str, name: &str, attr: HardwareAttribute) -> Result<Self, ModelError> {
        for part in [component, name] {
            if part.is_empty() || part.contains('/') || part.starts_with('.') {
                return Err(ModelError::ProfileViolation(format!("invalid hardware attribute name {part:?}")));
            }
        }
        self.hardware_attributes
            .entry(component.to_string())
            .or_default()
            .insert(name.to_string(), attr);
        Ok(self)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.length).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize, ModelError> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ModelError::Axis(format!("no axis named {name:?} (axes: {})", self.axis_names())))
    }

    pub fn axis(&self, name: &str) -> Result<&AxisDef, ModelError> {
        Ok(&self.axes[self.axis_index(name)?])
    }

    pub fn axis_names(&self) -> String {
        self.axes.iter().map(|a| a.name.as_str()).collect::<Vec<_>>().join(", ")
    }

    pub fn attr_f64(&self, name: &str) -> Option<f64> {
        self.attrs.get(name).and_then(AttrValue::as_f64)
    }

    pub fn complex_data(&self) -> Option<&ArrayD<Complex64>> {
        match &self.payload {
            Payload::Complex(a) => Some(a),
            _ => None,
        }
    }

    pub fn real_data(&self) -> Option<&ArrayD<f64>> {
        match &self.payload {
            Payload::Real(a) => Some(a),
            _ => None,
        }
    }

    pub fn series(&self) -> &[RaggedSeries] {
        match &self.payload {
            Payload::Series(s) => s,
            _ => &[],
        }
    }

    /// Re-validates against the profile registered for `dataset_type`.
    /// Unknown types only get the structural checks.
    pub fn check_in(&self, registry: &DatasetTypeRegistry) -> Result<(), ModelError> {
        match registry.get(&self.dataset_type) {
            Some(p) => self.check_profile(p),
            None => self.check_structure(),
        }
    }

    /// [`DssDataset::check_in`] against the built-in types.
    pub fn check(&self) -> Result<(), ModelError> {
        self.check_in(&DatasetTypeRegistry::builtin())
    }

    pub(crate) fn check_profile(&self, p: &DatasetProfile) -> Result<(), ModelError> {
        let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        let expected: Vec<&str> = p.axes.iter().map(|a| a.name.as_str()).collect();
        let kinds_ok = self.axes.iter().zip(&p.axes).all(|(a, s)| a.kind == s.kind);
        if names != expected || !kinds_ok {
            return Err(ModelError::ProfileViolation(format!(
                "{} requires axes ({}) in this order, got ({})",
                p.name,
                expected.join(", "),
                names.join(", ")
            )));
        }
        if self.payload.value_kind() != p.value_kind {
            return Err(ModelError::ProfileViolation(format!(
                "{} holds {:?} values, got {:?}",
                p.name,
                p.value_kind,
                self.payload.value_kind()
            )));
        }
        if !p.domains.contains(&self.domain) {
            let allowed: Vec<&str> = p.domains.iter().map(|d| d.as_str()).collect();
            return Err(ModelError::ProfileViolation(format!(
                "{} allows domains {}, got {}",
                p.name,
                allowed.join("/"),
                self.domain
            )));
        }
        for a in &p.required_attrs {
            match self.attrs.get(a) {
                Some(AttrValue::Number(x)) if x.is_finite() => {}
                Some(_) => {
                    return Err(ModelError::ProfileViolation(format!(
                        "{} attribute {a:?} must be a finite number",
                        p.name
                    )))
                }
                None => return Err(ModelError::ProfileViolation(format!("{} requires attribute {a:?}", p.name))),
            }
        }
        self.check_structure()
    }

    /// Invariants that hold for every dataset regardless of type.
    pub(crate) fn check_structure(&self) -> Result<(), ModelError> {
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.axes {
            if RESERVED_AXIS_NAMES.contains(&a.name.as_str()) {
                return Err(ModelError::ReservedName(format!("axis name {:?} is reserved", a.name)));
            }
            if !valid_axis_name(&a.name) {
                return Err(ModelError::ProfileViolation(format!("invalid axis name {:?}", a.name)));
            }
            if !seen.insert(a.name.as_str()) {
                return Err(ModelError::Axis(format!("axis {:?} appears twice", a.name)));
            }
            if a.length == 0 {
                return Err(ModelError::Shape(format!("axis {:?} has length 0", a.name)));
            }
            if let Some(c) = &a.coordinate {
                if c.len() != a.length {
                    return Err(ModelError::Shape(format!(
                        "coordinate of axis {:?} has {} values for length {}",
                        a.name,
                        c.len(),
                        a.length
                    )));
                }
                c.check()?;
            }
        }
        match &self.payload {
            Payload::Series(series) => {
                if !self.axes.is_empty() {
                    return Err(ModelError::ProfileViolation("series datasets have no dense axes".into()));
                }
                for s in series {
                    s.check()?;
                }
                if let Some(w) = series.windows(2).find(|w| (w[0].run, &w[0].metric) >= (w[1].run, &w[1].metric)) {
                    return Err(ModelError::ProfileViolation(format!(
                        "series (run {}, {:?}) duplicated or out of order",
                        w[1].run, w[1].metric
                    )));
                }
            }
            other => {
                if other.shape() != self.shape().as_slice() {
                    return Err(ModelError::Shape(format!(
                        "data shape {:?} does not match axes {:?}",
                        other.shape(),
                        self.shape()
                    )));
                }
            }
        }
        for (axis, cc) in &self.channel_coords {
            let len = self.axis(axis)?.length;
            check_channel_coords(axis, len, cc)?;
        }
        Ok(())
    }
}

fn check_channel_coords(axis: &str, len: usize, cc: &ChannelCoords) -> Result<(), ModelError> {
    if cc.positions.len() != len {
        return Err(ModelError::Shape(format!(
            "{} positions for axis {axis:?} of length {len}",
            cc.positions.len()
        )));
    }
    if let Some(i) = cc.positions.iter().position(|p| p.iter().any(|x| !x.is_finite())) {
        return Err(ModelError::Shape(format!("position {i} of axis {axis:?} is not finite")));
    }
    if let Some(o) = &cc.orientations {
        if o.len() != len {
            return Err(ModelError::Shape(format!(
                "{} orientations for axis {axis:?} of length {len}",
                o.len()
            )));
        }
        for (i, q) in o.iter().enumerate() {
            let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !((norm - 1.0).abs() <= 1e-9) {
                return Err(ModelError::Norm(format!(
                    "orientation {i} of axis {axis:?} has norm {norm}, expected 1"
                )));
            }
        }
    }
    Ok(())
}

/// Attaches per-index positions (meters) and optional unit quaternions to
/// `axis`.
pub fn attach_channel_coords(
    ds: &DssDataset,
    axis: &str,
    positions: Vec<[f64; 3]>,
    orientations: Option<Vec<[f64; 4]>>,
) -> Result<DssDataset, ModelError> {
    let len = ds.axis(axis)?.length;
    let cc = ChannelCoords { positions, orientations };
    check_channel_coords(axis, len, &cc)?;
    let mut out = ds.clone();
    out.channel_coords.insert(axis.to_string(), cc);
    Ok(out)
}
