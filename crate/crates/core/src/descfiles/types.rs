use std::collections::BTreeMap;

use serde_yaml::Value;

use super::pointer::Pointer;

/// Keys that were not recognised, kept verbatim in document order.
pub type Extras = Vec<(String, Value)>;

/// Source locations of a typed node and of selected fields.
///
/// Positions never take part in equality: two documents are equal when their
/// content is, wherever the content was written.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    pub at: Pointer,
    pub fields: BTreeMap<String, Pointer>,
}

impl SourceMap {
    pub fn new(at: Pointer) -> Self {
        SourceMap { at, fields: BTreeMap::new() }
    }

    /// Pointer of `field`, falling back to where it would be under the node.
    pub fn field(&self, field: &str) -> Pointer {
        self.fields
            .get(field)
            .cloned()
            .unwrap_or_else(|| self.at.key(field))
    }
}

impl PartialEq for SourceMap {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

/// A scalar parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Text(String),
    Bool(bool),
}

/// A value with an optional unit, written either as a bare scalar or as
/// `{value: .., unit: ..}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: ParamValue,
    pub unit: Option<String>,
}

impl Quantity {
    pub fn number(value: f64, unit: Option<&str>) -> Self {
        Quantity {
            value: ParamValue::Number(value),
            unit: unit.map(str::to_string),
        }
    }

    /// Numeric value converted to SI when the unit is one of the interpreted
    /// ones; other units pass through unchanged.
    pub fn si_value(&self) -> Option<f64> {
        match self.value {
            ParamValue::Number(v) => Some(match &self.unit {
                Some(u) => super::units::to_si(v, u).map_or(v, |(si, _)| si),
                None => v,
            }),
            _ => None,
        }
    }
}

/// Reference to another description document, optionally carrying an inline
/// definition (a mapping with more than just `id`).
#[derive(Debug, Clone, PartialEq)]
pub struct Reference<T> {
    pub id: String,
    pub inline: Option<Box<T>>,
    pub source: SourceMap,
}

impl<T> Reference<T> {
    pub fn to(id: impl Into<String>) -> Self {
        Reference {
            id: id.into(),
            inline: None,
            source: SourceMap::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Antenna,
    Cable,
    Amplifier,
    Filter,
    Microphone,
    Sensor,
    Other,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 7] = [
        ComponentKind::Antenna,
        ComponentKind::Cable,
        ComponentKind::Amplifier,
        ComponentKind::Filter,
        ComponentKind::Microphone,
        ComponentKind::Sensor,
        ComponentKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Antenna => "antenna",
            ComponentKind::Cable => "cable",
            ComponentKind::Amplifier => "amplifier",
            ComponentKind::Filter => "filter",
            ComponentKind::Microphone => "microphone",
            ComponentKind::Sensor => "sensor",
            ComponentKind::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

/// Where the data of a hardware attribute lives.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeData {
    /// `file#/path/in/file` pointing into a DSS dataset file.
    File { file: String, dataset: String },
    /// Rows of numbers written in the description file.
    Inline(Vec<Vec<f64>>),
    Absent,
}

/// A characterisation attached to a hardware component, e.g. its frequency
/// response or AM-AM profile.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeRef {
    pub name: String,
    pub data: AttributeData,
    pub units: Vec<String>,
    pub extra: Extras,
    pub source: SourceMap,
}

/// A passive element of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareComponentDesc {
    pub id: String,
    pub name: String,
    pub kind: ComponentKind,
    pub ports: u64,
    pub attributes: Vec<AttributeRef>,
    pub extra: Extras,
    pub source: SourceMap,
}

/// An active digitising element (SDR, DAQ, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct DataSourceDesc {
    pub id: String,
    pub name: String,
    pub source_type: String,
    pub num_channels: u64,
    pub parameters: BTreeMap<String, Quantity>,
    pub extra: Extras,
    pub source: SourceMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelLocations {
    pub file: String,
    pub loc_unit: String,
    /// Array path when `file` is a DSS dataset file.
    pub dataset: Option<String>,
    pub extra: Extras,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationFormat {
    Quaternion,
    AxisAngle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOrientations {
    pub file: String,
    pub format: OrientationFormat,
    /// `rad` or `deg`, only used for axis-angle input.
    pub angle_unit: String,
    pub dataset: Option<String>,
    pub extra: Extras,
}

/// One chain of a data source and its hardware components, instantiated
/// `num_data_source_chains` times.
#[derive(Debug, Clone, PartialEq)]
pub struct DataChainDesc {
    pub label: String,
    pub data_source: Reference<DataSourceDesc>,
    /// Signal order, component nearest the medium first.
    pub hardware_components: Vec<Reference<HardwareComponentDesc>>,
    /// Raw selector text (`"k"` or half-open `"a:b"`).
    pub data_source_channel: String,
    pub num_data_source_chains: u64,
    pub channel_locations: Option<ChannelLocations>,
    pub channel_orientations: Option<ChannelOrientations>,
    pub extra: Extras,
    pub chain_extra: Extras,
    pub channel_chain_extra: Extras,
    pub source: SourceMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestbedDesc {
    pub id: String,
    pub name: String,
    pub description: String,
    pub url: Option<String>,
    pub level: String,
    pub data_chains: Vec<DataChainDesc>,
    pub extra: Extras,
    pub source: SourceMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileRef {
    pub role: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentDesc {
    pub id: String,
    pub properties: BTreeMap<String, Quantity>,
    pub file_refs: Vec<FileRef>,
    pub extra: Extras,
    pub source: SourceMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDesc {
    pub id: String,
    pub file: String,
    pub dataset_type: String,
    pub parameters: BTreeMap<String, Quantity>,
    pub extra: Extras,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelPair {
    pub tx: u64,
    pub rx: u64,
}

/// Transmit/receive channel mapping, in the experiment-wide channel index
/// space (testbeds concatenated in the listed order).
#[derive(Debug, Clone, PartialEq, Default)]
pub enum TxRxMapping {
    #[default]
    Unspecified,
    /// All-to-all between two selector-defined channel sets (all channels
    /// when a side is absent).
    Full { tx: Option<String>, rx: Option<String> },
    Pairs(Vec<ChannelPair>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediaKind {
    Photo,
    Video,
    Scan,
}

impl MediaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MediaKind::Photo => "photo",
            MediaKind::Video => "video",
            MediaKind::Scan => "scan",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [MediaKind::Photo, MediaKind::Video, MediaKind::Scan]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediaRef {
    pub kind: MediaKind,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDesc {
    pub id: String,
    pub name: String,
    pub testbeds: Vec<Reference<TestbedDesc>>,
    pub environment: Option<Reference<EnvironmentDesc>>,
    pub measurements: Vec<MeasurementDesc>,
    pub tx_rx_mapping: TxRxMapping,
    pub variables: BTreeMap<String, Quantity>,
    pub media: Vec<MediaRef>,
    /// Free-form description of anchor synchronisation.
    pub sync_info: Option<Value>,
    pub extra: Extras,
    pub source: SourceMap,
}
