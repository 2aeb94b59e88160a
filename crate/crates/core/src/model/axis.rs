use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// Role of a tensor axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxisKind {
    Tx,
    Rx,
    Time,
    Sample,
    Speaker,
    Microphone,
    Channel,
    Run,
    Metric,
    Custom,
}

impl AxisKind {
    pub const ALL: [AxisKind; 10] = [
        AxisKind::Tx,
        AxisKind::Rx,
        AxisKind::Time,
        AxisKind::Sample,
        AxisKind::Speaker,
        AxisKind::Microphone,
        AxisKind::Channel,
        AxisKind::Run,
        AxisKind::Metric,
        AxisKind::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisKind::Tx => "tx",
            AxisKind::Rx => "rx",
            AxisKind::Time => "time",
            AxisKind::Sample => "sample",
            AxisKind::Speaker => "speaker",
            AxisKind::Microphone => "microphone",
            AxisKind::Channel => "channel",
            AxisKind::Run => "run",
            AxisKind::Metric => "metric",
            AxisKind::Custom => "custom",
        }
    }
}

impl FromStr for AxisKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        AxisKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::Axis(format!("unknown axis kind {s:?}")))
    }
}

impl fmt::Display for AxisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What the values of a coordinate vector mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    DelaySeconds,
    FrequencyHzAbsolute,
    TimeSeconds,
    Index,
    PositionM,
    Custom,
}

impl Semantics {
    pub const ALL: [Semantics; 6] = [
        Semantics::DelaySeconds,
        Semantics::FrequencyHzAbsolute,
        Semantics::TimeSeconds,
        Semantics::Index,
        Semantics::PositionM,
        Semantics::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::DelaySeconds => "delay_seconds",
            Semantics::FrequencyHzAbsolute => "frequency_hz_absolute",
            Semantics::TimeSeconds => "time_seconds",
            Semantics::Index => "index",
            Semantics::PositionM => "position_m",
            Semantics::Custom => "custom",
        }
    }
}

impl FromStr for Semantics {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        Semantics::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::ProfileViolation(format!("unknown coordinate semantics {s:?}")))
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coordinate values along one axis.
#[derive(Debug, Clone)]
pub struct CoordinateVec {
    pub values: Vec<f64>,
    pub unit: String,
    pub semantics: Semantics,
}

impl CoordinateVec {
    pub fn new(values: Vec<f64>, unit: impl Into<String>, semantics: Semantics) -> Result<Self, ModelError> {
        let c = CoordinateVec {
            values,
            unit: unit.into(),
            semantics,
        };
        c.check()?;
        Ok(c)
    }

    /// `start + k * step` for `k in 0..n`.
    pub fn uniform(start: f64, step: f64, n: usize, unit: &str, semantics: Semantics) -> Result<Self, ModelError> {
        CoordinateVec::new((0..n).map(|k| start + k as f64 * step).collect(), unit, semantics)
    }

    /// Delay and time coordinates are nondecreasing, absolute frequencies
    /// strictly increasing.
    pub fn check(&self) -> Result<(), ModelError> {
        if let Some(bad) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::ProfileViolation(format!(
                "coordinate value {bad} is not finite"
            )));
        }
        let pairs = self.values.windows(2);
        let ok = match self.semantics {
            Semantics::DelaySeconds | Semantics::TimeSeconds => pairs.into_iter().all(|w| w[0] <= w[1]),
            Semantics::FrequencyHzAbsolute => pairs.into_iter().all(|w| w[0] < w[1]),
            _ => true,
        };
        if !ok {
            return Err(ModelError::ProfileViolation(format!(
                "{} coordinate is not monotonic",
                self.semantics
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn select(&self, indices: &[usize]) -> CoordinateVec {
        CoordinateVec {
            values: indices.iter().map(|&i| self.values[i]).collect(),
            unit: self.unit.clone(),
            semantics: self.semantics,
        }
    }
}

impl PartialEq for CoordinateVec {
    fn eq(&self, other: &Self) -> bool {
        self.unit == other.unit && self.semantics == other.semantics && super::bits_eq(&self.values, &other.values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisDef {
    pub name: String,
    pub kind: AxisKind,
    pub length: usize,
    pub coordinate: Option<CoordinateVec>,
}

impl AxisDef {
    pub fn new(name: impl Into<String>, kind: AxisKind, length: usize) -> Self {
        AxisDef {
            name: name.into(),
            kind,
            length,
            coordinate: None,
        }
    }

    /// An axis whose name is its kind, e.g. `tx`.
    pub fn of(kind: AxisKind, length: usize) -> Self {
        AxisDef::new(kind.as_str(), kind, length)
    }

    pub fn with_coordinate(mut self, c: CoordinateVec) -> Self {
        self.coordinate = Some(c);
        self
    }
}

/// Domain of the sample axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Delay,
    Frequency,
    Time,
    None,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Delay => "delay",
            Domain::Frequency => "frequency",
            Domain::Time => "time",
            Domain::None => "none",
        }
    }
}

impl FromStr for Domain {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        [Domain::Delay, Domain::Frequency, Domain::Time, Domain::None]
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| ModelError::ProfileViolation(format!("unknown domain {s:?}")))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
