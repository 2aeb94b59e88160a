use std::f64::consts::PI;

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;

use super::transform::{cir_to_tf, sample_axis, sample_grid, tf_to_cir};
use super::AnalysisError;
use crate::model::{slice, AxisKind, Domain, DssDataset, ModelError, Payload, SliceSelector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    TimeComplex,
    MagnitudeDb,
    PhaseRad,
    RirAmplitude,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::TimeComplex => "time_complex",
            PlotKind::MagnitudeDb => "magnitude_db",
            PlotKind::PhaseRad => "phase_rad",
            PlotKind::RirAmplitude => "rir_amplitude",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl SeriesValues {
    pub fn len(&self) -> usize {
        match self {
            SeriesValues::Real(v) => v.len(),
            SeriesValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: SeriesValues,
}

/// Renderer-independent plot data: one x vector shared by all series.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub title: String,
    pub x_label: String,
    pub x_unit: String,
    pub x: Vec<f64>,
    pub series: Vec<Series>,
    pub kind: PlotKind,
}

impl PlotSeries {
    pub fn check(&self) -> Result<(), AnalysisError> {
        match self.series.iter().find(|s| s.values.len() != self.x.len()) {
            Some(s) => Err(ModelError::Shape(format!(
                "series {:?} has {} values, x has {}",
                s.label,
                s.values.len(),
                self.x.len()
            ))
            .into()),
            None => Ok(()),
        }
    }
}

/// Slices `ds` and checks that every axis except `keep` and the sample axis
/// ended up with a single index. Returns the slice and the source indices of
/// the `keep` axis.
fn select_links(
    ds: &DssDataset,
    sel: &SliceSelector,
    keep: AxisKind,
    what: &str,
) -> Result<(DssDataset, usize, Vec<usize>), AnalysisError> {
    let picks = sel.resolve(&ds.axes)?;
    let sample = sample_axis(ds)?;
    let keep_axis = ds.axes.iter().position(|a| a.kind == keep);
    for (k, (a, idx)) in ds.axes.iter().zip(&picks).enumerate() {
        if k != sample && Some(k) != keep_axis && idx.len() != 1 {
            return Err(AnalysisError::Selection(format!(
                "{what} needs a single {} index, {} selected",
                a.name,
                idx.len()
            )));
        }
    }
    let keep_axis = keep_axis.unwrap_or(sample);
    let sliced = slice(ds, sel)?;
    Ok((sliced, keep_axis, picks[keep_axis].clone()))
}

fn lanes<T: Clone>(data: &ArrayD<T>, link_axis: usize, sample: usize) -> Vec<Vec<T>> {
    if link_axis == sample {
        return vec![data.iter().cloned().collect()];
    }
    (0..data.shape()[link_axis])
        .map(|i| data.index_axis(Axis(link_axis), i).iter().cloned().collect())
        .collect()
}

fn require_axes(ds: &DssDataset, kinds: &[AxisKind], op: &str, profile: &str) -> Result<(), AnalysisError> {
    let missing: Vec<&str> = kinds
        .iter()
        .filter(|k| !ds.axes.iter().any(|a| a.kind == **k))
        .map(|k| k.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(AnalysisError::Profile(format!(
            "{op} needs a {profile} dataset; {} has no {} axis",
            ds.dataset_type,
            missing.join("/")
        )));
    }
    Ok(())
}

fn channel_links(ds: &DssDataset, sel: &SliceSelector, op: &str) -> Result<(DssDataset, usize, Vec<usize>), AnalysisError> {
    require_axes(ds, &[AxisKind::Tx, AxisKind::Rx, AxisKind::Time], op, "channel_sounding")?;
    if !matches!(ds.payload, Payload::Complex(_)) {
        return Err(AnalysisError::Profile(format!("{op} needs complex channel-sounding data")));
    }
    select_links(ds, sel, AxisKind::Rx, op)
}

fn axis_values(ds: &DssDataset) -> Result<Vec<f64>, AnalysisError> {
    let axis = &ds.axes[sample_axis(ds)?];
    match &axis.coordinate {
        Some(c) => Ok(c.values.clone()),
        None => {
            let (x0, dx) = sample_grid(ds)?;
            Ok((0..axis.length).map(|n| x0 + n as f64 * dx).collect())
        }
    }
}

fn complex_lanes(ds: &DssDataset, link_axis: usize) -> Result<Vec<Vec<Complex64>>, AnalysisError> {
    match &ds.payload {
        Payload::Complex(a) => Ok(lanes(a, link_axis, sample_axis(ds)?)),
        _ => Err(AnalysisError::Profile("expected complex data".into())),
    }
}

fn label(axis: &str, i: usize) -> String {
    format!("{axis}={i}")
}

/// Complex baseband channel response of the selected links over delay.
///
/// The selection must leave one tx and one time index; each selected rx
/// becomes one series. Frequency-domain data is converted first and the
/// title says so.
pub fn plot_cr(ds: &DssDataset, sel: &SliceSelector) -> Result<PlotSeries, AnalysisError> {
    let (mut sub, rx_axis, rx) = channel_links(ds, sel, "plot_cr")?;
    let mut title = format!("Channel response ({sel})");
    if sub.domain == Domain::Frequency {
        sub = tf_to_cir(&sub)?;
        title.push_str(" [converted from frequency domain]");
    } else if sub.domain != Domain::Delay {
        return Err(AnalysisError::Domain(format!("plot_cr cannot use {}-domain data", sub.domain)));
    }
    let name = ds.axes[rx_axis].name.clone();
    let series = complex_lanes(&sub, rx_axis)?
        .into_iter()
        .zip(&rx)
        .map(|(v, &i)| Series {
            label: label(&name, i),
            values: SeriesValues::Complex(v),
        })
        .collect();
    let p = PlotSeries {
        title,
        x_label: "delay".into(),
        x_unit: "s".into(),
        x: axis_values(&sub)?,
        series,
        kind: PlotKind::TimeComplex,
    };
    p.check()?;
    Ok(p)
}

/// `20 log10 |H|` and phase wrapped to `(-pi, pi]` over absolute frequency.
pub fn plot_tf(ds: &DssDataset, sel: &SliceSelector) -> Result<(PlotSeries, PlotSeries), AnalysisError> {
    let (mut sub, rx_axis, rx) = channel_links(ds, sel, "plot_tf")?;
    let mut note = String::new();
    if sub.domain == Domain::Delay {
        sub = cir_to_tf(&sub)?;
        note.push_str(" [converted from delay domain]");
    } else if sub.domain != Domain::Frequency {
        return Err(AnalysisError::Domain(format!("plot_tf cannot use {}-domain data", sub.domain)));
    }
    let name = ds.axes[rx_axis].name.clone();
    let x = axis_values(&sub)?;
    let links = complex_lanes(&sub, rx_axis)?;
    let mut mag = Vec::new();
    let mut phase = Vec::new();
    for (v, &i) in links.iter().zip(&rx) {
        mag.push(Series {
            label: label(&name, i),
            values: SeriesValues::Real(v.iter().map(|h| 20.0 * h.norm().log10()).collect()),
        });
        phase.push(Series {
            label: label(&name, i),
            values: SeriesValues::Real(v.iter().map(|h| wrap(h.arg())).collect()),
        });
    }
    let mk = |what: &str, series, kind| PlotSeries {
        title: format!("Transfer function {what} ({sel}){note}"),
        x_label: "frequency".into(),
        x_unit: "Hz".into(),
        x: x.clone(),
        series,
        kind,
    };
    let m = mk("magnitude", mag, PlotKind::MagnitudeDb);
    let p = mk("phase", phase, PlotKind::PhaseRad);
    m.check()?;
    p.check()?;
    Ok((m, p))
}

// maps -pi to pi and -0 to 0
fn wrap(p: f64) -> f64 {
    if p <= -PI {
        PI
    } else {
        p + 0.0
    }
}

/// Real room impulse response of one speaker/microphone/channel triple
/// over time.
pub fn plot_rir(ds: &DssDataset, sel: &SliceSelector) -> Result<PlotSeries, AnalysisError> {
    require_axes(ds, &[AxisKind::Speaker, AxisKind::Microphone], "plot_rir", "acoustic")?;
    if !matches!(ds.payload, Payload::Real(_)) {
        return Err(AnalysisError::Profile("plot_rir needs real-valued acoustic data".into()));
    }
    let sample = sample_axis(ds)?;
    let (sub, _, _) = select_links(ds, sel, ds.axes[sample].kind, "plot_rir")?;
    let picks = sel.resolve(&ds.axes)?;
    let label = ds
        .axes
        .iter()
        .zip(&picks)
        .enumerate()
        .filter(|(k, _)| *k != sample)
        .map(|(_, (a, idx))| format!("{}={}", a.name, idx[0]))
        .collect::<Vec<_>>()
        .join(" ");
    let values = match &sub.payload {
        Payload::Real(a) => a.iter().copied().collect(),
        _ => unreachable!(),
    };
    let x = match &sub.axes[sample].coordinate {
        Some(c) => c.values.clone(),
        None => {
            let fs = sub.attr_f64("sampling_rate").ok_or_else(|| {
                AnalysisError::Profile("acoustic dataset has neither a time coordinate nor sampling_rate".into())
            })?;
            (0..sub.axes[sample].length).map(|n| n as f64 / fs).collect()
        }
    };
    let p = PlotSeries {
        title: format!("Room impulse response ({label})"),
        x_label: "time".into(),
        x_unit: "s".into(),
        x,
        series: vec![Series {
            label,
            values: SeriesValues::Real(values),
        }],
        kind: PlotKind::RirAmplitude,
    };
    p.check()?;
    Ok(p)
}
