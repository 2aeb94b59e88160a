use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;

use super::transform::{
    cir_to_tf, complex_payload, fftshift, map_lanes, sample_axis, sample_grid, tf_to_cir, Unitary,
};
use super::AnalysisError;
use crate::model::{AttrValue, CoordinateVec, Domain, DssDataset, ModelError, Payload, Semantics};

/// Hardware attribute holding a component's frequency response as rows of
/// `[frequency_hz, re, im]`.
pub const FREQUENCY_RESPONSE_ATTR: &str = "frequency_response";

// bin edges are compared with this fraction of a bin as slack
const BIN_SLACK: f64 = 1e-6;
const BW_SLACK: f64 = 1e-12;

fn frequencies(ds: &DssDataset, axis: usize) -> Result<(Vec<f64>, f64), AnalysisError> {
    let (f0, df) = sample_grid(ds)?;
    let freqs = match &ds.axes[axis].coordinate {
        Some(c) => c.values.clone(),
        None => (0..ds.axes[axis].length).map(|m| f0 + m as f64 * df).collect(),
    };
    Ok((freqs, df))
}

fn require_domain(ds: &DssDataset, domain: Domain, op: &str) -> Result<(), AnalysisError> {
    if ds.domain != domain {
        return Err(AnalysisError::Domain(format!(
            "{op} needs {domain}-domain data, got {}",
            ds.domain
        )));
    }
    Ok(())
}

fn bandwidth(ds: &DssDataset) -> Result<f64, AnalysisError> {
    ds.attr_f64("bandwidth")
        .ok_or_else(|| AnalysisError::Profile("dataset has no bandwidth attribute".into()))
}

/// The band a frequency-domain dataset claims: `center_frequency +-
/// bandwidth / 2` when both are set, else the span of the bins.
fn covered_band(ds: &DssDataset, freqs: &[f64], df: f64) -> (f64, f64) {
    match (ds.attr_f64("center_frequency"), ds.attr_f64("bandwidth")) {
        (Some(fc), Some(bw)) => (fc - bw / 2.0, fc + bw / 2.0),
        _ => (freqs[0], freqs[freqs.len() - 1] + df),
    }
}

/// Keeps the bins with `f_lo <= f < f_hi`.
///
/// The band must lie within the dataset's band (`center_frequency +-
/// bandwidth / 2`). `bandwidth` and `center_frequency` become `f_hi - f_lo`
/// and the band midpoint, so selecting the full band is the identity and
/// selecting the same band twice equals selecting it once.
pub fn select_band(ds: &DssDataset, f_lo: f64, f_hi: f64) -> Result<DssDataset, AnalysisError> {
    require_domain(ds, Domain::Frequency, "select_band")?;
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo >= f_hi {
        return Err(AnalysisError::Range(format!("empty band [{f_lo}, {f_hi})")));
    }
    let axis = sample_axis(ds)?;
    let (freqs, df) = frequencies(ds, axis)?;
    let slack = BIN_SLACK * df;
    let (first, last) = covered_band(ds, &freqs, df);
    if f_lo < first - slack || f_hi > last + slack {
        return Err(AnalysisError::Range(format!(
            "band [{f_lo}, {f_hi}) Hz is outside the covered range [{first}, {last}) Hz"
        )));
    }
    let keep: Vec<usize> = (0..freqs.len())
        .filter(|&m| freqs[m] >= f_lo - slack && freqs[m] < f_hi - slack)
        .collect();
    if keep.is_empty() {
        return Err(AnalysisError::Range(format!(
            "band [{f_lo}, {f_hi}) Hz contains no frequency bin"
        )));
    }
    let mut out = ds.clone();
    if keep.len() != freqs.len() {
        out.payload = Payload::Complex(complex_payload(ds)?.select(Axis(axis), &keep));
        out.axes[axis].length = keep.len();
        let values = keep.iter().map(|&m| freqs[m]).collect();
        out.axes[axis].coordinate = Some(
            CoordinateVec::new(values, "Hz", Semantics::FrequencyHzAbsolute).map_err(AnalysisError::Model)?,
        );
    }
    out.attrs.insert("bandwidth".into(), AttrValue::Number(f_hi - f_lo));
    out.attrs.insert("center_frequency".into(), AttrValue::Number(0.5 * (f_lo + f_hi)));
    Ok(out)
}

/// [`select_band`] of width `new_bw` around `center_frequency`, in the
/// domain of the input.
pub fn reduce_bandwidth(ds: &DssDataset, new_bw: f64) -> Result<DssDataset, AnalysisError> {
    let bw = bandwidth(ds)?;
    if !(new_bw > 0.0 && new_bw <= bw * (1.0 + BW_SLACK)) {
        return Err(AnalysisError::Range(format!(
            "new bandwidth {new_bw} Hz must be in (0, {bw}]"
        )));
    }
    let fc = ds.attr_f64("center_frequency").unwrap_or(0.0);
    let (lo, hi) = (fc - new_bw / 2.0, fc + new_bw / 2.0);
    match ds.domain {
        Domain::Frequency => select_band(ds, lo, hi),
        Domain::Delay => tf_to_cir(&select_band(&cir_to_tf(ds)?, lo, hi)?),
        other => Err(AnalysisError::Domain(format!(
            "reduce_bandwidth needs delay- or frequency-domain data, got {other}"
        ))),
    }
}

/// Band-limited interpolation by `factor` (zero padding of the centred
/// spectrum). Samples at multiples of `factor` reproduce the input.
pub fn oversample(ds: &DssDataset, factor: usize) -> Result<DssDataset, AnalysisError> {
    if factor == 0 {
        return Err(AnalysisError::Range("oversampling factor must be at least 1".into()));
    }
    require_domain(ds, Domain::Delay, "oversample")?;
    let axis = sample_axis(ds)?;
    let data = complex_payload(ds)?;
    if factor == 1 {
        return Ok(ds.clone());
    }
    let n = ds.axes[axis].length;
    let m = n * factor;
    let (tau0, dtau) = sample_grid(ds)?;

    let fwd = Unitary::forward(n);
    let inv = Unitary::inverse(m);
    let gain = (factor as f64).sqrt();
    let half = n / 2;
    let mut spec = vec![Complex64::default(); n];
    let mut centred = vec![Complex64::default(); n];
    let mut padded = vec![Complex64::default(); m];
    let out = map_lanes(data, axis, m, |x, y| {
        spec.copy_from_slice(x);
        fwd.run(&mut spec);
        fftshift(&spec, &mut centred);
        padded.iter_mut().for_each(|p| *p = Complex64::default());
        // centred bin j holds frequency index j - N/2; place it at that index mod M
        for (j, c) in centred.iter().enumerate() {
            padded[(j + m - half) % m] = *c * gain;
        }
        y.copy_from_slice(&padded);
        inv.run(y);
    });

    let step = dtau / factor as f64;
    let mut res = ds.clone();
    res.payload = Payload::Complex(out);
    res.axes[axis].length = m;
    res.axes[axis].coordinate = Some(
        CoordinateVec::new((0..m).map(|j| tau0 + j as f64 * step).collect(), "s", Semantics::DelaySeconds)
            .map_err(AnalysisError::Model)?,
    );
    if let Some(fs) = ds.attr_f64("sampling_rate") {
        res.attrs.insert("sampling_rate".into(), AttrValue::Number(fs * factor as f64));
    }
    Ok(res)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    RaisedCosine,
    RootRaisedCosine,
    Rectangular,
}

impl PulseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PulseKind::RaisedCosine => "raised_cosine",
            PulseKind::RootRaisedCosine => "root_raised_cosine",
            PulseKind::Rectangular => "rectangular",
        }
    }
}

impl FromStr for PulseKind {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, AnalysisError> {
        match s {
            "raised_cosine" | "rc" => Ok(PulseKind::RaisedCosine),
            "root_raised_cosine" | "rrc" => Ok(PulseKind::RootRaisedCosine),
            "rectangular" | "rect" => Ok(PulseKind::Rectangular),
            other => Err(AnalysisError::Range(format!("unknown pulse shape {other:?}"))),
        }
    }
}

impl fmt::Display for PulseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spectral pulse shape. For the cosine shapes the occupied bandwidth is
/// `bandwidth`, i.e. symbol rate `bandwidth / (1 + rolloff)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    pub kind: PulseKind,
    pub rolloff: f64,
    pub bandwidth: f64,
}

impl PulseShape {
    pub fn new(kind: PulseKind, rolloff: f64, bandwidth: f64) -> Result<Self, AnalysisError> {
        let s = PulseShape { kind, rolloff, bandwidth };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), AnalysisError> {
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(AnalysisError::Range(format!("rolloff {} outside [0, 1]", self.rolloff)));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(AnalysisError::Range(format!(
                "pulse bandwidth {} must be positive",
                self.bandwidth
            )));
        }
        Ok(())
    }
}

/// Frequency response of `shape` at baseband frequency `f` (Hz).
pub fn pulse_response(shape: &PulseShape, f: f64) -> f64 {
    let f = f.abs();
    let half = shape.bandwidth / 2.0;
    let rc = |f: f64| {
        let beta = shape.rolloff;
        let rate = shape.bandwidth / (1.0 + beta);
        let pass = (1.0 - beta) * rate / 2.0;
        if f <= pass {
            1.0
        } else if f <= half {
            0.5 * (1.0 + (PI / (beta * rate) * (f - pass)).cos())
        } else {
            0.0
        }
    };
    match shape.kind {
        PulseKind::Rectangular => (f <= half) as u8 as f64,
        PulseKind::RaisedCosine => rc(f),
        PulseKind::RootRaisedCosine => rc(f).sqrt(),
    }
}

fn scale_bins(ds: &DssDataset, axis: usize, h: &[Complex64], divide: bool) -> Result<ArrayD<Complex64>, AnalysisError> {
    Ok(map_lanes(complex_payload(ds)?, axis, h.len(), |x, y| {
        for ((o, v), g) in y.iter_mut().zip(x).zip(h) {
            *o = if divide { v / g } else { v * g };
        }
    }))
}

/// Multiplies every bin by the shape's response around `center_frequency`.
pub fn apply_pulse_shaping(ds: &DssDataset, shape: &PulseShape) -> Result<DssDataset, AnalysisError> {
    shape.check()?;
    require_domain(ds, Domain::Frequency, "apply_pulse_shaping")?;
    let bw = bandwidth(ds)?;
    if shape.bandwidth > bw * (1.0 + BW_SLACK) {
        return Err(AnalysisError::Range(format!(
            "pulse bandwidth {} Hz exceeds the dataset bandwidth {bw} Hz",
            shape.bandwidth
        )));
    }
    let axis = sample_axis(ds)?;
    let (freqs, _) = frequencies(ds, axis)?;
    let fc = ds.attr_f64("center_frequency").unwrap_or(0.0);
    let h: Vec<Complex64> = freqs
        .iter()
        .map(|f| Complex64::new(pulse_response(shape, f - fc), 0.0))
        .collect();
    let mut out = ds.clone();
    out.payload = Payload::Complex(scale_bins(ds, axis, &h, false)?);
    out.attrs.insert("pulse_shape".into(), shape.kind.as_str().into());
    out.attrs.insert("pulse_rolloff".into(), AttrValue::Number(shape.rolloff));
    out.attrs.insert("pulse_bandwidth".into(), AttrValue::Number(shape.bandwidth));
    Ok(out)
}

fn response_table(ds: &DssDataset, component: &str) -> Result<Vec<[f64; 3]>, AnalysisError> {
    let attr = ds
        .hardware_attributes
        .get(component)
        .and_then(|m| m.get(FREQUENCY_RESPONSE_ATTR))
        .ok_or_else(|| {
            AnalysisError::Range(format!(
                "component {component:?} has no {FREQUENCY_RESPONSE_ATTR} attribute"
            ))
        })?;
    let v = &attr.values;
    if v.ndim() != 2 || v.shape()[1] != 3 || v.shape()[0] < 1 {
        return Err(ModelError::Shape(format!(
            "{component}/{FREQUENCY_RESPONSE_ATTR} must be N x 3 [frequency, re, im], got {:?}",
            v.shape()
        ))
        .into());
    }
    let rows: Vec<[f64; 3]> = v.outer_iter().map(|r| [r[0], r[1], r[2]]).collect();
    if rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(AnalysisError::Range(format!(
            "{component}/{FREQUENCY_RESPONSE_ATTR} frequencies are not strictly increasing"
        )));
    }
    Ok(rows)
}

fn interpolate(rows: &[[f64; 3]], f: f64) -> Option<Complex64> {
    let i = rows.partition_point(|r| r[0] < f);
    if i < rows.len() && rows[i][0] == f {
        return Some(Complex64::new(rows[i][1], rows[i][2]));
    }
    if i == 0 || i == rows.len() {
        return None;
    }
    let (a, b) = (rows[i - 1], rows[i]);
    let w = (f - a[0]) / (b[0] - a[0]);
    Some(Complex64::new(a[1] + w * (b[1] - a[1]), a[2] + w * (b[2] - a[2])))
}

/// Divides every bin by the product of the stored frequency responses of
/// `component_ids`, linearly interpolated onto the bins.
pub fn deembed(ds: &DssDataset, component_ids: &[&str]) -> Result<DssDataset, AnalysisError> {
    require_domain(ds, Domain::Frequency, "deembed")?;
    let axis = sample_axis(ds)?;
    let (freqs, _) = frequencies(ds, axis)?;
    let mut h = vec![Complex64::new(1.0, 0.0); freqs.len()];
    for id in component_ids {
        let rows = response_table(ds, id)?;
        for (g, &f) in h.iter_mut().zip(&freqs) {
            let r = interpolate(&rows, f).ok_or_else(|| {
                AnalysisError::Range(format!(
                    "{id}/{FREQUENCY_RESPONSE_ATTR} covers [{}, {}] Hz, bin at {f} Hz is outside",
                    rows[0][0],
                    rows[rows.len() - 1][0]
                ))
            })?;
            *g *= r;
        }
    }
    if let Some(f) = freqs.iter().zip(&h).find(|(_, g)| g.norm() == 0.0).map(|(f, _)| f) {
        return Err(AnalysisError::Range(format!("response is zero at {f} Hz")));
    }
    let mut out = ds.clone();
    out.payload = Payload::Complex(scale_bins(ds, axis, &h, true)?);
    out.attrs.insert("deembedded".into(), component_ids.join(",").into());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_shapes_at_edges() {
        let s = PulseShape::new(PulseKind::RaisedCosine, 0.5, 1.0).unwrap();
        assert_eq!(pulse_response(&s, 0.0), 1.0);
        assert!(pulse_response(&s, 0.5).abs() < 1e-15);
        assert_eq!(pulse_response(&s, 0.6), 0.0);
        let zero = PulseShape::new(PulseKind::RaisedCosine, 0.0, 1.0).unwrap();
        assert_eq!(pulse_response(&zero, 0.5), 1.0);
        assert_eq!(pulse_response(&zero, 0.51), 0.0);
    }

    #[test]
    fn interpolation() {
        let rows = [[0.0, 1.0, 0.0], [2.0, 3.0, -2.0]];
        assert_eq!(interpolate(&rows, 1.0), Some(Complex64::new(2.0, -1.0)));
        assert_eq!(interpolate(&rows, 2.0), Some(Complex64::new(3.0, -2.0)));
        assert_eq!(interpolate(&rows, 2.5), None);
    }
}
