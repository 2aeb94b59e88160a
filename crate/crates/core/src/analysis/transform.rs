use std::sync::Arc;

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::AnalysisError;
use crate::model::{AttrValue, AxisKind, CoordinateVec, Domain, DssDataset, Payload, Semantics};

/// Relative tolerance for "uniform" coordinate grids.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Attribute holding the delay of the first sample while a dataset is in the
/// frequency domain.
pub const DELAY_OFFSET_ATTR: &str = "delay_offset";

/// Index of the sample axis: the axis of kind `sample`, else the last one.
pub fn sample_axis(ds: &DssDataset) -> Result<usize, AnalysisError> {
    if ds.axes.is_empty() {
        return Err(AnalysisError::Profile(format!(
            "{} datasets have no sample axis",
            ds.dataset_type
        )));
    }
    Ok(ds
        .axes
        .iter()
        .position(|a| a.kind == AxisKind::Sample)
        .unwrap_or(ds.axes.len() - 1))
}

/// `(first value, step)` of the sample axis grid.
///
/// Without a coordinate, or with a single value, delay grids start at 0
/// with step `1 / sampling_rate` (or `1 / bandwidth`) and frequency grids
/// are centred on `center_frequency` with step `bandwidth / N`.
pub fn sample_grid(ds: &DssDataset) -> Result<(f64, f64), AnalysisError> {
    let axis = &ds.axes[sample_axis(ds)?];
    let n = axis.length;
    let first = match &axis.coordinate {
        Some(c) if c.len() > 1 => return uniform_grid(&c.values, &axis.name),
        Some(c) => c.values.first().copied(),
        None => None,
    };
    let rate = ds.attr_f64("sampling_rate").or_else(|| ds.attr_f64("bandwidth"));
    match ds.domain {
        Domain::Delay | Domain::Time => {
            let rate = rate.ok_or_else(|| {
                AnalysisError::NonUniformGrid("no sample coordinate and no sampling_rate attribute".into())
            })?;
            Ok((first.unwrap_or(0.0), 1.0 / rate))
        }
        Domain::Frequency => {
            let bw = ds
                .attr_f64("bandwidth")
                .ok_or_else(|| AnalysisError::NonUniformGrid("no frequency coordinate and no bandwidth".into()))?;
            let fc = ds.attr_f64("center_frequency").unwrap_or(0.0);
            let df = bw / n as f64;
            Ok((first.unwrap_or(fc - (n / 2) as f64 * df), df))
        }
        Domain::None => Err(AnalysisError::Domain("dataset has no sample domain".into())),
    }
}

fn uniform_grid(v: &[f64], axis: &str) -> Result<(f64, f64), AnalysisError> {
    match v.len() {
        0 => Err(AnalysisError::NonUniformGrid(format!("axis {axis:?} is empty"))),
        1 => Err(AnalysisError::NonUniformGrid(format!(
            "axis {axis:?} has a single sample; its spacing is undefined"
        ))),
        n => {
            let step = (v[n - 1] - v[0]) / (n - 1) as f64;
            if step == 0.0 || !step.is_finite() {
                return Err(AnalysisError::NonUniformGrid(format!("axis {axis:?} has zero spacing")));
            }
            let tol = GRID_TOLERANCE * step.abs();
            if let Some(k) = v.windows(2).position(|w| ((w[1] - w[0]) - step).abs() > tol) {
                return Err(AnalysisError::NonUniformGrid(format!(
                    "axis {axis:?} spacing at index {k} deviates from {step} by more than {GRID_TOLERANCE:e} relative"
                )));
            }
            Ok((v[0], step))
        }
    }
}

pub(crate) fn complex_payload(ds: &DssDataset) -> Result<&ArrayD<Complex64>, AnalysisError> {
    match &ds.payload {
        Payload::Complex(a) => Ok(a),
        Payload::Real(_) => Err(AnalysisError::Profile(format!(
            "{} data is real-valued; transforms need complex baseband data",
            ds.dataset_type
        ))),
        Payload::Series(_) => Err(AnalysisError::Profile("series data has no sample axis".into())),
    }
}

/// Applies `f` to every lane along `axis`.
pub(crate) fn map_lanes(
    data: &ArrayD<Complex64>,
    axis: usize,
    out_len: usize,
    mut f: impl FnMut(&[Complex64], &mut [Complex64]),
) -> ArrayD<Complex64> {
    let mut shape = data.shape().to_vec();
    shape[axis] = out_len;
    let mut out = ArrayD::<Complex64>::zeros(shape);
    let mut input = Vec::with_capacity(data.shape()[axis]);
    let mut output = vec![Complex64::new(0.0, 0.0); out_len];
    for (src, mut dst) in data.lanes(Axis(axis)).into_iter().zip(out.lanes_mut(Axis(axis))) {
        input.clear();
        input.extend(src.iter().copied());
        f(&input, &mut output);
        dst.iter_mut().zip(&output).for_each(|(d, s)| *d = *s);
    }
    out
}

pub(crate) struct Unitary {
    fft: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl Unitary {
    pub(crate) fn forward(n: usize) -> Self {
        Unitary {
            fft: FftPlanner::new().plan_fft_forward(n),
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    pub(crate) fn inverse(n: usize) -> Self {
        Unitary {
            fft: FftPlanner::new().plan_fft_inverse(n),
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    pub(crate) fn run(&self, buf: &mut [Complex64]) {
        self.fft.process(buf);
        buf.iter_mut().for_each(|x| *x *= self.scale);
    }
}

/// `out[m] = X[k_m]` with `k_m = m - N/2`, i.e. the half-spectrum shift.
pub(crate) fn fftshift(x: &[Complex64], out: &mut [Complex64]) {
    let n = x.len();
    let h = n / 2;
    for (m, o) in out.iter_mut().enumerate() {
        *o = x[(m + n - h) % n];
    }
}

pub(crate) fn ifftshift(x: &[Complex64], out: &mut [Complex64]) {
    let n = x.len();
    let h = n / 2;
    for (m, o) in out.iter_mut().enumerate() {
        *o = x[(m + h) % n];
    }
}

/// Delay-domain responses to transfer functions.
///
/// Unitary DFT along the sample axis with the half-spectrum shift; the
/// frequency coordinate is `center_frequency + k * df` for
/// `k = -N/2 .. N/2 - 1` and `df = 1 / (N * d_tau)`.
pub fn cir_to_tf(ds: &DssDataset) -> Result<DssDataset, AnalysisError> {
    if ds.domain != Domain::Delay {
        return Err(AnalysisError::Domain(format!(
            "cir_to_tf needs delay-domain data, got {}",
            ds.domain
        )));
    }
    let axis = sample_axis(ds)?;
    let data = complex_payload(ds)?;
    let n = ds.axes[axis].length;
    let (tau0, dtau) = sample_grid(ds)?;
    let df = 1.0 / (n as f64 * dtau);
    let fc = ds.attr_f64("center_frequency").unwrap_or(0.0);

    let fft = Unitary::forward(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let out = map_lanes(data, axis, n, |x, y| {
        buf.copy_from_slice(x);
        fft.run(&mut buf);
        fftshift(&buf, y);
    });

    let h = (n / 2) as f64;
    let freqs: Vec<f64> = (0..n).map(|m| fc + (m as f64 - h) * df).collect();
    let mut res = ds.clone();
    res.payload = Payload::Complex(out);
    res.domain = Domain::Frequency;
    res.axes[axis].coordinate = Some(
        CoordinateVec::new(freqs, "Hz", Semantics::FrequencyHzAbsolute)
            .map_err(|e| AnalysisError::NonUniformGrid(e.to_string()))?,
    );
    res.attrs.insert(DELAY_OFFSET_ATTR.into(), AttrValue::Number(tau0));
    Ok(res)
}

/// Inverse of [`cir_to_tf`]. The delay grid starts at the stored
/// `delay_offset` (0 when absent) with step `1 / (N * df)`.
pub fn tf_to_cir(ds: &DssDataset) -> Result<DssDataset, AnalysisError> {
    if ds.domain != Domain::Frequency {
        return Err(AnalysisError::Domain(format!(
            "tf_to_cir needs frequency-domain data, got {}",
            ds.domain
        )));
    }
    let axis = sample_axis(ds)?;
    let data = complex_payload(ds)?;
    let n = ds.axes[axis].length;
    let (_, df) = sample_grid(ds)?;
    let dtau = 1.0 / (n as f64 * df);
    let tau0 = ds.attr_f64(DELAY_OFFSET_ATTR).unwrap_or(0.0);

    let ifft = Unitary::inverse(n);
    let out = map_lanes(data, axis, n, |x, y| {
        ifftshift(x, y);
        ifft.run(y);
    });

    let delays: Vec<f64> = (0..n).map(|k| tau0 + k as f64 * dtau).collect();
    let mut res = ds.clone();
    res.payload = Payload::Complex(out);
    res.domain = Domain::Delay;
    res.axes[axis].coordinate = Some(
        CoordinateVec::new(delays, "s", Semantics::DelaySeconds)
            .map_err(|e| AnalysisError::NonUniformGrid(e.to_string()))?,
    );
    res.attrs.remove(DELAY_OFFSET_ATTR);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifts_are_inverse() {
        for n in [1, 2, 5, 8] {
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 0.0)).collect();
            let mut a = vec![Complex64::default(); n];
            let mut b = vec![Complex64::default(); n];
            fftshift(&x, &mut a);
            ifftshift(&a, &mut b);
            assert_eq!(x, b);
        }
    }

    #[test]
    fn grid_detection() {
        assert_eq!(uniform_grid(&[1.0, 2.0, 3.0], "x").unwrap(), (1.0, 1.0));
        assert!(matches!(uniform_grid(&[0.0, 1.0, 3.0], "x"), Err(AnalysisError::NonUniformGrid(_))));
    }
}
