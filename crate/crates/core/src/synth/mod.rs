//! Synthetic channel-sounding and acoustic datasets from node geometry.
//!
//! Each link is a sum of discrete paths. RF links use the band-limited
//! pulse whose centred spectrum is `exp(-j 2 pi k tau / (N dtau))`
//! (`k = -N/2 .. N/2 - 1`), acoustic links a real sinc. Delays on the sample
//! grid give exact unit pulses. Noise comes from a ChaCha stream per link.

mod random;

use std::f64::consts::PI;

use ndarray::Array4;
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::error::ErrorClass;
use crate::model::{
    attach_channel_coords, AttrValue, Attrs, AxisDef, AxisKind, CoordinateVec, Domain, DssDataset, ModelError,
    Payload, Semantics,
};

pub use random::random_dataset;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const SPEED_OF_SOUND: f64 = 343.0;

// fractional delays closer than this to an integer (in samples) are snapped
const ON_GRID: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    /// A path delay falls outside `[0, N * dtau)`.
    #[error("window error: {0}")]
    Window(String),
    #[error("range error: {0}")]
    Range(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SynthError {
    pub fn class(&self) -> ErrorClass {
        match self {
            SynthError::Window(_) => ErrorClass::Window,
            SynthError::Range(_) => ErrorClass::Range,
            SynthError::Model(e) => e.class(),
        }
    }
}

/// One propagation path: delay in seconds and complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub delay: f64,
    pub gain: Complex64,
}

impl PathComponent {
    pub fn new(delay: f64, gain: impl Into<Complex64>) -> Self {
        PathComponent {
            delay,
            gain: gain.into(),
        }
    }
}

/// Paths of every link.
///
/// With `los_gain` set, each link gets a line-of-sight path at
/// `|p_tx - p_rx| / c`. `paths` are added to every link as given.
/// Acoustic links use the real part of the gains.
#[derive(Debug, Clone, PartialEq)]
pub struct PathModel {
    pub los_gain: Option<Complex64>,
    pub paths: Vec<PathComponent>,
    pub noise_std: f64,
    pub seed: u64,
    /// Overrides the speed of light / sound.
    pub speed: Option<f64>,
}

impl Default for PathModel {
    fn default() -> Self {
        PathModel::los()
    }
}

impl PathModel {
    /// Unit-gain line of sight, no noise.
    pub fn los() -> Self {
        PathModel {
            los_gain: Some(Complex64::new(1.0, 0.0)),
            paths: Vec::new(),
            noise_std: 0.0,
            seed: 0,
            speed: None,
        }
    }

    pub fn explicit(paths: Vec<PathComponent>) -> Self {
        PathModel {
            los_gain: None,
            paths,
            ..PathModel::los()
        }
    }

    pub fn with_path(mut self, delay: f64, gain: impl Into<Complex64>) -> Self {
        self.paths.push(PathComponent::new(delay, gain));
        self
    }

    pub fn with_noise(mut self, std: f64, seed: u64) -> Self {
        self.noise_std = std;
        self.seed = seed;
        self
    }

    fn link_paths(&self, a: [f64; 3], b: [f64; 3], c: f64) -> Vec<PathComponent> {
        let mut out = Vec::with_capacity(self.paths.len() + 1);
        if let Some(g) = self.los_gain {
            out.push(PathComponent::new(distance(a, b) / c, g));
        }
        out.extend_from_slice(&self.paths);
        out
    }
}

/// Transmitter (speaker) and receiver (microphone) positions in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub tx: Vec<[f64; 3]>,
    pub rx: Vec<[f64; 3]>,
}

pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn check_inputs(geometry: &Geometry, fs: f64, n: usize, paths: &PathModel) -> Result<(), SynthError> {
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(SynthError::Range(format!("sampling rate {fs} must be positive")));
    }
    if n == 0 {
        return Err(SynthError::Range("n_samples must be at least 1".into()));
    }
    if geometry.tx.is_empty() || geometry.rx.is_empty() {
        return Err(SynthError::Range("geometry needs at least one transmitter and one receiver".into()));
    }
    if geometry.tx.iter().chain(&geometry.rx).flatten().any(|v| !v.is_finite()) {
        return Err(SynthError::Range("positions must be finite".into()));
    }
    if !(paths.noise_std >= 0.0 && paths.noise_std.is_finite()) {
        return Err(SynthError::Range(format!("noise_std {} must be >= 0", paths.noise_std)));
    }
    if let Some(c) = paths.speed {
        if !(c > 0.0 && c.is_finite()) {
            return Err(SynthError::Range(format!("propagation speed {c} must be positive")));
        }
    }
    Ok(())
}

/// Delay in samples, checked against the window.
fn delay_samples(p: &PathComponent, fs: f64, n: usize) -> Result<f64, SynthError> {
    let window = n as f64 / fs;
    if !(p.delay >= 0.0 && p.delay < window) {
        return Err(SynthError::Window(format!(
            "path delay {} s is outside the observable window [0, {window}) s",
            p.delay
        )));
    }
    Ok(p.delay * fs)
}

fn snapped(delta: f64) -> Option<usize> {
    let r = delta.round();
    ((delta - r).abs() < ON_GRID).then_some(r as usize)
}

/// Adds `gain` times the band-limited pulse delayed by `delta` samples.
fn add_complex_pulse(out: &mut [Complex64], delta: f64, gain: Complex64) {
    let n = out.len();
    if let Some(i) = snapped(delta) {
        out[i % n] += gain;
        return;
    }
    let nf = n as f64;
    for (k, o) in out.iter_mut().enumerate() {
        let d = k as f64 - delta;
        let amp = (PI * d).sin() / (nf * (PI * d / nf).sin());
        let phase = if n % 2 == 0 { -PI * d / nf } else { 0.0 };
        *o += gain * Complex64::from_polar(amp, phase);
    }
}

fn add_real_pulse(out: &mut [f64], delta: f64, gain: f64) {
    if let Some(i) = snapped(delta) {
        if i < out.len() {
            out[i] += gain;
        }
        return;
    }
    for (k, o) in out.iter_mut().enumerate() {
        let d = PI * (k as f64 - delta);
        *o += gain * d.sin() / d;
    }
}

fn link_rng(seed: u64, link: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(link as u64);
    rng
}

fn sample_coordinate(fs: f64, n: usize, semantics: Semantics) -> Result<CoordinateVec, ModelError> {
    CoordinateVec::new((0..n).map(|k| k as f64 / fs).collect(), "s", semantics)
}

/// Delay-domain channel-sounding dataset `(tx, rx, time=1, sample)`.
///
/// Attributes: `center_frequency = fc`, `bandwidth = sampling_rate = fs`.
/// Positions are attached to the tx and rx axes.
pub fn gen_channel_sounding(
    geometry: &Geometry,
    fs: f64,
    fc: f64,
    n_samples: usize,
    paths: &PathModel,
) -> Result<DssDataset, SynthError> {
    check_inputs(geometry, fs, n_samples, paths)?;
    if !fc.is_finite() {
        return Err(SynthError::Range(format!("center frequency {fc} must be finite")));
    }
    let c = paths.speed.unwrap_or(SPEED_OF_LIGHT);
    let (ntx, nrx, n) = (geometry.tx.len(), geometry.rx.len(), n_samples);
    let mut data = Array4::<Complex64>::zeros((ntx, nrx, 1, n));
    let noise = paths.noise_std / 2f64.sqrt();
    for (t, &ptx) in geometry.tx.iter().enumerate() {
        for (r, &prx) in geometry.rx.iter().enumerate() {
            let mut lane = vec![Complex64::default(); n];
            for p in paths.link_paths(ptx, prx, c) {
                add_complex_pulse(&mut lane, delay_samples(&p, fs, n)?, p.gain);
            }
            if paths.noise_std > 0.0 {
                let mut rng = link_rng(paths.seed, t * nrx + r);
                for v in lane.iter_mut() {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    *v += Complex64::new(re, im) * noise;
                }
            }
            for (k, v) in lane.into_iter().enumerate() {
                data[[t, r, 0, k]] = v;
            }
        }
    }
    let axes = vec![
        AxisDef::of(AxisKind::Tx, ntx),
        AxisDef::of(AxisKind::Rx, nrx),
        AxisDef::of(AxisKind::Time, 1)
            .with_coordinate(CoordinateVec::new(vec![0.0], "s", Semantics::TimeSeconds)?),
        AxisDef::of(AxisKind::Sample, n).with_coordinate(sample_coordinate(fs, n, Semantics::DelaySeconds)?),
    ];
    let mut attrs = Attrs::new();
    attrs.insert("center_frequency".into(), AttrValue::Number(fc));
    attrs.insert("bandwidth".into(), AttrValue::Number(fs));
    attrs.insert("sampling_rate".into(), AttrValue::Number(fs));
    attrs.insert("source".into(), AttrValue::from("synthetic"));
    let ds = DssDataset::new(crate::model::CHANNEL_SOUNDING, axes, Domain::Delay, attrs)?
        .with_payload(Payload::Complex(data.into_dyn()))?;
    let ds = attach_channel_coords(&ds, "tx", geometry.tx.clone(), None)?;
    Ok(attach_channel_coords(&ds, "rx", geometry.rx.clone(), None)?)
}

/// Real room impulse responses `(speaker, microphone, channel=1, sample)`
/// over time, `c = 343 m/s` unless overridden.
pub fn gen_acoustic(geometry: &Geometry, fs: f64, n_samples: usize, paths: &PathModel) -> Result<DssDataset, SynthError> {
    check_inputs(geometry, fs, n_samples, paths)?;
    let c = paths.speed.unwrap_or(SPEED_OF_SOUND);
    let (nsp, nmic, n) = (geometry.tx.len(), geometry.rx.len(), n_samples);
    let mut data = Array4::<f64>::zeros((nsp, nmic, 1, n));
    for (s, &psp) in geometry.tx.iter().enumerate() {
        for (m, &pmic) in geometry.rx.iter().enumerate() {
            let mut lane = vec![0.0; n];
            for p in paths.link_paths(psp, pmic, c) {
                add_real_pulse(&mut lane, delay_samples(&p, fs, n)?, p.gain.re);
            }
            if paths.noise_std > 0.0 {
                let mut rng = link_rng(paths.seed, s * nmic + m);
                for v in lane.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v += z * paths.noise_std;
                }
            }
            for (k, v) in lane.into_iter().enumerate() {
                data[[s, m, 0, k]] = v;
            }
        }
    }
    let axes = vec![
        AxisDef::of(AxisKind::Speaker, nsp),
        AxisDef::of(AxisKind::Microphone, nmic),
        AxisDef::of(AxisKind::Channel, 1),
        AxisDef::of(AxisKind::Sample, n).with_coordinate(sample_coordinate(fs, n, Semantics::TimeSeconds)?),
    ];
    let mut attrs = Attrs::new();
    attrs.insert("sampling_rate".into(), AttrValue::Number(fs));
    attrs.insert("speed_of_sound".into(), AttrValue::Number(c));
    attrs.insert("source".into(), AttrValue::from("synthetic"));
    let ds = DssDataset::new(crate::model::ACOUSTIC, axes, Domain::Time, attrs)?
        .with_payload(Payload::Real(data.into_dyn()))?;
    let ds = attach_channel_coords(&ds, "speaker", geometry.tx.clone(), None)?;
    Ok(attach_channel_coords(&ds, "microphone", geometry.rx.clone(), None)?)
}

/// Parameters of the four-receiver channel-sounding example: 1 GHz
/// bandwidth around 6.95 GHz, 1024 delay bins, receivers 2 cm apart.
pub mod fig4 {
    pub const CENTER_FREQUENCY: f64 = 6.95e9;
    pub const BANDWIDTH: f64 = 1e9;
    pub const N_SAMPLES: usize = 1024;
    pub const RX_SPACING: f64 = 0.02;
    pub const N_RX: usize = 4;
    pub const TX_POSITION: [f64; 3] = [0.0, 0.0, 2.0];
    pub const RX_START: [f64; 3] = [1.0, 3.0, 1.0];

    pub fn geometry() -> super::Geometry {
        super::Geometry {
            tx: vec![TX_POSITION],
            rx: (0..N_RX)
                .map(|i| [RX_START[0] + RX_SPACING * i as f64, RX_START[1], RX_START[2]])
                .collect(),
        }
    }
}

/// The four-receiver example with the given paths (see [`fig4`]).
pub fn fig4_preset(paths: &PathModel) -> Result<DssDataset, SynthError> {
    gen_channel_sounding(&fig4::geometry(), fig4::BANDWIDTH, fig4::CENTER_FREQUENCY, fig4::N_SAMPLES, paths)
}

/// Two speakers and sixteen microphones at 48 kHz. Microphone 0 is 3.43 m
/// from speaker 0.
pub mod acoustic_demo {
    pub const SAMPLING_RATE: f64 = 48_000.0;
    pub const N_SAMPLES: usize = 2048;
    pub const N_SPEAKERS: usize = 2;
    pub const N_MICS: usize = 16;
    pub const MIC_SPACING: f64 = 0.1;

    pub fn geometry() -> super::Geometry {
        super::Geometry {
            tx: vec![[0.0, 0.0, 1.2], [1.0, 0.0, 1.2]],
            rx: (0..N_MICS).map(|i| [MIC_SPACING * i as f64, 3.43, 1.2]).collect(),
        }
    }
}

pub fn acoustic_preset(paths: &PathModel) -> Result<DssDataset, SynthError> {
    gen_acoustic(
        &acoustic_demo::geometry(),
        acoustic_demo::SAMPLING_RATE,
        acoustic_demo::N_SAMPLES,
        paths,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn off_grid_pulse_matches_direct_sum() {
        let n = 16;
        let delta = 3.3;
        let mut out = vec![Complex64::default(); n];
        add_complex_pulse(&mut out, delta, Complex64::new(1.0, 0.0));
        for (i, v) in out.iter().enumerate() {
            let direct: Complex64 = (-(n as i64) / 2..n as i64 / 2)
                .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 * (i as f64 - delta) / n as f64))
                .sum::<Complex64>()
                / n as f64;
            assert!((v - direct).norm() < 1e-12, "{i}: {v} vs {direct}");
        }
    }

    #[test]
    fn snapping() {
        assert_eq!(snapped(480.00000000000006), Some(480));
        assert_eq!(snapped(3.5), None);
    }
}
