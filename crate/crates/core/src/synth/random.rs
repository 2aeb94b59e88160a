//! Seeded random datasets for round-trip and fuzz testing. Values include
//! NaN payloads, signed zeros, infinities and subnormals.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SynthError;
use crate::descfiles::DocKind;
use crate::model::{
    attach_channel_coords, AttrValue, Attrs, AxisDef, AxisKind, CoordinateVec, Domain, DssDataset, HardwareAttribute,
    ModelError, Payload, RaggedSeries, Semantics, ACOUSTIC, CHANNEL_SOUNDING, SIMULATION,
};

const SPECIALS: [f64; 9] = [
    0.0,
    -0.0,
    f64::INFINITY,
    f64::NEG_INFINITY,
    f64::NAN,
    f64::MIN_POSITIVE,
    5e-324,
    f64::MAX,
    -1.5,
];

const TEXTS: [&str; 6] = ["", "plain", "ünïcödé ✓", "line\nbreak", "quote \" and ' ", "tab\tsep"];

fn value(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..10) {
        0 => SPECIALS[rng.random_range(0..SPECIALS.len())],
        // any bit pattern, NaN payloads included
        1..=3 => f64::from_bits(rng.next_u64()),
        _ => rng.random_range(-1e3..1e3),
    }
}

fn finite(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v = value(rng);
        if v.is_finite() {
            return v;
        }
    }
}

fn text(rng: &mut ChaCha8Rng) -> String {
    TEXTS[rng.random_range(0..TEXTS.len())].to_string()
}

fn monotonic(rng: &mut ChaCha8Rng, n: usize, strict: bool) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut x: f64 = rng.random_range(-1e3..1e3);
    for _ in 0..n {
        v.push(x);
        let step: f64 = rng.random_range(0.0..10.0);
        x += if strict { step + 1e-3 } else if rng.random_bool(0.2) { 0.0 } else { step };
    }
    v
}

fn attrs(rng: &mut ChaCha8Rng, required: &[&str]) -> Attrs {
    let mut a = Attrs::new();
    for name in required {
        a.insert((*name).into(), AttrValue::Number(rng.random_range(1.0..1e10)));
    }
    for i in 0..rng.random_range(0..4) {
        let v = if rng.random_bool(0.5) {
            AttrValue::Number(value(rng))
        } else {
            AttrValue::Text(text(rng))
        };
        a.insert(format!("extra_{i}"), v);
    }
    a
}

fn unit_quaternion(rng: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            let q = q.map(|x| x / n);
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (n - 1.0).abs() <= 1e-12 {
                return q;
            }
        }
    }
}

fn decorate(mut ds: DssDataset, rng: &mut ChaCha8Rng) -> Result<DssDataset, ModelError> {
    let axes: Vec<(String, usize)> = ds.axes.iter().map(|a| (a.name.clone(), a.length)).collect();
    for (name, len) in axes.iter().take(2) {
        if rng.random_bool(0.5) {
            let pos = (0..*len).map(|_| std::array::from_fn(|_| finite(rng))).collect();
            let ori = rng
                .random_bool(0.5)
                .then(|| (0..*len).map(|_| unit_quaternion(rng)).collect());
            ds = attach_channel_coords(&ds, name, pos, ori)?;
        }
    }
    if rng.random_bool(0.5) {
        ds = ds.with_metadata(
            DocKind::DataSource,
            "B210",
            "kind: data_source\nid: B210\nsource_type: SDR\nnum_channels: 2\n",
        );
    }
    if rng.random_bool(0.3) {
        ds = ds.with_metadata(DocKind::Environment, "lab_ü", &format!("note: {}\n", text(rng)));
    }
    if rng.random_bool(0.5) {
        let rows = rng.random_range(1..5);
        let cols = rng.random_range(1..4);
        let values = ArrayD::from_shape_fn(IxDyn(&[rows, cols]), |_| value(rng));
        let units = if rng.random_bool(0.5) {
            (0..cols).map(|_| text(rng)).collect()
        } else {
            Vec::new()
        };
        ds = ds.with_hardware_attribute("amp_1", "gain_table", HardwareAttribute { values, units })?;
    }
    Ok(ds)
}

fn dense(rng: &mut ChaCha8Rng, dataset_type: &str) -> Result<DssDataset, ModelError> {
    let channel = dataset_type == CHANNEL_SOUNDING;
    let kinds = if channel {
        [AxisKind::Tx, AxisKind::Rx, AxisKind::Time, AxisKind::Sample]
    } else {
        [AxisKind::Speaker, AxisKind::Microphone, AxisKind::Channel, AxisKind::Sample]
    };
    let lens = [rng.random_range(1..3), rng.random_range(1..5), rng.random_range(1..4), rng.random_range(1..17)];
    let domain = match (channel, rng.random_bool(0.5)) {
        (true, true) => Domain::Delay,
        (true, false) => Domain::Frequency,
        (false, _) => Domain::Time,
    };
    let mut axes: Vec<AxisDef> = kinds.iter().zip(lens).map(|(k, n)| AxisDef::of(*k, n)).collect();
    if rng.random_bool(0.7) {
        let n = lens[3];
        let (values, unit, sem) = match domain {
            Domain::Delay => (monotonic(rng, n, false), "s", Semantics::DelaySeconds),
            Domain::Frequency => (monotonic(rng, n, true), "Hz", Semantics::FrequencyHzAbsolute),
            _ => (monotonic(rng, n, false), "s", Semantics::TimeSeconds),
        };
        axes[3].coordinate = Some(CoordinateVec::new(values, unit, sem)?);
    }
    if channel && rng.random_bool(0.5) {
        axes[2].coordinate = Some(CoordinateVec::new(monotonic(rng, lens[2], false), "s", Semantics::TimeSeconds)?);
    }
    if rng.random_bool(0.3) {
        let v = (0..lens[1]).map(|_| finite(rng)).collect();
        axes[1].coordinate = Some(CoordinateVec::new(v, text(rng).replace('\n', " "), Semantics::Index)?);
    }
    let required: &[&str] = if channel {
        &["center_frequency", "bandwidth"]
    } else {
        &["sampling_rate"]
    };
    let a = attrs(rng, required);
    let ds = DssDataset::new(dataset_type, axes, domain, a)?;
    let shape = IxDyn(&lens);
    let payload = if channel {
        Payload::Complex(ArrayD::from_shape_fn(shape, |_| Complex64::new(value(rng), value(rng))))
    } else {
        Payload::Real(ArrayD::from_shape_fn(shape, |_| value(rng)))
    };
    decorate(ds.with_payload(payload)?, rng)
}

fn simulation(rng: &mut ChaCha8Rng) -> Result<DssDataset, ModelError> {
    let mut series = Vec::new();
    for run in 0..rng.random_range(0..4u32) {
        for metric in ["snr", "throughput", "ber"] {
            if rng.random_bool(0.6) {
                let n = rng.random_range(0..8);
                let ts = monotonic(rng, n, true);
                let points = ts.into_iter().map(|t| (t, value(rng))).collect();
                series.push(RaggedSeries::new(run * 7, metric, points, text(rng).replace('\n', " "))?);
            }
        }
    }
    let mut ds = DssDataset::simulation(series, attrs(rng, &[]))?;
    if rng.random_bool(0.5) {
        ds.domain = Domain::Time;
    }
    decorate(ds, rng)
}

/// A random valid dataset of a built-in type, fully determined by `seed`.
pub fn random_dataset(dataset_type: &str, seed: u64) -> Result<DssDataset, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = match dataset_type {
        CHANNEL_SOUNDING | ACOUSTIC => dense(&mut rng, dataset_type)?,
        SIMULATION => simulation(&mut rng)?,
        other => return Err(ModelError::UnknownType(other.to_string()).into()),
    };
    ds.check()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_valid() {
        for seed in 0..50 {
            for t in [CHANNEL_SOUNDING, ACOUSTIC, SIMULATION] {
                let a = random_dataset(t, seed).unwrap();
                assert_eq!(a, random_dataset(t, seed).unwrap());
            }
        }
    }
}
