use std::f64::consts::PI;

use dss_core::analysis::*;
use dss_core::model::*;
use dss_core::synth::{gen_channel_sounding, Geometry, PathModel};
use dss_core::ErrorClass;
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use proptest::prelude::*;

const FC: f64 = 6.95e9;
const BW: f64 = 1e9;

fn cir(data: ArrayD<Complex64>, dtau: f64) -> DssDataset {
    let s = data.shape().to_vec();
    let mut attrs = Attrs::new();
    attrs.insert("center_frequency".into(), FC.into());
    attrs.insert("bandwidth".into(), BW.into());
    let axes = vec![
        AxisDef::of(AxisKind::Tx, s[0]),
        AxisDef::of(AxisKind::Rx, s[1]),
        AxisDef::of(AxisKind::Time, s[2]),
        AxisDef::of(AxisKind::Sample, s[3])
            .with_coordinate(CoordinateVec::uniform(0.0, dtau, s[3], "s", Semantics::DelaySeconds).unwrap()),
    ];
    DssDataset::new(CHANNEL_SOUNDING, axes, Domain::Delay, attrs)
        .unwrap()
        .with_payload(Payload::Complex(data))
        .unwrap()
}

fn lane(ds: &DssDataset, tx: usize, rx: usize, t: usize) -> Vec<Complex64> {
    let d = ds.complex_data().unwrap();
    (0..d.shape()[3]).map(|k| d[[tx, rx, t, k]]).collect()
}

/// Naive unitary DFT, bins ordered k = -N/2 .. N/2 - 1.
fn dft_centred(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len() as i64;
    (-(n / 2)..n - n / 2)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * i as i64) as f64 / n as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

fn l2(x: impl Iterator<Item = Complex64>) -> f64 {
    x.map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn rel_l2(a: &ArrayD<Complex64>, b: &ArrayD<Complex64>) -> f64 {
    l2(a.iter().zip(b.iter()).map(|(x, y)| x - y)) / l2(b.iter().copied()).max(f64::MIN_POSITIVE)
}

fn tensor() -> impl Strategy<Value = ArrayD<Complex64>> {
    (1usize..3, 1usize..4, 1usize..3, 2usize..40).prop_flat_map(|(a, b, c, n)| {
        prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), a * b * c * n).prop_map(move |v| {
            ArrayD::from_shape_vec(IxDyn(&[a, b, c, n]), v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
                .unwrap()
        })
    })
}

fn flat_tf(n: usize, value: Complex64) -> DssDataset {
    let data = ArrayD::from_elem(IxDyn(&[1, 4, 1, n]), Complex64::new(0.0, 0.0));
    let ds = cir(data, 1.0 / BW);
    let tf = cir_to_tf(&ds).unwrap();
    tf.with_payload(Payload::Complex(ArrayD::from_elem(IxDyn(&[1, 4, 1, n]), value)))
        .unwrap()
}

fn two_path(n: usize, delays: &[f64]) -> DssDataset {
    let mut paths = PathModel::explicit(Vec::new());
    for (i, d) in delays.iter().enumerate() {
        paths = paths.with_path(*d, Complex64::new(1.0 / (1 + i) as f64, 0.0));
    }
    let g = Geometry {
        tx: vec![[0.0; 3]],
        rx: vec![[1.0, 0.0, 0.0]],
    };
    gen_channel_sounding(&g, BW, FC, n, &paths).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parseval_and_round_trip(data in tensor()) {
        let ds = cir(data.clone(), 1e-9);
        let tf = cir_to_tf(&ds).unwrap();
        let (e_t, e_f) = (l2(data.iter().copied()), l2(tf.complex_data().unwrap().iter().copied()));
        prop_assert!((e_t - e_f).abs() <= 1e-9 * e_t.max(f64::MIN_POSITIVE));
        let back = tf_to_cir(&tf).unwrap();
        prop_assert!(rel_l2(back.complex_data().unwrap(), &data) < 1e-9);
        prop_assert_eq!(&back.attrs, &ds.attrs);
    }

    #[test]
    fn matches_naive_dft(data in tensor()) {
        let ds = cir(data, 1e-9);
        let tf = cir_to_tf(&ds).unwrap();
        let want = dft_centred(&lane(&ds, 0, 0, 0));
        let got = lane(&tf, 0, 0, 0);
        let err = l2(want.iter().zip(&got).map(|(a, b)| a - b)) / l2(want.iter().copied()).max(1e-300);
        prop_assert!(err < 1e-9);
    }

    #[test]
    fn linearity(x in tensor(), alpha in -5.0f64..5.0, beta in -5.0f64..5.0) {
        let y = x.mapv(|v| Complex64::new(v.im, -v.re * 0.5));
        let combo = x.mapv(|v| v * alpha) + y.mapv(|v| v * beta);
        let lhs = cir_to_tf(&cir(combo, 1e-9)).unwrap();
        let fx = cir_to_tf(&cir(x, 1e-9)).unwrap();
        let fy = cir_to_tf(&cir(y, 1e-9)).unwrap();
        let rhs = fx.complex_data().unwrap().mapv(|v| v * alpha) + fy.complex_data().unwrap().mapv(|v| v * beta);
        prop_assert!(rel_l2(lhs.complex_data().unwrap(), &rhs) < 1e-9);
    }

    #[test]
    fn select_band_is_idempotent(lo in 0usize..32, width in 1usize..32, frac in 0.0f64..1.0) {
        let ds = cir_to_tf(&cir(ArrayD::from_elem(IxDyn(&[1, 1, 1, 64]), Complex64::new(1.0, 0.5)), 1.0 / BW)).unwrap();
        let df = BW / 64.0;
        let f0 = FC - BW / 2.0;
        let f_lo = f0 + (lo as f64 + frac) * df;
        let f_hi = (f_lo + width as f64 * df).min(f0 + BW);
        let once = select_band(&ds, f_lo, f_hi).unwrap();
        let twice = select_band(&once, f_lo, f_hi).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn oversample_composes(data in tensor(), a in 1usize..4, b in 1usize..4) {
        let ds = cir(data, 1e-9);
        let direct = oversample(&ds, a * b).unwrap();
        let nested = oversample(&oversample(&ds, a).unwrap(), b).unwrap();
        prop_assert!(rel_l2(nested.complex_data().unwrap(), direct.complex_data().unwrap()) < 1e-9);
    }

    #[test]
    fn oversample_keeps_original_samples(data in tensor(), factor in 1usize..6) {
        let ds = cir(data.clone(), 1e-9);
        let up = oversample(&ds, factor).unwrap();
        let u = up.complex_data().unwrap();
        let scale = l2(data.iter().copied()).max(f64::MIN_POSITIVE);
        for (idx, v) in data.indexed_iter() {
            let w = u[[idx[0], idx[1], idx[2], idx[3] * factor]];
            prop_assert!((w - v).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn plots_are_read_only(data in tensor()) {
        let ds = cir(data, 1e-9);
        let before = ds.clone();
        let sel = SliceSelector::parse("tx=0,t=0").unwrap();
        let _ = plot_cr(&ds, &sel);
        let _ = plot_tf(&ds, &sel);
        prop_assert_eq!(ds, before);
    }
}

#[test]
fn unit_impulse_gives_flat_spectrum() {
    let n = 16;
    let mut data = ArrayD::zeros(IxDyn(&[1, 1, 1, n]));
    data[[0, 0, 0, 0]] = Complex64::new(1.0, 0.0);
    let tf = cir_to_tf(&cir(data, 1e-9)).unwrap();
    for h in lane(&tf, 0, 0, 0) {
        assert!((h.norm() - 1.0 / (n as f64).sqrt()).abs() < 1e-15);
    }
    let f = &tf.axis("sample").unwrap().coordinate.as_ref().unwrap().values;
    assert_eq!(f[0], FC - 8.0 * 1e9 / 16.0);
    assert_eq!(f[8], FC);
}

#[test]
fn constant_tf_gives_impulse_at_zero() {
    let tf = flat_tf(8, Complex64::new(1.0, 0.0));
    let c = tf_to_cir(&tf).unwrap();
    let v = lane(&c, 0, 2, 0);
    assert!((v[0] - Complex64::new(8f64.sqrt(), 0.0)).norm() < 1e-12);
    assert!(v[1..].iter().all(|x| x.norm() < 1e-12));
}

/// Least-squares slope of `y` over `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn single_path_phase_slope() {
    for tau0 in [3e-9, 17.25e-9, 40.6e-9] {
        let ds = two_path(256, &[tau0]);
        let (_, phase) = plot_tf(&ds, &SliceSelector::parse("tx=0,rx=0,t=0").unwrap()).unwrap();
        let SeriesValues::Real(p) = &phase.series[0].values else { panic!() };
        let fitted = slope(&phase.x, &unwrap_phase(p));
        let want = -2.0 * PI * tau0;
        assert!(((fitted - want) / want).abs() < 1e-6, "tau0 {tau0}: {fitted} vs {want}");
        assert!(p.iter().all(|v| *v > -PI && *v <= PI));
    }
}

#[test]
fn transform_errors() {
    let ds = cir(ArrayD::zeros(IxDyn(&[1, 1, 1, 4])), 1e-9);
    let tf = cir_to_tf(&ds).unwrap();
    assert_eq!(cir_to_tf(&tf).unwrap_err().class(), ErrorClass::Domain);
    assert_eq!(tf_to_cir(&ds).unwrap_err().class(), ErrorClass::Domain);
    let bent = tf
        .clone()
        .with_coordinate(
            "sample",
            CoordinateVec::new(vec![1.0, 2.0, 3.5, 4.0], "Hz", Semantics::FrequencyHzAbsolute).unwrap(),
        )
        .unwrap();
    assert_eq!(tf_to_cir(&bent).unwrap_err().class(), ErrorClass::NonUniformGrid);
}

#[test]
fn band_selection() {
    let ds = cir_to_tf(&cir(ArrayD::from_elem(IxDyn(&[1, 2, 1, 1024]), Complex64::new(1.0, 0.0)), 1.0 / BW)).unwrap();
    let full = select_band(&ds, FC - BW / 2.0, FC + BW / 2.0).unwrap();
    assert_eq!(full, ds);
    let half = select_band(&ds, 6.7e9, 7.2e9).unwrap();
    assert_eq!(half.axis("sample").unwrap().length, 512);
    assert_eq!(half.attr_f64("center_frequency"), Some(6.95e9));
    assert_eq!(half.attr_f64("bandwidth"), Some(0.5e9));
    let f = &half.axis("sample").unwrap().coordinate.as_ref().unwrap().values;
    assert!(f[0] >= 6.7e9 && *f.last().unwrap() < 7.2e9);
    assert_eq!(select_band(&ds, 7.5e9, 7.6e9).unwrap_err().class(), ErrorClass::Range);
    assert_eq!(select_band(&ds, 7.0e9, 6.9e9).unwrap_err().class(), ErrorClass::Range);
    assert_eq!(select_band(&cir(ArrayD::zeros(IxDyn(&[1, 1, 1, 4])), 1e-9), 0.0, 1.0).unwrap_err().class(), ErrorClass::Domain);
}

fn peak(v: &[Complex64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap()
}

#[test]
fn bandwidth_reduction() {
    let ds = two_path(1024, &[100e-9, 400e-9]);
    let same = reduce_bandwidth(&ds, BW).unwrap();
    assert!(rel_l2(same.complex_data().unwrap(), ds.complex_data().unwrap()) < 1e-9);

    let narrow = reduce_bandwidth(&ds, 100e6).unwrap();
    assert_eq!(narrow.domain, Domain::Delay);
    assert_eq!(narrow.attr_f64("bandwidth"), Some(100e6));
    // bins k with |k df| inside the 100 MHz band, df = 1 GHz / 1024
    let df = BW / 1024.0;
    let kept = (-512i64..512).filter(|k| (*k as f64 * df) >= -50e6 && (*k as f64 * df) < 50e6).count();
    assert_eq!(narrow.axis("sample").unwrap().length, kept);
    let coord = &narrow.axis("sample").unwrap().coordinate.as_ref().unwrap().values;
    let dtau = coord[1] - coord[0];
    assert!((dtau - 1.0 / (kept as f64 * df)).abs() < 1e-18);
    let v = lane(&narrow, 0, 0, 0);
    let first = peak(&v);
    assert!((coord[first] - 100e-9).abs() <= dtau);
    // second path: strongest sample after masking the first pulse
    let masked: Vec<Complex64> = v
        .iter()
        .enumerate()
        .map(|(i, x)| if (coord[i] - 100e-9).abs() < 100e-9 { Complex64::default() } else { *x })
        .collect();
    assert!((coord[peak(&masked)] - 400e-9).abs() <= dtau);

    let tf = cir_to_tf(&ds).unwrap();
    assert_eq!(reduce_bandwidth(&tf, 100e6).unwrap().domain, Domain::Frequency);
    assert_eq!(reduce_bandwidth(&ds, 0.0).unwrap_err().class(), ErrorClass::Range);
    assert_eq!(reduce_bandwidth(&ds, 2e9).unwrap_err().class(), ErrorClass::Range);
}

#[test]
fn oversampling() {
    let ds = two_path(128, &[20.3e-9]);
    assert_eq!(oversample(&ds, 1).unwrap(), ds);
    let up = oversample(&ds, 4).unwrap();
    assert_eq!(up.axis("sample").unwrap().length, 512);
    let coord = &up.axis("sample").unwrap().coordinate.as_ref().unwrap().values;
    let p = peak(&lane(&up, 0, 0, 0));
    assert!((coord[p] - 20.3e-9).abs() <= 1e-9 / 4.0);
    assert_eq!(up.attr_f64("sampling_rate"), Some(4e9));
    assert_eq!(oversample(&ds, 0).unwrap_err().class(), ErrorClass::Range);
    assert_eq!(oversample(&cir_to_tf(&ds).unwrap(), 2).unwrap_err().class(), ErrorClass::Domain);
}

/// Raised cosine spectrum written from its textbook definition.
fn raised_cosine(f: f64, beta: f64, b: f64) -> f64 {
    let t = (1.0 + beta) / b;
    let f = f.abs();
    if f <= (1.0 - beta) / (2.0 * t) {
        1.0
    } else if f <= (1.0 + beta) / (2.0 * t) {
        0.5 * (1.0 + (PI * t / beta * (f - (1.0 - beta) / (2.0 * t))).cos())
    } else {
        0.0
    }
}

#[test]
fn pulse_shaping() {
    let tf = flat_tf(256, Complex64::new(1.0, 0.0));
    let rect = PulseShape::new(PulseKind::Rectangular, 0.0, BW).unwrap();
    let same = apply_pulse_shaping(&tf, &rect).unwrap();
    assert_eq!(same.complex_data(), tf.complex_data());
    assert_eq!(same.attrs.get("pulse_shape").and_then(|v| v.as_str()), Some("rectangular"));

    let rc = PulseShape::new(PulseKind::RaisedCosine, 0.25, BW).unwrap();
    let shaped = apply_pulse_shaping(&tf, &rc).unwrap();
    let f = &tf.axis("sample").unwrap().coordinate.as_ref().unwrap().values;
    for (k, h) in lane(&shaped, 0, 1, 0).iter().enumerate() {
        let want = raised_cosine(f[k] - FC, 0.25, BW);
        assert!((h.re - want).abs() < 1e-12 && h.im == 0.0, "bin {k}");
    }
    let rrc = PulseShape::new(PulseKind::RootRaisedCosine, 0.25, BW).unwrap();
    let root = apply_pulse_shaping(&tf, &rrc).unwrap();
    for (k, h) in lane(&root, 0, 0, 0).iter().enumerate() {
        assert!((h.re * h.re - raised_cosine(f[k] - FC, 0.25, BW)).abs() < 1e-12);
    }

    let wide = PulseShape { kind: PulseKind::Rectangular, rolloff: 0.0, bandwidth: 2e9 };
    assert_eq!(apply_pulse_shaping(&tf, &wide).unwrap_err().class(), ErrorClass::Range);
    assert_eq!(PulseShape::new(PulseKind::RaisedCosine, 1.5, BW).unwrap_err().class(), ErrorClass::Range);
}

#[test]
fn deembedding_divides_stored_response() {
    let tf = flat_tf(16, Complex64::new(2.0, 2.0));
    let f0 = FC - BW;
    let rows = [f0, 1.0, 1.0, FC + BW, 1.0, 1.0];
    let attr = HardwareAttribute {
        values: ArrayD::from_shape_vec(IxDyn(&[2, 3]), rows.to_vec()).unwrap(),
        units: vec!["Hz".into(), "".into(), "".into()],
    };
    let ds = tf.with_hardware_attribute("lna", FREQUENCY_RESPONSE_ATTR, attr).unwrap();
    let out = deembed(&ds, &["lna"]).unwrap();
    assert!(lane(&out, 0, 0, 0).iter().all(|h| (h - Complex64::new(2.0, 0.0)).norm() < 1e-12));

    let narrow = HardwareAttribute {
        values: ArrayD::from_shape_vec(IxDyn(&[2, 3]), vec![FC, 1.0, 0.0, FC + 1.0, 1.0, 0.0]).unwrap(),
        units: Vec::new(),
    };
    let ds = ds.with_hardware_attribute("filt", FREQUENCY_RESPONSE_ATTR, narrow).unwrap();
    assert_eq!(deembed(&ds, &["filt"]).unwrap_err().class(), ErrorClass::Range);
    assert_eq!(deembed(&ds, &["missing"]).unwrap_err().class(), ErrorClass::Range);
}

#[test]
fn plot_cr_selection() {
    let ds = cir(ArrayD::from_elem(IxDyn(&[1, 140, 2, 32]), Complex64::new(0.5, -0.5)), 1e-9);
    let p = plot_cr(&ds, &SliceSelector::parse("(tx=0, rx=[0,1,2,3], t=0)").unwrap()).unwrap();
    assert_eq!(p.series.len(), 4);
    assert_eq!(p.kind, PlotKind::TimeComplex);
    assert_eq!(p.series[3].label, "rx=3");
    let one = plot_cr(&ds, &SliceSelector::parse("(tx=0, rx=[5], t=0)").unwrap()).unwrap();
    assert_eq!(one.series.len(), 1);
    assert_eq!(one.series[0].values.len(), 32);
    assert_eq!(one.series[0].label, "rx=5");

    let two_tx = cir(ArrayD::zeros(IxDyn(&[2, 2, 1, 4])), 1e-9);
    let err = plot_cr(&two_tx, &SliceSelector::parse("(tx=[0,1], rx=0, t=0)").unwrap()).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Selection);
    let err = plot_cr(&ds, &SliceSelector::parse("tx=0,rx=0").unwrap()).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Selection);
    let err = plot_cr(&ds, &SliceSelector::parse("tx=0,rx=200,t=0").unwrap()).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Index);

    let tf = cir_to_tf(&ds).unwrap();
    let conv = plot_cr(&tf, &SliceSelector::parse("tx=0,rx=0,t=0").unwrap()).unwrap();
    assert!(conv.title.contains("converted"));
}

#[test]
fn plot_tf_of_flat_unit_response() {
    let tf = flat_tf(32, Complex64::new(1.0, 0.0));
    let (mag, phase) = plot_tf(&tf, &SliceSelector::parse("(tx=0, rx=[0,1,2,3], t=0)").unwrap()).unwrap();
    assert_eq!((mag.series.len(), phase.series.len()), (4, 4));
    assert_eq!(mag.x_unit, "Hz");
    assert_eq!(mag.x[16], FC);
    for s in mag.series.iter().chain(&phase.series) {
        let SeriesValues::Real(v) = &s.values else { panic!() };
        assert!(v.iter().all(|x| *x == 0.0));
    }
    let neg = flat_tf(4, Complex64::new(-1.0, -0.0));
    let (_, phase) = plot_tf(&neg, &SliceSelector::parse("tx=0,rx=0,t=0").unwrap()).unwrap();
    let SeriesValues::Real(v) = &phase.series[0].values else { panic!() };
    assert!(v.iter().all(|x| *x == PI));
}

fn acoustic(n: usize, nch: usize) -> DssDataset {
    let mut attrs = Attrs::new();
    attrs.insert("sampling_rate".into(), 48000.0.into());
    let axes = vec![
        AxisDef::of(AxisKind::Speaker, 2),
        AxisDef::of(AxisKind::Microphone, 16),
        AxisDef::of(AxisKind::Channel, nch),
        AxisDef::of(AxisKind::Sample, n),
    ];
    DssDataset::new(ACOUSTIC, axes, Domain::Time, attrs).unwrap()
}

#[test]
fn rir_plots() {
    let ds = acoustic(64, 1);
    let p = plot_rir(&ds, &SliceSelector::parse("(sp=1, mic=14, ch=0)").unwrap()).unwrap();
    assert_eq!(p.series.len(), 1);
    assert_eq!(p.x.len(), 64);
    assert_eq!(p.x[48], 48.0 / 48000.0);
    let zero = plot_rir(&ds, &SliceSelector::parse("(sp=0, mic=0, ch=0)").unwrap()).unwrap();
    let SeriesValues::Real(v) = &zero.series[0].values else { panic!() };
    assert!(v.iter().all(|x| *x == 0.0));
    let err = plot_rir(&ds, &SliceSelector::parse("(sp=1, mic=14, ch=3)").unwrap()).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Index);
    let err = plot_rir(&ds, &SliceSelector::parse("(sp=1, ch=0)").unwrap()).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Selection);
    let cs = cir(ArrayD::zeros(IxDyn(&[1, 1, 1, 4])), 1e-9);
    assert_eq!(plot_rir(&cs, &SliceSelector::all()).unwrap_err().class(), ErrorClass::Profile);
    assert_eq!(plot_cr(&ds, &SliceSelector::all()).unwrap_err().class(), ErrorClass::Profile);
}

#[test]
fn rendering() {
    let ds = cir(ArrayD::from_shape_fn(IxDyn(&[1, 4, 1, 3]), |i| Complex64::new(i[3] as f64, i[1] as f64)), 1e-9);
    let p = plot_cr(&ds, &SliceSelector::parse("tx=0,rx=[0],t=0").unwrap()).unwrap();
    let csv = render(&p, RenderFormat::Csv).unwrap();
    assert_eq!(csv, render(&p, RenderFormat::Csv).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next().unwrap(), "x(s),rx=0.re,rx=0.im");

    let four = plot_cr(&ds, &SliceSelector::parse("tx=0,t=0").unwrap()).unwrap();
    let svg = render(&four, RenderFormat::Svg).unwrap();
    assert_eq!(svg, render(&four, RenderFormat::Svg).unwrap());
    let svg = String::from_utf8(svg).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("viewBox"), Some("0 0 960 540"));
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polyline")).count(), 4);
    assert!(!svg.contains("href"));

    let mut tricky = p.clone();
    tricky.title = "a < b & \"c\"".into();
    tricky.series[0].label = "sp=1,mic=14".into();
    roxmltree::Document::parse(std::str::from_utf8(&render(&tricky, RenderFormat::Svg).unwrap()).unwrap()).unwrap();
    let csv = String::from_utf8(render(&tricky, RenderFormat::Csv).unwrap()).unwrap();
    assert!(csv.starts_with("x(s),\"sp=1,mic=14.re\""));

    let mut bad = p;
    bad.x.pop();
    assert_eq!(render(&bad, RenderFormat::Csv).unwrap_err().class(), ErrorClass::Shape);
}

#[test]
fn unwrap_option_only_affects_phase() {
    let tf = cir_to_tf(&two_path(64, &[10.5e-9])).unwrap();
    let (mag, phase) = plot_tf(&tf, &SliceSelector::parse("tx=0,rx=0,t=0").unwrap()).unwrap();
    let opts = RenderOptions { unwrap_phase: true };
    assert_eq!(render_with(&mag, RenderFormat::Csv, &opts).unwrap(), render(&mag, RenderFormat::Csv).unwrap());
    assert_ne!(render_with(&phase, RenderFormat::Csv, &opts).unwrap(), render(&phase, RenderFormat::Csv).unwrap());
}
