use std::path::Path;

use dss_core::descfiles::DocKind;
use dss_core::model::*;
use dss_core::storage::{self, Format, Signature};
use dss_core::synth::random_dataset;
use dss_core::ErrorClass;
use hdf5::types::VarLenUnicode;
use num_complex::Complex64;

const PROFILES: [&str; 3] = [CHANNEL_SOUNDING, ACOUSTIC, SIMULATION];

fn small_channel() -> DssDataset {
    let mut attrs = Attrs::new();
    attrs.insert("center_frequency".into(), 6.95e9.into());
    attrs.insert("bandwidth".into(), 1e9.into());
    attrs.insert("operator".into(), "lab".into());
    let axes = vec![
        AxisDef::of(AxisKind::Tx, 1),
        AxisDef::of(AxisKind::Rx, 4),
        AxisDef::of(AxisKind::Time, 1),
        AxisDef::of(AxisKind::Sample, 8),
    ];
    let data = ndarray::ArrayD::from_shape_fn(ndarray::IxDyn(&[1, 4, 1, 8]), |i| {
        Complex64::new(i[1] as f64, -(i[3] as f64))
    });
    DssDataset::new(CHANNEL_SOUNDING, axes, Domain::Delay, attrs)
        .unwrap()
        .with_payload(Payload::Complex(data))
        .unwrap()
        .with_coordinate("sample", CoordinateVec::uniform(0.0, 1e-9, 8, "s", Semantics::DelaySeconds).unwrap())
        .unwrap()
}

fn round_trip(ds: &DssDataset, dir: &Path, name: &str, format: Format) -> DssDataset {
    let p = dir.join(format!("{name}.{}", format.extension()));
    storage::save(ds, &p, format).unwrap();
    let back = storage::open(&p).unwrap();
    assert_eq!(back.format, format);
    back.dataset
}

#[test]
fn random_datasets_round_trip_bitwise_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..60u64 {
        let kind = PROFILES[seed as usize % 3];
        let ds = random_dataset(kind, seed).unwrap();
        for f in [Format::Hdf5, Format::Netcdf4] {
            assert_eq!(round_trip(&ds, dir.path(), "r", f), ds, "{kind} seed {seed} {f}");
        }
    }
}

#[test]
fn triple_conversion_preserves_equality() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 100..112u64 {
        let ds = random_dataset(PROFILES[seed as usize % 3], seed).unwrap();
        let (a, b, c) = (dir.path().join("a.h5"), dir.path().join("b.nc"), dir.path().join("c.h5"));
        storage::save(&ds, &a, Format::Hdf5).unwrap();
        storage::convert(&a, &b, Format::Netcdf4).unwrap();
        storage::convert(&b, &c, Format::Hdf5).unwrap();
        assert_eq!(storage::open(&b).unwrap().format, Format::Netcdf4);
        assert_eq!(storage::open(&c).unwrap().dataset, ds);
    }
}

#[test]
fn embedded_metadata_is_verbatim_and_revalidated() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind: data_source\nid: B210\nsource_type: SDR\nnum_channels: 2\n# trailing comment kept\n";
    let ds = small_channel().with_metadata(DocKind::DataSource, "B210", text);
    let p = dir.path().join("m.dss.h5");
    storage::save(&ds, &p, Format::Hdf5).unwrap();
    let f = storage::open(&p).unwrap();
    assert_eq!(f.dataset.metadata_bundle[&(DocKind::DataSource, "B210".to_string())], text);
    assert_eq!(f.metadata_report.error_count(), 0);
}

#[test]
fn sniffing() {
    assert_eq!(storage::sniff_bytes(b"\x89HDF\r\n\x1a\nrest"), Signature::Hdf5);
    assert_eq!(storage::sniff_bytes(b"CDF\x01...."), Signature::NetcdfClassic);
    assert_eq!(storage::sniff_bytes(b"CDF\x02"), Signature::NetcdfClassic);
    assert_eq!(storage::sniff_bytes(b"PK\x03\x04"), Signature::Unknown);
    assert_eq!(storage::sniff_bytes(b""), Signature::Unknown);
}

#[test]
fn error_classes_on_open() {
    let dir = tempfile::tempdir().unwrap();
    let missing = storage::open(dir.path().join("nope.h5")).unwrap_err();
    assert_eq!(missing.class(), ErrorClass::Io);

    let junk = dir.path().join("junk.h5");
    std::fs::write(&junk, b"not a dataset at all").unwrap();
    assert_eq!(storage::open(&junk).unwrap_err().class(), ErrorClass::Format);

    let classic = dir.path().join("classic.nc");
    std::fs::write(&classic, b"CDF\x01\0\0\0\0").unwrap();
    assert_eq!(storage::open(&classic).unwrap_err().class(), ErrorClass::Version);

    let good = dir.path().join("good.dss.h5");
    storage::save(&small_channel(), &good, Format::Hdf5).unwrap();
    let bytes = std::fs::read(&good).unwrap();
    let truncated = dir.path().join("trunc.dss.h5");
    std::fs::write(&truncated, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(storage::open(&truncated).unwrap_err().class(), ErrorClass::Format);

    let future = dir.path().join("future.h5");
    {
        let f = hdf5::File::create(&future).unwrap();
        let v: VarLenUnicode = "99.0".parse().unwrap();
        f.new_attr::<VarLenUnicode>().shape(()).create("dss_version").unwrap().write_scalar(&v).unwrap();
    }
    assert_eq!(storage::open(&future).unwrap_err().class(), ErrorClass::Version);

    let plain = dir.path().join("plain.h5");
    hdf5::File::create(&plain).unwrap();
    assert_eq!(storage::open(&plain).unwrap_err().class(), ErrorClass::Format);
}

#[test]
fn unstorable_values_leave_existing_file_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.dss.h5");
    std::fs::write(&p, b"previous").unwrap();

    let nul = small_channel().with_attr("note", "a\0b");
    assert_eq!(storage::save(&nul, &p, Format::Hdf5).unwrap_err().class(), ErrorClass::UnsupportedFeature);

    let reserved = small_channel().with_attr("dss_version", "2");
    assert_eq!(storage::save(&reserved, &p, Format::Hdf5).unwrap_err().class(), ErrorClass::ReservedName);
    let underscore = small_channel().with_attr("_NCProperties", "x");
    assert_eq!(storage::save(&underscore, &p, Format::Netcdf4).unwrap_err().class(), ErrorClass::ReservedName);

    assert_eq!(std::fs::read(&p).unwrap(), b"previous");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with(".dss-"))
        .collect();
    assert!(leftovers.is_empty());

    let missing_dir = dir.path().join("no/such/dir/x.h5");
    assert_eq!(storage::save(&small_channel(), &missing_dir, Format::Hdf5).unwrap_err().class(), ErrorClass::Io);
}

#[test]
fn convert_does_not_write_on_bad_source() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("bad.h5");
    std::fs::write(&src, b"garbage").unwrap();
    let dst = dir.path().join("out.nc");
    assert!(storage::convert(&src, &dst, Format::Netcdf4).is_err());
    assert!(!dst.exists());
}

#[test]
fn simulation_files_have_no_dense_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let sim = DssDataset::simulation(
        vec![
            RaggedSeries::new(10, "snr", vec![(0.0, 1.0), (1.0, 2.0)], "dB").unwrap(),
            RaggedSeries::new(0, "snr", vec![], "dB").unwrap(),
        ],
        Attrs::new(),
    )
    .unwrap();
    for f in [Format::Hdf5, Format::Netcdf4] {
        let p = dir.path().join(format!("s.{}", f.extension()));
        storage::save(&sim, &p, f).unwrap();
        let h = hdf5::File::open(&p).unwrap();
        assert!(h.dataset("data").is_err());
        assert!(h.group("simulation/run10").is_ok());
        assert_eq!(storage::open(&p).unwrap().dataset, sim);
    }
}

#[test]
fn array_helpers() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("loc.h5");
    let values: Vec<f64> = (0..6).map(f64::from).collect();
    storage::write_f64_array(&p, "/locations", &values, &[2, 3]).unwrap();
    assert!(storage::has_array(&p, "/locations"));
    assert!(!storage::has_array(&p, "/other"));
    assert_eq!(storage::read_f64_array(&p, "/locations").unwrap(), (values, vec![2, 3]));
}
