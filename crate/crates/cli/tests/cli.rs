use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dss_core::descfiles::DocKind;
use dss_core::storage;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn dss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dss"))
        .args(args)
        .env_remove("DSS_REGISTRY")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_techtile_directory() {
    let o = dss(&["validate", p(&fixtures().join("techtile"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("0 errors, 0 warnings"));

    let o = dss(&["validate", p(&fixtures().join("techtile")), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["errors"], 0);
}

#[test]
fn validate_single_file_against_registry() {
    let dir = fixtures().join("techtile");
    let exp = dir.join("localization.experiment.yaml");
    // alone, the experiment cannot see its testbed
    let o = dss(&["validate", p(&exp)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unresolved_ref"));

    let o = Command::new(env!("CARGO_BIN_EXE_dss"))
        .args(["validate", p(&exp)])
        .env("DSS_REGISTRY", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn dangling_reference_exits_one() {
    let o = dss(&["validate", p(&fixtures().join("dangling")), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
    let codes: Vec<&str> = v["items"].as_array().unwrap().iter().map(|i| i["code"].as_str().unwrap()).collect();
    assert_eq!(codes, ["unresolved_ref"]);
}

#[test]
fn missing_path_is_an_io_error() {
    let o = dss(&["validate", "/nonexistent/x.testbed.yaml"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error[IoError]"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dss(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dss(&["plot", "x.h5", "--op", "bogus", "--out", "y.svg"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.h5");
    let o = dss(&["synth", "--preset", "fig4", "--profile", "acoustic", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = dss(&["synth", "--preset", "fig4", "--fs", "1e6", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn synth_info_slice_convert() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.dss.h5");
    let b = dir.path().join("b.dss.h5");
    for f in [&a, &b] {
        assert_eq!(dss(&["synth", "--preset", "fig4", "--seed", "7", "--out", p(f)]).status.code(), Some(0));
    }
    assert_eq!(storage::open(&a).unwrap().dataset, storage::open(&b).unwrap().dataset);

    let o = dss(&["info", p(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("axes: tx:1 rx:4 time:1 sample:1024"), "{}", stdout(&o));

    let s = dir.path().join("s.dss.nc");
    let o = dss(&["slice", p(&a), p(&s), "--select", "tx=0,rx=0:2,t=0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sliced = storage::open(&s).unwrap();
    assert_eq!(sliced.format, storage::Format::Netcdf4);
    assert_eq!(sliced.dataset.shape(), vec![1, 2, 1, 1024]);

    let o = dss(&["info", p(&s), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["format"], "netcdf4");
    assert_eq!(v["shape"], serde_json::json!([1, 2, 1, 1024]));

    let c = dir.path().join("c.h5");
    assert_eq!(dss(&["convert", p(&s), p(&c)]).status.code(), Some(0));
    assert_eq!(storage::open(&c).unwrap().dataset, sliced.dataset);
    assert_eq!(dss(&["convert", p(&c), p(&c)]).status.code(), Some(2));
    assert_eq!(dss(&["convert", p(&c), p(&dir.path().join("c.bin"))]).status.code(), Some(2));
}

#[test]
fn slice_errors_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.h5");
    dss(&["synth", "--preset", "fig4", "--out", p(&a)]);
    let out = dir.path().join("o.h5");
    let o = dss(&["slice", p(&a), p(&out), "--select", "rx=9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error[IndexError]"));
    assert!(!out.exists());
}

#[test]
fn tf_plot_writes_magnitude_and_phase() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.h5");
    dss(&["synth", "--preset", "fig4", "--out", p(&a)]);
    let out = dir.path().join("tf.csv");
    let o = dss(&["plot", p(&a), "--op", "tf", "--select", "tx=0,rx=0:4,t=0", "--out", p(&out), "--unwrap-phase"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let phase = std::fs::read_to_string(dir.path().join("tf_phase.csv")).unwrap();
    assert_eq!(phase.lines().count(), 1025);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1025);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with(".dss-"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn acoustic_synth_and_rir_plot() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("room.nc");
    assert_eq!(dss(&["synth", "--preset", "acoustic", "--out", p(&a)]).status.code(), Some(0));
    let out = dir.path().join("rir.csv");
    let o = dss(&["plot", p(&a), "--op", "rir", "--select", "(sp=0, mic=0, ch=0)", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<String> = std::fs::read_to_string(&out).unwrap().lines().map(String::from).collect();
    let values: Vec<f64> = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap().parse().unwrap()).collect();
    let peak = (0..values.len()).max_by(|&x, &y| values[x].total_cmp(&values[y])).unwrap();
    assert_eq!(peak, 480);
}

#[test]
fn custom_synth_with_embedded_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("custom.h5");
    let b210 = fixtures().join("techtile/b210.data_source.yaml");
    let o = dss(&[
        "synth", "--tx", "0,0,0", "--rx", "1,0,0", "--rx", "2,0,0", "--fs", "1e9", "--fc", "6e9", "--samples", "64",
        "--path", "20e-9,0.5,0.1", "--attr", "operator=lab", "--embed", p(&b210), "--out", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let f = storage::open(&out).unwrap();
    assert_eq!(f.dataset.shape(), vec![1, 2, 1, 64]);
    assert!(f.dataset.metadata_bundle.contains_key(&(DocKind::DataSource, "B210".to_string())));
    let o = dss(&["validate", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn channels_and_locations() {
    let reg = fixtures().join("techtile");
    let o = dss(&["channels", "Techtile", "--registry", p(&reg)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("total: 240 channels\n"));
    assert_eq!(dss(&["channels", "Nope", "--registry", p(&reg)]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let h5 = dir.path().join("loc.h5");
    let csv = dir.path().join("loc.csv");
    let src = reg.join("techtile_antenna_locations.csv");
    assert_eq!(dss(&["locations", p(&src), p(&h5)]).status.code(), Some(0));
    assert_eq!(dss(&["locations", p(&h5), p(&csv), "--dataset", "/locations"]).status.code(), Some(0));
    let numbers = |path: &Path| -> Vec<f64> {
        let text = std::fs::read_to_string(path).unwrap();
        text.lines().skip(1).flat_map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>()).collect()
    };
    let got = std::fs::read_to_string(&csv).unwrap();
    assert!(got.starts_with("x,y,z\n"));
    assert_eq!(numbers(&csv), numbers(&src));
}
