use std::path::{Path, PathBuf};
use std::time::Instant;

use dss_core::descfiles::*;
use dss_core::ErrorClass;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn copy_dir(from: &Path, to: &Path) {
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
}

fn techtile(reg: &Registry) -> &TestbedDesc {
    reg.testbed("Techtile").expect("Techtile testbed loaded")
}

#[test]
fn techtile_fixture_conforms() {
    let start = Instant::now();
    let reg = Registry::load_dir(fixture("techtile")).unwrap();
    let report = validate_registry(&reg);
    let tb = techtile(&reg);
    let map = expand_channels(tb, &FsLocationLoader::new(fixture("techtile"))).unwrap();
    let elapsed = start.elapsed();

    assert_eq!(report.error_count(), 0, "{}", report.to_text());
    assert_eq!(map.by_label("RF").count(), 140);
    assert_eq!(map.by_label("Acoustic").count(), 100);
    assert_eq!(map.len(), 240);
    assert!(elapsed.as_secs_f64() < 1.0, "{elapsed:?}");

    let labels: Vec<&str> = tb.data_chains.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(labels, ["RF", "Acoustic"]);
    assert!(map.channels.iter().enumerate().all(|(i, c)| c.global_index == i));
    let rf: Vec<_> = map.by_label("RF").collect();
    assert_eq!(rf[139].chain_instance, 139);
    assert_eq!(rf[0].hardware_chain, ["Techtile915MHzAntenna"]);
    assert_eq!(rf[15].location, Some([1.2, 1.2, 2.4]));
    let mic: Vec<_> = map.by_label("Acoustic").collect();
    assert_eq!(mic[99].source_channel, 99);
    assert_eq!(mic[0].hardware_chain, ["TechtileMicrophonePA", "TechtileMicrophone"]);
}

#[test]
fn techtile_experiment_resolves() {
    let reg = Registry::load_dir(fixture("techtile")).unwrap();
    let x = resolve_experiment("Localization", &reg).unwrap();
    assert_eq!(x.total_channels, 240);
    assert_eq!(x.pairs.len(), 4);
    assert_eq!(x.pairs[3], ChannelPair { tx: 0, rx: 4 });
    assert_eq!(x.environment.as_ref().unwrap().id, "TechtileRoom");
    let (tb, local) = x.locate(150).unwrap();
    assert_eq!((tb.testbed.id.as_str(), local), ("Techtile", 150));
    assert_eq!(tb.data_sources["DAQ"].num_channels, 100);
}

#[test]
fn experiment_errors() {
    let mut reg = Registry::load_dir(fixture("techtile")).unwrap();
    reg.add_text(
        "kind: experiment\nid: Bad\ntestbeds: [Techtile]\ntx_rx_mapping: [[0, 240]]\n",
        "bad.experiment.yaml",
        None,
    );
    reg.add_text("kind: experiment\nid: Lost\ntestbeds: [Nowhere]\n", "lost.experiment.yaml", None);
    let e = resolve_experiment("Bad", &reg).unwrap_err();
    assert_eq!(e.class(), ErrorClass::Mapping);
    let e = resolve_experiment("Lost", &reg).unwrap_err();
    assert_eq!(e.class(), ErrorClass::UnresolvedRef);
    let report = validate_registry(&reg);
    assert!(report.has_code("mapping_out_of_range") || report.has_code("unresolved_ref"));
}

#[test]
fn dangling_reference_is_reported() {
    let reg = Registry::load_dir(fixture("dangling")).unwrap();
    let report = validate_registry(&reg);
    let item = report
        .items
        .iter()
        .find(|i| i.code == "unresolved_ref")
        .expect("unresolved_ref item");
    assert!(item.message.contains("Techtile915MHzAntenna"), "{}", item.message);

    let empty = Registry::new();
    let doc = &parse_documents(&std::fs::read_to_string(fixture("dangling/broken.testbed.yaml")).unwrap(), None).unwrap()[0];
    assert!(validate(doc, &empty).has_code("unresolved_ref"));
}

#[test]
fn short_location_file_is_a_count_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixture("techtile"), dir.path());
    let p = dir.path().join("techtile_antenna_locations.csv");
    let text = std::fs::read_to_string(&p).unwrap();
    let kept: Vec<&str> = text.lines().take(1 + 139).collect();
    std::fs::write(&p, kept.join("\n")).unwrap();
    let report = validate_registry(&Registry::load_dir(dir.path()).unwrap());
    assert!(report.has_code("location_count_mismatch"), "{}", report.to_text());
}

#[test]
fn npy_locations_are_accepted() {
    use ndarray_npy::WriteNpyExt;
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixture("techtile"), dir.path());
    let tb = dir.path().join("techtile.testbed.yaml");
    let text = std::fs::read_to_string(&tb).unwrap().replace(".csv", ".npy");
    std::fs::write(&tb, text).unwrap();
    for (name, n) in [("techtile_antenna_locations.npy", 140), ("techtile_microphone_locations.npy", 100)] {
        let a = ndarray::Array2::<f64>::from_shape_fn((n, 3), |(i, j)| (i * 3 + j) as f64);
        a.write_npy(std::fs::File::create(dir.path().join(name)).unwrap()).unwrap();
    }
    let reg = Registry::load_dir(dir.path()).unwrap();
    let report = validate_registry(&reg);
    assert_eq!(report.error_count(), 0, "{}", report.to_text());
    assert!(report.has_code("non_portable_format"));
    let map = expand_channels(techtile(&reg), &FsLocationLoader::new(dir.path())).unwrap();
    assert_eq!(map.channels[1].location, Some([3.0, 4.0, 5.0]));
}

#[test]
fn chain_without_locations_warns_once() {
    let text = "kind: testbed\nid: T\nname: T\ndata_chains:\n  - label: RF\n    chain:\n      data_source: {id: S, source_type: SDR, num_channels: 2, parameters: {bandwidth: 1}}\n      channel_chain: {data_source_channel: \"0:2\"}\n      num_data_source_chains: 3\n";
    let doc = parse_description(text, DocKind::Testbed).unwrap();
    let DocBody::Testbed(tb) = &doc.body else { panic!() };
    let map = expand_channels(tb, &FsLocationLoader::new(".")).unwrap();
    assert_eq!(map.len(), 6);
    assert!(map.channels.iter().all(|c| c.location.is_none()));
    assert_eq!(map.warnings.len(), 1);
}

#[test]
fn selector_examples() {
    assert_eq!(parse_channel_selector("0:100", 100).unwrap().indices, (0..100).collect::<Vec<_>>());
    assert_eq!(parse_channel_selector("0", 2).unwrap().indices, [0]);
    assert_eq!(parse_channel_selector("3:3", 8).unwrap_err().class(), ErrorClass::Range);
    assert_eq!(parse_channel_selector("0:101", 100).unwrap_err().class(), ErrorClass::Range);
    for bad in ["", "a", "1:", ":2", "-1", "1:2:3", "1.5"] {
        assert_eq!(parse_channel_selector(bad, 10).unwrap_err().class(), ErrorClass::Grammar, "{bad:?}");
    }
}

#[test]
fn validation_is_pure_and_pointers_resolve() {
    let reg = Registry::load_dir(fixture("dangling")).unwrap();
    let mut a = validate_registry(&reg);
    let mut b = validate_registry(&Registry::load_dir(fixture("dangling")).unwrap());
    a.canonicalize();
    b.canonicalize();
    assert_eq!(a.to_json(), b.to_json());

    let text = std::fs::read_to_string(fixture("dangling/broken.testbed.yaml")).unwrap();
    let mut root: serde_yaml::Value = serde_yaml::from_str(&text).unwrap();
    root.apply_merge().unwrap();
    for item in a.items.iter().filter(|i| i.source.ends_with("broken.testbed.yaml")) {
        let p = Pointer::parse(&item.path).unwrap_or_else(|| panic!("bad pointer {:?}", item.path));
        // missing fields point at where the key belongs
        let parent = Pointer(p.0[..p.0.len().saturating_sub(1)].to_vec());
        assert!(
            resolve_pointer(&root, &p).is_some() || resolve_pointer(&root, &parent).is_some(),
            "{} does not resolve",
            item.path
        );
    }
}

#[test]
fn fixture_docs_round_trip_through_emit() {
    let reg = Registry::load_dir(fixture("techtile")).unwrap();
    assert!(reg.len() >= 7);
    for doc in reg.docs() {
        let back = parse_description(&to_yaml(doc), doc.kind()).unwrap();
        assert_eq!(&back, doc, "{}", doc.id());
    }
}

fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_]{0,8}"
}

fn quantity() -> impl Strategy<Value = String> {
    (-1e6f64..1e6, prop::option::of(prop::sample::select(vec!["Hz", "MHz", "dB", "s", "ms", "m", "cm", "furlong"])))
        .prop_map(|(v, u)| match u {
            Some(u) => format!("{{value: {v:?}, unit: {u}}}"),
            None => format!("{v:?}"),
        })
}

fn data_source_text() -> impl Strategy<Value = String> {
    (
        ident(),
        ident(),
        1u64..64,
        prop::collection::btree_map(ident(), quantity(), 0..4),
        prop::option::of(ident()),
    )
        .prop_map(|(id, st, n, params, vendor)| {
            let mut s = format!("kind: data_source\nid: {id}\nname: \"{id} box\"\nsource_type: {st}\nnum_channels: {n}\n");
            if !params.is_empty() {
                s.push_str("parameters:\n");
                for (k, v) in params {
                    s.push_str(&format!("  {k}: {v}\n"));
                }
            }
            if let Some(v) = vendor {
                s.push_str(&format!("vendor: {v}\n"));
            }
            s
        })
}

#[derive(Debug, Clone)]
struct ChainSpec {
    label: String,
    start: usize,
    len: usize,
    copies: u64,
    outer: bool,
}

fn chains() -> impl Strategy<Value = Vec<ChainSpec>> {
    prop::collection::vec((0usize..20, 1usize..20, 1u64..12, any::<bool>()), 1..5).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (start, len, copies, outer))| ChainSpec {
                label: format!("chain{i}"),
                start,
                len,
                copies,
                outer,
            })
            .collect()
    })
}

fn testbed_text(chains: &[ChainSpec]) -> String {
    let mut s = String::from("kind: testbed\nid: T\nname: T\nlevel: L1\ndata_chains:\n");
    for c in chains {
        let sel = if c.len == 1 { format!("{}", c.start) } else { format!("{}:{}", c.start, c.start + c.len) };
        s.push_str(&format!(
            "  - label: {}\n    chain:\n      data_source: {{id: S{}, source_type: SDR, num_channels: 40}}\n      channel_chain:\n        hardware_components: [{{id: A, component_type: antenna}}]\n        data_source_channel: \"{sel}\"\n",
            c.label, c.label
        ));
        if c.outer {
            s.push_str(&format!("    num_data_source_chains: {}\n", c.copies));
        } else {
            s.push_str(&format!("      num_data_source_chains: {}\n", c.copies));
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn selector_length_is_b_minus_a(a in 0usize..10_000, d in 1usize..=10_000) {
        let b = (a + d).min(10_000);
        prop_assume!(a < b);
        let s = parse_channel_selector(&format!("{a}:{b}"), 10_000).unwrap();
        prop_assert_eq!(s.len(), b - a);
        prop_assert_eq!(s.indices.first().copied(), Some(a));
        prop_assert_eq!(s.indices.last().copied(), Some(b - 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn data_source_emit_round_trip(text in data_source_text()) {
        let doc = parse_description(&text, DocKind::DataSource).unwrap();
        let back = parse_description(&to_yaml(&doc), DocKind::DataSource).unwrap();
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn testbed_emit_round_trip(cs in chains()) {
        let doc = parse_description(&testbed_text(&cs), DocKind::Testbed).unwrap();
        let back = parse_description(&to_yaml(&doc), DocKind::Testbed).unwrap();
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn channel_count_law(cs in chains()) {
        let doc = parse_description(&testbed_text(&cs), DocKind::Testbed).unwrap();
        let DocBody::Testbed(tb) = &doc.body else { unreachable!() };
        let map = expand_channels(tb, &FsLocationLoader::new(".")).unwrap();
        let expected: usize = cs.iter().map(|c| c.copies as usize * c.len).sum();
        prop_assert_eq!(map.len(), expected);
        prop_assert!(map.channels.iter().enumerate().all(|(i, c)| c.global_index == i));
        prop_assert_eq!(validate(&doc, &Registry::new()).error_count(), 0);
    }
}
