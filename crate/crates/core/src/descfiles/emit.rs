use serde_yaml::{Mapping, Value};

use super::types::*;
use super::{DescriptionDoc, DocBody};

/// Serializes a document in direct form (`kind:` plus the body at top level).
///
/// Unknown keys are written back; anchors and merge keys are not reproduced
/// since they are already expanded in the typed document.
pub fn to_yaml(doc: &DescriptionDoc) -> String {
    let mut m = Mapping::new();
    put(&mut m, "kind", doc.kind().as_str());
    put(&mut m, "dss_version", doc.dss_version.as_str());
    let body = match &doc.body {
        DocBody::Testbed(t) => testbed(t),
        DocBody::DataSource(d) => data_source(d),
        DocBody::HardwareComponent(h) => hardware_component(h),
        DocBody::Environment(e) => environment(e),
        DocBody::Experiment(x) => experiment(x),
    };
    for (k, v) in body {
        m.insert(k, v);
    }
    serde_yaml::to_string(&Value::Mapping(m)).expect("YAML values always serialize")
}

fn put(m: &mut Mapping, key: &str, value: impl Into<Value>) {
    m.insert(Value::String(key.to_string()), value.into());
}

fn extras(m: &mut Mapping, extra: &Extras) {
    for (k, v) in extra {
        m.insert(Value::String(k.clone()), v.clone());
    }
}

fn quantity(q: &Quantity) -> Value {
    let value = match &q.value {
        ParamValue::Number(x) => Value::from(*x),
        ParamValue::Text(s) => Value::from(s.as_str()),
        ParamValue::Bool(b) => Value::from(*b),
    };
    match &q.unit {
        None => value,
        Some(u) => {
            let mut m = Mapping::new();
            put(&mut m, "value", value);
            put(&mut m, "unit", u.as_str());
            Value::Mapping(m)
        }
    }
}

fn quantities(map: &std::collections::BTreeMap<String, Quantity>) -> Value {
    let mut m = Mapping::new();
    for (k, q) in map {
        put(&mut m, k, quantity(q));
    }
    Value::Mapping(m)
}

fn reference<T>(r: &Reference<T>, inline: impl Fn(&T) -> Mapping) -> Value {
    match &r.inline {
        None => Value::from(r.id.as_str()),
        Some(body) => {
            let mut m = inline(body);
            m.insert(Value::from("id"), Value::from(r.id.as_str()));
            Value::Mapping(m)
        }
    }
}

fn testbed(t: &TestbedDesc) -> Mapping {
    let mut m = Mapping::new();
    put(&mut m, "id", t.id.as_str());
    put(&mut m, "name", t.name.as_str());
    put(&mut m, "description", t.description.as_str());
    if let Some(url) = &t.url {
        put(&mut m, "url", url.as_str());
    }
    put(&mut m, "level", t.level.as_str());
    let chains = t.data_chains.iter().map(|c| Value::Mapping(chain(c))).collect::<Vec<_>>();
    put(&mut m, "data_chains", Value::Sequence(chains));
    extras(&mut m, &t.extra);
    m
}

fn chain(c: &DataChainDesc) -> Mapping {
    let mut cc = Mapping::new();
    let comps = c
        .hardware_components
        .iter()
        .map(|r| reference(r, hardware_component))
        .collect::<Vec<_>>();
    put(&mut cc, "hardware_components", Value::Sequence(comps));
    put(&mut cc, "data_source_channel", c.data_source_channel.as_str());
    extras(&mut cc, &c.channel_chain_extra);

    let mut inner = Mapping::new();
    put(&mut inner, "data_source", reference(&c.data_source, data_source));
    put(&mut inner, "channel_chain", Value::Mapping(cc));
    put(&mut inner, "num_data_source_chains", c.num_data_source_chains);
    if let Some(loc) = &c.channel_locations {
        let mut l = Mapping::new();
        put(&mut l, "file", loc.file.as_str());
        put(&mut l, "loc_unit", loc.loc_unit.as_str());
        if let Some(d) = &loc.dataset {
            put(&mut l, "dataset", d.as_str());
        }
        extras(&mut l, &loc.extra);
        put(&mut inner, "channel_locations", Value::Mapping(l));
    }
    if let Some(o) = &c.channel_orientations {
        let mut l = Mapping::new();
        put(&mut l, "file", o.file.as_str());
        let format = match o.format {
            OrientationFormat::Quaternion => "quaternion",
            OrientationFormat::AxisAngle => "axis_angle",
        };
        put(&mut l, "format", format);
        put(&mut l, "angle_unit", o.angle_unit.as_str());
        if let Some(d) = &o.dataset {
            put(&mut l, "dataset", d.as_str());
        }
        extras(&mut l, &o.extra);
        put(&mut inner, "channel_orientations", Value::Mapping(l));
    }
    extras(&mut inner, &c.chain_extra);

    let mut m = Mapping::new();
    put(&mut m, "label", c.label.as_str());
    put(&mut m, "chain", Value::Mapping(inner));
    extras(&mut m, &c.extra);
    m
}

fn data_source(d: &DataSourceDesc) -> Mapping {
    let mut m = Mapping::new();
    put(&mut m, "id", d.id.as_str());
    put(&mut m, "name", d.name.as_str());
    put(&mut m, "source_type", d.source_type.as_str());
    put(&mut m, "num_channels", d.num_channels);
    put(&mut m, "parameters", quantities(&d.parameters));
    extras(&mut m, &d.extra);
    m
}

fn hardware_component(h: &HardwareComponentDesc) -> Mapping {
    let mut m = Mapping::new();
    put(&mut m, "id", h.id.as_str());
    put(&mut m, "name", h.name.as_str());
    put(&mut m, "component_type", h.kind.as_str());
    put(&mut m, "ports", h.ports);
    let attrs = h
        .attributes
        .iter()
        .map(|a| {
            let mut am = Mapping::new();
            put(&mut am, "name", a.name.as_str());
            match &a.data {
                AttributeData::File { file, dataset } => {
                    put(&mut am, "data_ref", format!("{file}#{dataset}"));
                }
                AttributeData::Inline(rows) => {
                    let rows = rows
                        .iter()
                        .map(|r| Value::Sequence(r.iter().map(|x| Value::from(*x)).collect()))
                        .collect();
                    put(&mut am, "data", Value::Sequence(rows));
                }
                AttributeData::Absent => {}
            }
            let units = a.units.iter().map(|u| Value::from(u.as_str())).collect();
            put(&mut am, "units", Value::Sequence(units));
            extras(&mut am, &a.extra);
            Value::Mapping(am)
        })
        .collect();
    put(&mut m, "attributes", Value::Sequence(attrs));
    extras(&mut m, &h.extra);
    m
}

fn environment(e: &EnvironmentDesc) -> Mapping {
    let mut m = Mapping::new();
    put(&mut m, "id", e.id.as_str());
    put(&mut m, "properties", quantities(&e.properties));
    let refs = e
        .file_refs
        .iter()
        .map(|r| {
            let mut rm = Mapping::new();
            put(&mut rm, "role", r.role.as_str());
            put(&mut rm, "path", r.path.as_str());
            Value::Mapping(rm)
        })
        .collect();
    put(&mut m, "file_refs", Value::Sequence(refs));
    extras(&mut m, &e.extra);
    m
}

fn experiment(x: &ExperimentDesc) -> Mapping {
    let mut m = Mapping::new();
    put(&mut m, "id", x.id.as_str());
    put(&mut m, "name", x.name.as_str());
    let tbs = x.testbeds.iter().map(|r| reference(r, testbed)).collect();
    put(&mut m, "testbeds", Value::Sequence(tbs));
    if let Some(env) = &x.environment {
        put(&mut m, "environment", reference(env, environment));
    }
    let ms = x
        .measurements
        .iter()
        .map(|meas| {
            let mut mm = Mapping::new();
            put(&mut mm, "id", meas.id.as_str());
            put(&mut mm, "file", meas.file.as_str());
            put(&mut mm, "dataset_type", meas.dataset_type.as_str());
            put(&mut mm, "parameters", quantities(&meas.parameters));
            extras(&mut mm, &meas.extra);
            Value::Mapping(mm)
        })
        .collect();
    put(&mut m, "measurements", Value::Sequence(ms));
    match &x.tx_rx_mapping {
        TxRxMapping::Unspecified => {}
        TxRxMapping::Full { tx, rx } => {
            let mut fm = Mapping::new();
            put(&mut fm, "mode", "full");
            if let Some(tx) = tx {
                put(&mut fm, "tx", tx.as_str());
            }
            if let Some(rx) = rx {
                put(&mut fm, "rx", rx.as_str());
            }
            put(&mut m, "tx_rx_mapping", Value::Mapping(fm));
        }
        TxRxMapping::Pairs(pairs) => {
            let ps = pairs
                .iter()
                .map(|p| {
                    let mut pm = Mapping::new();
                    put(&mut pm, "tx", p.tx);
                    put(&mut pm, "rx", p.rx);
                    Value::Mapping(pm)
                })
                .collect();
            put(&mut m, "tx_rx_mapping", Value::Sequence(ps));
        }
    }
    put(&mut m, "variables", quantities(&x.variables));
    let media = x
        .media
        .iter()
        .map(|md| {
            let mut mm = Mapping::new();
            put(&mut mm, "kind", md.kind.as_str());
            put(&mut mm, "path", md.path.as_str());
            Value::Mapping(mm)
        })
        .collect();
    put(&mut m, "media", Value::Sequence(media));
    if let Some(sync) = &x.sync_info {
        put(&mut m, "sync_info", sync.clone());
    }
    extras(&mut m, &x.extra);
    m
}
