use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use serde_yaml::{Mapping, Value};

use super::pointer::Pointer;
use super::report::ReportItem;
use super::types::*;
use super::{DescError, DescriptionDoc, DocBody, DocKind, Origin};
use crate::DSS_VERSION;

const RESERVED_TOP: [&str; 3] = ["kind", "dss_version", "anchors"];

/// Parses a text holding exactly one description document of `kind`.
pub fn parse_description(text: &str, kind: DocKind) -> Result<DescriptionDoc, DescError> {
    let mut docs = parse_stream(text, KindRequest::Exact(kind))?;
    if docs.len() != 1 {
        return Err(DescError::KindMismatch {
            expected: format!("a single {kind} document"),
            found: format!("{} documents", docs.len()),
        });
    }
    Ok(docs.remove(0))
}

/// Parses every document of a YAML stream. A top-level `kind:` wins over
/// `hint`; one of the two must be present.
pub fn parse_documents(text: &str, hint: Option<DocKind>) -> Result<Vec<DescriptionDoc>, DescError> {
    parse_stream(text, KindRequest::Hint(hint))
}

#[derive(Clone, Copy)]
enum KindRequest {
    Exact(DocKind),
    Hint(Option<DocKind>),
}

fn parse_stream(text: &str, request: KindRequest) -> Result<Vec<DescriptionDoc>, DescError> {
    let shared: Arc<str> = Arc::from(text);
    let mut out = Vec::new();
    let mut saw_content = false;
    for (index, de) in serde_yaml::Deserializer::from_str(text).enumerate() {
        let mut value = Value::deserialize(de).map_err(syntax)?;
        value.apply_merge().map_err(syntax)?;
        if value.is_null() {
            continue;
        }
        saw_content = true;
        for mut doc in parse_yaml_document(&value, request)? {
            doc.origin.document = index;
            doc.origin.text = Some(shared.clone());
            out.push(doc);
        }
    }
    if !saw_content {
        return Err(DescError::Syntax {
            line: 1,
            column: 1,
            message: "empty document".into(),
        });
    }
    Ok(out)
}

fn syntax(e: serde_yaml::Error) -> DescError {
    let (line, column) = e.location().map_or((1, 1), |l| (l.line(), l.column()));
    DescError::Syntax {
        line,
        column,
        message: e.to_string(),
    }
}

/// Parses an already merged YAML document into its description documents.
fn parse_yaml_document(value: &Value, request: KindRequest) -> Result<Vec<DescriptionDoc>, DescError> {
    let map = match value {
        Value::Mapping(m) => m,
        other => {
            return Err(DescError::KindMismatch {
                expected: "a mapping at document root".into(),
                found: describe(other),
            })
        }
    };
    let root = Pointer::root();
    let declared = match map.get("kind") {
        None => None,
        Some(Value::String(s)) => Some(s.parse::<DocKind>().map_err(|_| DescError::KindMismatch {
            expected: "a known document kind".into(),
            found: format!("kind {s:?}"),
        })?),
        Some(other) => return Err(type_error(&root.key("kind"), "string", other)),
    };
    let kind = match (request, declared) {
        (KindRequest::Exact(want), Some(got)) if want != got => {
            return Err(DescError::KindMismatch {
                expected: format!("a {want} document"),
                found: format!("kind {got}"),
            })
        }
        (KindRequest::Exact(want), _) => want,
        (KindRequest::Hint(_), Some(got)) => got,
        (KindRequest::Hint(Some(hint)), None) => hint,
        (KindRequest::Hint(None), None) => {
            return Err(DescError::KindMismatch {
                expected: "a `kind:` field or a `*.<kind>.yaml` file name".into(),
                found: "neither".into(),
            })
        }
    };
    let dss_version = match map.get("dss_version") {
        None | Some(Value::Null) => DSS_VERSION.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        Some(other) => return Err(type_error(&root.key("dss_version"), "string", other)),
    };

    let body_keys: Vec<(String, &Value)> = map
        .iter()
        .filter_map(|(k, v)| key_string(k).map(|k| (k, v)))
        .filter(|(k, _)| !RESERVED_TOP.contains(&k.as_str()))
        .collect();
    let direct = body_keys
        .iter()
        .any(|(k, _)| k == "id" || fields_of(kind).contains(&k.as_str()));

    let mut docs = Vec::new();
    if direct {
        let mut body = Mapping::new();
        for (k, v) in &body_keys {
            body.insert(Value::String(k.clone()), (*v).clone());
        }
        docs.push(typed_doc(kind, &Value::Mapping(body), root, None, &dss_version)?);
    } else {
        let mut stray = Vec::new();
        for (k, v) in &body_keys {
            if v.is_mapping() {
                docs.push(typed_doc(kind, v, root.key(k.clone()), Some(k.clone()), &dss_version)?);
            } else {
                stray.push(k.clone());
            }
        }
        if docs.is_empty() {
            return Err(DescError::KindMismatch {
                expected: format!("a {kind} document"),
                found: "no document body".into(),
            });
        }
        for k in stray {
            docs[0].issues.push(ReportItem::warning(
                "unknown_key",
                root.key(k.clone()),
                format!("top-level key `{k}` is not a document"),
            ));
        }
    }
    Ok(docs)
}

fn typed_doc(
    kind: DocKind,
    body: &Value,
    at: Pointer,
    key_id: Option<String>,
    dss_version: &str,
) -> Result<DescriptionDoc, DescError> {
    check_shape(kind, body)?;
    let mut issues = Vec::new();
    let body = parse_body(kind, body, &at, key_id, &mut issues)?;
    Ok(DescriptionDoc {
        dss_version: dss_version.to_string(),
        body,
        origin: Origin {
            prefix: at,
            ..Origin::default()
        },
        issues,
    })
}

pub(crate) fn parse_body(
    kind: DocKind,
    body: &Value,
    at: &Pointer,
    key_id: Option<String>,
    issues: &mut Vec<ReportItem>,
) -> Result<DocBody, DescError> {
    Ok(match kind {
        DocKind::Testbed => DocBody::Testbed(testbed(body, at, key_id, issues)?),
        DocKind::DataSource => DocBody::DataSource(data_source(body, at, key_id, issues)?),
        DocKind::HardwareComponent => {
            DocBody::HardwareComponent(hardware_component(body, at, key_id, issues)?)
        }
        DocKind::Environment => DocBody::Environment(environment(body, at, key_id, issues)?),
        DocKind::Experiment => DocBody::Experiment(experiment(body, at, key_id, issues)?),
    })
}

fn fields_of(kind: DocKind) -> &'static [&'static str] {
    match kind {
        DocKind::Testbed => &["name", "description", "url", "level", "data_chains"],
        DocKind::DataSource => &["name", "source_type", "num_channels", "parameters"],
        DocKind::HardwareComponent => &["name", "component_type", "ports", "attributes"],
        DocKind::Environment => &["properties", "file_refs"],
        DocKind::Experiment => &[
            "name",
            "testbeds",
            "environment",
            "measurements",
            "tx_rx_mapping",
            "variables",
            "media",
            "sync_info",
        ],
    }
}

/// Keys that identify a kind (shared keys like `name` excluded).
fn signature_of(kind: DocKind) -> &'static [&'static str] {
    match kind {
        DocKind::Testbed => &["data_chains", "level"],
        DocKind::DataSource => &["source_type", "num_channels", "parameters"],
        DocKind::HardwareComponent => &["component_type", "ports", "attributes"],
        DocKind::Environment => &["properties", "file_refs"],
        DocKind::Experiment => &["testbeds", "measurements", "tx_rx_mapping", "media", "sync_info"],
    }
}

fn check_shape(kind: DocKind, body: &Value) -> Result<(), DescError> {
    let Value::Mapping(map) = body else {
        return Ok(());
    };
    let has = |k: DocKind| signature_of(k).iter().any(|s| map.contains_key(*s));
    if has(kind) {
        return Ok(());
    }
    if let Some(other) = DocKind::ALL.into_iter().find(|k| *k != kind && has(*k)) {
        return Err(DescError::KindMismatch {
            expected: format!("a {kind} document"),
            found: format!("the shape of a {other} document"),
        });
    }
    Ok(())
}

pub(crate) fn key_string(k: &Value) -> Option<String> {
    match k {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn describe(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => format!("boolean {b}"),
        Value::Number(n) => format!("number {n}"),
        Value::String(s) => format!("string {s:?}"),
        Value::Sequence(_) => "a sequence".into(),
        Value::Mapping(_) => "a mapping".into(),
        Value::Tagged(t) => format!("tagged value {}", t.tag),
    }
}

fn type_error(at: &Pointer, expected: &'static str, found: &Value) -> DescError {
    DescError::Type {
        path: at.to_string(),
        expected,
        found: describe(found),
    }
}

/// Reads the keys of one mapping, tracking which were consumed.
struct Fields<'a> {
    map: &'a Mapping,
    at: Pointer,
    used: Vec<String>,
}

impl<'a> Fields<'a> {
    fn of(v: &'a Value, at: &Pointer) -> Result<Self, DescError> {
        match v {
            Value::Mapping(map) => Ok(Fields {
                map,
                at: at.clone(),
                used: Vec::new(),
            }),
            other => Err(type_error(at, "mapping", other)),
        }
    }

    fn path(&self, key: &str) -> Pointer {
        self.at.key(key)
    }

    fn has(&self, key: &str) -> bool {
        self.map.get(key).is_some_and(|v| !v.is_null())
    }

    /// Value of `key`; explicit nulls count as absent.
    fn take(&mut self, key: &str) -> Option<&'a Value> {
        self.used.push(key.to_string());
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, DescError> {
        let at = self.path(key);
        self.take(key).map(|v| scalar_string(v, &at)).transpose()
    }

    fn required_string(&mut self, key: &str, issues: &mut Vec<ReportItem>) -> Result<String, DescError> {
        let at = self.path(key);
        match self.string(key)? {
            Some(s) => Ok(s),
            None => {
                issues.push(ReportItem::error(
                    "missing_field",
                    at,
                    format!("required field `{key}` is missing"),
                ));
                Ok(String::new())
            }
        }
    }

    fn uint(&mut self, key: &str) -> Result<Option<u64>, DescError> {
        let at = self.path(key);
        match self.take(key) {
            None => Ok(None),
            Some(Value::Number(n)) => match n.as_u64() {
                Some(u) => Ok(Some(u)),
                None => Err(DescError::Type {
                    path: at.to_string(),
                    expected: "non-negative integer",
                    found: format!("number {n}"),
                }),
            },
            Some(other) => Err(type_error(&at, "non-negative integer", other)),
        }
    }

    fn seq(&mut self, key: &str) -> Result<Option<&'a Vec<Value>>, DescError> {
        let at = self.path(key);
        match self.take(key) {
            None => Ok(None),
            Some(Value::Sequence(s)) => Ok(Some(s)),
            Some(other) => Err(type_error(&at, "sequence", other)),
        }
    }

    /// Remaining keys become extras and `unknown_key` warnings.
    fn finish(self, issues: &mut Vec<ReportItem>) -> Extras {
        let mut extras = Vec::new();
        for (k, v) in self.map {
            let Some(key) = key_string(k) else { continue };
            if self.used.contains(&key) || key == "<<" {
                continue;
            }
            issues.push(ReportItem::warning(
                "unknown_key",
                self.at.key(key.clone()),
                format!("unknown key `{key}` preserved as an extension"),
            ));
            extras.push((key, v.clone()));
        }
        extras
    }
}

fn scalar_string(v: &Value, at: &Pointer) -> Result<String, DescError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(type_error(at, "string", other)),
    }
}

fn doc_id(
    f: &mut Fields<'_>,
    key_id: Option<String>,
    issues: &mut Vec<ReportItem>,
) -> Result<String, DescError> {
    match (f.string("id")?, key_id) {
        (Some(id), _) => Ok(id),
        (None, Some(key)) => Ok(key),
        (None, None) => f.required_string("id", issues),
    }
}

fn quantity(v: &Value, at: &Pointer) -> Result<Quantity, DescError> {
    match v {
        Value::Number(n) => Ok(Quantity {
            value: ParamValue::Number(n.as_f64().unwrap_or(f64::NAN)),
            unit: None,
        }),
        Value::String(s) => Ok(Quantity {
            value: ParamValue::Text(s.clone()),
            unit: None,
        }),
        Value::Bool(b) => Ok(Quantity {
            value: ParamValue::Bool(*b),
            unit: None,
        }),
        Value::Mapping(m) => {
            let value = m.get("value").ok_or_else(|| DescError::Type {
                path: at.to_string(),
                expected: "quantity (`value` with optional `unit`)",
                found: "a mapping without `value`".into(),
            })?;
            let mut q = quantity(value, &at.key("value"))?;
            if !matches!(value, Value::Number(_) | Value::String(_) | Value::Bool(_)) {
                return Err(type_error(&at.key("value"), "scalar", value));
            }
            q.unit = match m.get("unit") {
                None | Some(Value::Null) => None,
                Some(Value::String(u)) => Some(u.clone()),
                Some(other) => return Err(type_error(&at.key("unit"), "string", other)),
            };
            Ok(q)
        }
        other => Err(type_error(at, "quantity", other)),
    }
}

fn quantity_map(v: Option<&Value>, at: &Pointer) -> Result<BTreeMap<String, Quantity>, DescError> {
    let mut out = BTreeMap::new();
    match v {
        None => {}
        Some(Value::Mapping(m)) => {
            for (k, val) in m {
                let Some(name) = key_string(k) else {
                    return Err(type_error(at, "string keys", k));
                };
                let q = quantity(val, &at.key(name.clone()))?;
                out.insert(name, q);
            }
        }
        Some(other) => return Err(type_error(at, "mapping", other)),
    }
    Ok(out)
}

fn reference<T>(
    v: &Value,
    at: &Pointer,
    issues: &mut Vec<ReportItem>,
    inline: impl FnOnce(&Value, &Pointer, &mut Vec<ReportItem>) -> Result<T, DescError>,
) -> Result<Reference<T>, DescError> {
    match v {
        Value::String(id) => Ok(Reference {
            id: id.clone(),
            inline: None,
            source: SourceMap::new(at.clone()),
        }),
        Value::Mapping(m) => {
            let id = match m.get("id") {
                Some(v @ (Value::String(_) | Value::Number(_))) => scalar_string(v, &at.key("id"))?,
                Some(other) => return Err(type_error(&at.key("id"), "string", other)),
                None => {
                    return Err(DescError::Type {
                        path: at.to_string(),
                        expected: "reference (string id or mapping with `id`)",
                        found: "a mapping without `id`".into(),
                    })
                }
            };
            let only_id = m.keys().all(|k| k.as_str() == Some("id"));
            let inline = if only_id {
                None
            } else {
                Some(Box::new(inline(v, at, issues)?))
            };
            Ok(Reference {
                id,
                inline,
                source: SourceMap::new(at.clone()),
            })
        }
        other => Err(type_error(at, "reference (string id or mapping with `id`)", other)),
    }
}

fn testbed(
    v: &Value,
    at: &Pointer,
    key_id: Option<String>,
    issues: &mut Vec<ReportItem>,
) -> Result<TestbedDesc, DescError> {
    let mut f = Fields::of(v, at)?;
    let id = doc_id(&mut f, key_id, issues)?;
    let name = f.required_string("name", issues)?;
    let description = f.string("description")?.unwrap_or_default();
    let url = f.string("url")?;
    let level = f.string("level")?.unwrap_or_default();
    let chains_at = f.path("data_chains");
    let mut data_chains = Vec::new();
    match f.seq("data_chains")? {
        Some(items) => {
            for (i, item) in items.iter().enumerate() {
                data_chains.push(data_chain(item, &chains_at.index(i), issues)?);
            }
        }
        None => issues.push(ReportItem::error(
            "missing_field",
            chains_at,
            "required field `data_chains` is missing",
        )),
    }
    let extra = f.finish(issues);
    Ok(TestbedDesc {
        id,
        name,
        description,
        url,
        level,
        data_chains,
        extra,
        source: SourceMap::new(at.clone()),
    })
}

/// Keys that may sit either on the chain item or inside `chain` (the two
/// placements both occur in published examples).
const FLOATING_CHAIN_KEYS: [&str; 3] = [
    "num_data_source_chains",
    "channel_locations",
    "channel_orientations",
];

fn data_chain(v: &Value, at: &Pointer, issues: &mut Vec<ReportItem>) -> Result<DataChainDesc, DescError> {
    let mut item = Fields::of(v, at)?;
    let mut source = SourceMap::new(at.clone());
    let label = item.required_string("label", issues)?;
    source.fields.insert("label".into(), item.path("label"));

    let chain_at = item.path("chain");
    let empty = Value::Mapping(Mapping::new());
    let chain_value = match item.take("chain") {
        Some(c) => c,
        None => {
            issues.push(ReportItem::error(
                "missing_field",
                chain_at.clone(),
                "required field `chain` is missing",
            ));
            &empty
        }
    };
    let mut chain = Fields::of(chain_value, &chain_at)?;

    let ds_at = chain.path("data_source");
    let data_source = match chain.take("data_source") {
        Some(ds) => reference(ds, &ds_at, issues, |v, at, issues| data_source(v, at, None, issues))?,
        None => {
            issues.push(ReportItem::error(
                "missing_field",
                ds_at.clone(),
                "required field `data_source` is missing",
            ));
            Reference {
                id: String::new(),
                inline: None,
                source: SourceMap::new(ds_at),
            }
        }
    };

    let cc_at = chain.path("channel_chain");
    let cc_value = chain.take("channel_chain").unwrap_or(&empty);
    let mut cc = Fields::of(cc_value, &cc_at)?;
    let hw_at = cc.path("hardware_components");
    let mut hardware_components = Vec::new();
    if let Some(items) = cc.seq("hardware_components")? {
        for (i, item) in items.iter().enumerate() {
            hardware_components.push(reference(item, &hw_at.index(i), issues, |v, at, issues| {
                hardware_component(v, at, None, issues)
            })?);
        }
    }
    source
        .fields
        .insert("data_source_channel".into(), cc.path("data_source_channel"));
    let data_source_channel = cc.required_string("data_source_channel", issues)?;

    // Floating keys: prefer the `chain` placement, flag duplicates.
    let mut pick = |key: &str, issues: &mut Vec<ReportItem>| -> Option<(&Value, Pointer)> {
        let inner = chain.has(key);
        let outer = item.has(key);
        if inner && outer {
            issues.push(ReportItem::error(
                "conflicting_keys",
                item.path(key),
                format!("`{key}` given both on the chain item and inside `chain`"),
            ));
        }
        let outer_v = item.take(key);
        let inner_v = chain.take(key);
        match (inner_v, outer_v) {
            (Some(v), _) => Some((v, chain.path(key))),
            (None, Some(v)) => Some((v, item.path(key))),
            _ => None,
        }
    };
    let num_chains = pick(FLOATING_CHAIN_KEYS[0], issues);
    let locations = pick(FLOATING_CHAIN_KEYS[1], issues);
    let orientations = pick(FLOATING_CHAIN_KEYS[2], issues);

    let num_data_source_chains = match num_chains {
        Some((Value::Number(n), p)) => {
            source.fields.insert("num_data_source_chains".into(), p.clone());
            n.as_u64().ok_or_else(|| DescError::Type {
                path: p.to_string(),
                expected: "non-negative integer",
                found: format!("number {n}"),
            })?
        }
        Some((other, p)) => return Err(type_error(&p, "non-negative integer", other)),
        None => {
            let p = chain_at.key("num_data_source_chains");
            source.fields.insert("num_data_source_chains".into(), p.clone());
            issues.push(ReportItem::warning(
                "defaulted_field",
                p,
                "`num_data_source_chains` absent, assuming 1",
            ));
            1
        }
    };
    let channel_locations = match locations {
        Some((v, p)) => {
            source.fields.insert("channel_locations".into(), p.clone());
            Some(channel_locations(v, &p, issues)?)
        }
        None => None,
    };
    let channel_orientations = match orientations {
        Some((v, p)) => {
            source.fields.insert("channel_orientations".into(), p.clone());
            Some(channel_orientations(v, &p, issues)?)
        }
        None => None,
    };

    let channel_chain_extra = cc.finish(issues);
    let chain_extra = chain.finish(issues);
    let extra = item.finish(issues);
    Ok(DataChainDesc {
        label,
        data_source,
        hardware_components,
        data_source_channel,
        num_data_source_chains,
        channel_locations,
        channel_orientations,
        extra,
        chain_extra,
        channel_chain_extra,
        source,
    })
}

fn channel_locations(
    v: &Value,
    at: &Pointer,
    issues: &mut Vec<ReportItem>,
) -> Result<ChannelLocations, DescError> {
    let mut f = Fields::of(v, at)?;
    let file = f.required_string("file", issues)?;
    let loc_unit = match f.string("loc_unit")? {
        Some(u) => u,
        None => {
            issues.push(ReportItem::error(
                "missing_unit",
                f.path("loc_unit"),
                "channel locations need a `loc_unit`",
            ));
            String::new()
        }
    };
    let dataset = f.string("dataset")?;
    let extra = f.finish(issues);
    Ok(ChannelLocations {
        file,
        loc_unit,
        dataset,
        extra,
    })
}

fn channel_orientations(
    v: &Value,
    at: &Pointer,
    issues: &mut Vec<ReportItem>,
) -> Result<ChannelOrientations, DescError> {
    let mut f = Fields::of(v, at)?;
    let file = f.required_string("file", issues)?;
    let format = match f.string("format")?.as_deref() {
        None | Some("quaternion") => OrientationFormat::Quaternion,
        Some("axis_angle") => OrientationFormat::AxisAngle,
        Some(other) => {
            return Err(DescError::Type {
                path: f.path("format").to_string(),
                expected: "`quaternion` or `axis_angle`",
                found: format!("string {other:?}"),
            })
        }
    };
    let angle_unit = f.string("angle_unit")?.unwrap_or_else(|| "rad".into());
    let dataset = f.string("dataset")?;
    let extra = f.finish(issues);
    Ok(ChannelOrientations {
        file,
        format,
        angle_unit,
        dataset,
        extra,
    })
}

fn data_source(
    v: &Value,
    at: &Pointer,
    key_id: Option<String>,
    issues: &mut Vec<ReportItem>,
) -> Result<DataSourceDesc, DescError> {
    let mut f = Fields::of(v, at)?;
    let id = doc_id(&mut f, key_id, issues)?;
    let name = f.string("name")?.unwrap_or_default();
    let source_type = f.required_string("source_type", issues)?;
    let num_channels = match f.uint("num_channels")? {
        Some(n) => n,
        None => {
            issues.push(ReportItem::error(
                "missing_field",
                f.path("num_channels"),
                "required field `num_channels` is missing",
            ));
            0
        }
    };
    let params_at = f.path("parameters");
    let parameters = quantity_map(f.take("parameters"), &params_at)?;
    let extra = f.finish(issues);
    let mut source = SourceMap::new(at.clone());
    source.fields.insert("parameters".into(), params_at);
    Ok(DataSourceDesc {
        id,
        name,
        source_type,
        num_channels,
        parameters,
        extra,
        source,
    })
}

fn hardware_component(
    v: &Value,
    at: &Pointer,
    key_id: Option<String>,
    issues: &mut Vec<ReportItem>,
) -> Result<HardwareComponentDesc, DescError> {
    let mut f = Fields::of(v, at)?;
    let id = doc_id(&mut f, key_id, issues)?;
    let name = f.string("name")?.unwrap_or_default();
    let kind_at = f.path("component_type");
    let kind = match f.string("component_type")? {
        Some(s) => ComponentKind::parse(&s).ok_or_else(|| DescError::Type {
            path: kind_at.to_string(),
            expected: "one of antenna, cable, amplifier, filter, microphone, sensor, other",
            found: format!("string {s:?}"),
        })?,
        None => ComponentKind::Other,
    };
    let ports = f.uint("ports")?.unwrap_or(1);
    let attrs_at = f.path("attributes");
    let mut attributes = Vec::new();
    if let Some(items) = f.seq("attributes")? {
        for (i, item) in items.iter().enumerate() {
            attributes.push(attribute(item, &attrs_at.index(i), &id, issues)?);
        }
    }
    let extra = f.finish(issues);
    Ok(HardwareComponentDesc {
        id,
        name,
        kind,
        ports,
        attributes,
        extra,
        source: SourceMap::new(at.clone()),
    })
}

fn attribute(
    v: &Value,
    at: &Pointer,
    component: &str,
    issues: &mut Vec<ReportItem>,
) -> Result<AttributeRef, DescError> {
    let mut f = Fields::of(v, at)?;
    let name = f.required_string("name", issues)?;
    let data = match (f.string("data_ref")?, f.take("data")) {
        (Some(r), _) => match r.split_once('#') {
            Some((file, dataset)) => AttributeData::File {
                file: file.to_string(),
                dataset: dataset.to_string(),
            },
            None => AttributeData::File {
                file: r,
                dataset: format!("/hardware_attributes/{component}/{name}"),
            },
        },
        (None, Some(data)) => AttributeData::Inline(inline_rows(data, &at.key("data"))?),
        (None, None) => AttributeData::Absent,
    };
    let units_at = f.path("units");
    let units = match f.take("units") {
        None => Vec::new(),
        Some(Value::Sequence(s)) => s
            .iter()
            .enumerate()
            .map(|(i, u)| scalar_string(u, &units_at.index(i)))
            .collect::<Result<_, _>>()?,
        Some(v @ Value::String(_)) => vec![scalar_string(v, &units_at)?],
        Some(other) => return Err(type_error(&units_at, "list of unit strings", other)),
    };
    let extra = f.finish(issues);
    Ok(AttributeRef {
        name,
        data,
        units,
        extra,
        source: SourceMap::new(at.clone()),
    })
}

fn inline_rows(v: &Value, at: &Pointer) -> Result<Vec<Vec<f64>>, DescError> {
    let Value::Sequence(rows) = v else {
        return Err(type_error(at, "sequence of numbers or rows", v));
    };
    let number = |x: &Value, at: &Pointer| -> Result<f64, DescError> {
        x.as_f64().ok_or_else(|| type_error(at, "number", x))
    };
    rows.iter()
        .enumerate()
        .map(|(i, row)| match row {
            Value::Sequence(cols) => cols
                .iter()
                .enumerate()
                .map(|(j, x)| number(x, &at.index(i).index(j)))
                .collect(),
            x => Ok(vec![number(x, &at.index(i))?]),
        })
        .collect()
}

fn environment(
    v: &Value,
    at: &Pointer,
    key_id: Option<String>,
    issues: &mut Vec<ReportItem>,
) -> Result<EnvironmentDesc, DescError> {
    let mut f = Fields::of(v, at)?;
    let id = doc_id(&mut f, key_id, issues)?;
    let props_at = f.path("properties");
    let properties = quantity_map(f.take("properties"), &props_at)?;
    let refs_at = f.path("file_refs");
    let mut file_refs = Vec::new();
    if let Some(items) = f.seq("file_refs")? {
        for (i, item) in items.iter().enumerate() {
            let mut r = Fields::of(item, &refs_at.index(i))?;
            let role = r.required_string("role", issues)?;
            let path = r.required_string("path", issues)?;
            r.finish(issues);
            file_refs.push(FileRef { role, path });
        }
    }
    let extra = f.finish(issues);
    let mut source = SourceMap::new(at.clone());
    source.fields.insert("file_refs".into(), refs_at);
    Ok(EnvironmentDesc {
        id,
        properties,
        file_refs,
        extra,
        source,
    })
}

fn experiment(
    v: &Value,
    at: &Pointer,
    key_id: Option<String>,
    issues: &mut Vec<ReportItem>,
) -> Result<ExperimentDesc, DescError> {
    let mut f = Fields::of(v, at)?;
    let id = doc_id(&mut f, key_id, issues)?;
    let name = f.string("name")?.unwrap_or_default();

    let tb_at = f.path("testbeds");
    let mut testbeds = Vec::new();
    match f.take("testbeds") {
        None => issues.push(ReportItem::error(
            "missing_field",
            tb_at.clone(),
            "an experiment must list at least one testbed",
        )),
        Some(Value::Sequence(items)) => {
            for (i, item) in items.iter().enumerate() {
                testbeds.push(reference(item, &tb_at.index(i), issues, |v, at, issues| {
                    testbed(v, at, None, issues)
                })?);
            }
        }
        Some(single @ (Value::String(_) | Value::Mapping(_))) => {
            testbeds.push(reference(single, &tb_at, issues, |v, at, issues| testbed(v, at, None, issues))?)
        }
        Some(other) => return Err(type_error(&tb_at, "list of testbed references", other)),
    }

    let env_at = f.path("environment");
    let environment = f
        .take("environment")
        .map(|e| reference(e, &env_at, issues, |v, at, issues| environment(v, at, None, issues)))
        .transpose()?;

    let m_at = f.path("measurements");
    let mut measurements = Vec::new();
    if let Some(items) = f.seq("measurements")? {
        for (i, item) in items.iter().enumerate() {
            let at = m_at.index(i);
            let mut m = Fields::of(item, &at)?;
            let id = m.required_string("id", issues)?;
            let file = m.required_string("file", issues)?;
            let dataset_type = m.required_string("dataset_type", issues)?;
            let p_at = m.path("parameters");
            let parameters = quantity_map(m.take("parameters"), &p_at)?;
            let extra = m.finish(issues);
            measurements.push(MeasurementDesc {
                id,
                file,
                dataset_type,
                parameters,
                extra,
            });
        }
    }

    let map_at = f.path("tx_rx_mapping");
    let tx_rx_mapping = match f.take("tx_rx_mapping") {
        None => TxRxMapping::Unspecified,
        Some(Value::String(s)) if s == "full" => TxRxMapping::Full { tx: None, rx: None },
        Some(Value::Mapping(_)) => {
            let mut m = Fields::of(f.map.get("tx_rx_mapping").unwrap(), &map_at)?;
            match m.string("mode")?.as_deref() {
                Some("full") => {}
                other => {
                    return Err(DescError::Type {
                        path: map_at.key("mode").to_string(),
                        expected: "`full`",
                        found: format!("{other:?}"),
                    })
                }
            }
            let tx = m.string("tx")?;
            let rx = m.string("rx")?;
            m.finish(issues);
            TxRxMapping::Full { tx, rx }
        }
        Some(Value::Sequence(items)) => {
            let mut pairs = Vec::new();
            for (i, item) in items.iter().enumerate() {
                let at = map_at.index(i);
                let pair = match item {
                    Value::Sequence(xy) if xy.len() == 2 => {
                        let get = |j: usize| {
                            xy[j].as_u64().ok_or_else(|| type_error(&at.index(j), "channel index", &xy[j]))
                        };
                        ChannelPair { tx: get(0)?, rx: get(1)? }
                    }
                    Value::Mapping(_) => {
                        let mut p = Fields::of(item, &at)?;
                        let tx = p.uint("tx")?;
                        let rx = p.uint("rx")?;
                        p.finish(issues);
                        match (tx, rx) {
                            (Some(tx), Some(rx)) => ChannelPair { tx, rx },
                            _ => {
                                return Err(DescError::Type {
                                    path: at.to_string(),
                                    expected: "pair with `tx` and `rx`",
                                    found: "an incomplete pair".into(),
                                })
                            }
                        }
                    }
                    other => return Err(type_error(&at, "channel pair", other)),
                };
                pairs.push(pair);
            }
            TxRxMapping::Pairs(pairs)
        }
        Some(other) => return Err(type_error(&map_at, "`full`, a mapping or a list of pairs", other)),
    };

    let vars_at = f.path("variables");
    let variables = quantity_map(f.take("variables"), &vars_at)?;

    let media_at = f.path("media");
    let mut media = Vec::new();
    if let Some(items) = f.seq("media")? {
        for (i, item) in items.iter().enumerate() {
            let at = media_at.index(i);
            let mut m = Fields::of(item, &at)?;
            let kind_s = m.required_string("kind", issues)?;
            let kind = MediaKind::parse(&kind_s).ok_or_else(|| DescError::Type {
                path: at.key("kind").to_string(),
                expected: "one of photo, video, scan",
                found: format!("string {kind_s:?}"),
            })?;
            let path = m.required_string("path", issues)?;
            m.finish(issues);
            media.push(MediaRef { kind, path });
        }
    }

    let sync_at = f.path("sync_info");
    let sync_info = match f.take("sync_info") {
        None => None,
        Some(v @ Value::Mapping(_)) => Some(v.clone()),
        Some(other) => return Err(type_error(&sync_at, "mapping", other)),
    };

    let extra = f.finish(issues);
    let mut source = SourceMap::new(at.clone());
    source.fields.insert("tx_rx_mapping".into(), map_at);
    source.fields.insert("testbeds".into(), tb_at);
    Ok(ExperimentDesc {
        id,
        name,
        testbeds,
        environment,
        measurements,
        tx_rx_mapping,
        variables,
        media,
        sync_info,
        extra,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ErrorClass;

    #[test]
    fn empty_text_is_a_syntax_error() {
        let e = parse_description("", DocKind::Testbed).unwrap_err();
        assert_eq!(e.class(), ErrorClass::Syntax);
        let e = parse_description("# only a comment\n", DocKind::Testbed).unwrap_err();
        assert_eq!(e.class(), ErrorClass::Syntax);
    }

    #[test]
    fn malformed_yaml_reports_position() {
        let e = parse_description("id: x\nname: [unclosed\n", DocKind::DataSource).unwrap_err();
        match e {
            DescError::Syntax { line, .. } => assert!(line >= 2, "{line}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_primitive_type_points_at_the_field() {
        let text = "kind: testbed\nid: T\nname: T\ndata_chains:\n  - label: RF\n    num_data_source_chains: \"many\"\n    chain:\n      data_source: B210\n      channel_chain: {data_source_channel: \"0\"}\n";
        let e = parse_description(text, DocKind::Testbed).unwrap_err();
        assert_eq!(e.class(), ErrorClass::Type);
        assert_eq!(e.path(), Some("data_chains[0].num_data_source_chains"));
    }

    #[test]
    fn kind_mismatch() {
        let e = parse_description("kind: data_source\nid: B210\nsource_type: SDR\nnum_channels: 2\n", DocKind::Testbed)
            .unwrap_err();
        assert_eq!(e.class(), ErrorClass::KindMismatch);
        // Shape of another kind without a `kind:` field.
        let e = parse_description("id: B210\nsource_type: SDR\nnum_channels: 2\n", DocKind::Testbed).unwrap_err();
        assert_eq!(e.class(), ErrorClass::KindMismatch);
    }

    #[test]
    fn unknown_keys_are_preserved_as_warnings() {
        let doc = parse_description(
            "id: B210\nsource_type: SDR\nnum_channels: 2\nvendor: Ettus\n",
            DocKind::DataSource,
        )
        .unwrap();
        let DocBody::DataSource(ds) = &doc.body else { panic!() };
        assert_eq!(ds.extra.len(), 1);
        assert_eq!(ds.extra[0].0, "vendor");
        assert!(doc.issues.iter().any(|i| i.code == "unknown_key" && i.path == "vendor"));
    }

    #[test]
    fn merge_keys_are_applied_before_typing() {
        let text = "kind: data_source\nanchors:\n  base: &base {source_type: SDR, num_channels: 2}\nB210:\n  <<: *base\n  name: USRP B210\n";
        let doc = parse_description(text, DocKind::DataSource).unwrap();
        let DocBody::DataSource(ds) = &doc.body else { panic!() };
        assert_eq!(ds.id, "B210");
        assert_eq!(ds.num_channels, 2);
        assert_eq!(ds.source_type, "SDR");
        assert_eq!(doc.origin.prefix.to_string(), "B210");
    }

    #[test]
    fn quantities_accept_both_forms() {
        let text = "id: X\nsource_type: SDR\nnum_channels: 1\nparameters:\n  sampling_rate: {value: 1, unit: MHz}\n  gain: 30\n";
        let doc = parse_description(text, DocKind::DataSource).unwrap();
        let DocBody::DataSource(ds) = &doc.body else { panic!() };
        assert_eq!(ds.parameters["sampling_rate"].si_value(), Some(1e6));
        assert_eq!(ds.parameters["gain"].unit, None);
    }

    #[test]
    fn multiple_documents_in_a_stream() {
        let text = "kind: data_source\nid: A\nsource_type: SDR\nnum_channels: 1\n---\nkind: hardware_component\nid: C\ncomponent_type: cable\n";
        let docs = parse_documents(text, None).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[1].kind(), DocKind::HardwareComponent);
        assert_eq!(docs[1].origin.document, 1);
        assert!(parse_documents("id: A\nsource_type: SDR\n", None).is_err());
    }
}
