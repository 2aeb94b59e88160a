use std::collections::{BTreeMap, BTreeSet};

use super::channels::{chain_channel_count, orientation_quaternion, FsLocationLoader, LocationLoader};
use super::pointer::Pointer;
use super::registry::Registry;
use super::report::{ReportItem, ValidationReport};
use super::selector::ChannelSelector;
use super::types::*;
use super::units::length_to_meters;
use super::{DescError, DescriptionDoc, DocBody};
use crate::DSS_VERSION;

/// Checks one document against the standard's constraints and against the
/// documents in `registry`. Never fails: every problem is a report item.
///
/// Pure with respect to its inputs (and, with file access, the files they
/// reference); items come back in canonical order.
pub fn validate(doc: &DescriptionDoc, registry: &Registry) -> ValidationReport {
    let mut cx = Cx {
        registry,
        base: registry.base_dir_for(Some(doc)),
        items: doc.issues.clone(),
    };
    if doc.dss_version != DSS_VERSION {
        cx.error(
            "unsupported_version",
            doc.origin.prefix.key("dss_version"),
            format!("dss_version {:?} is not supported (expected {DSS_VERSION})", doc.dss_version),
        );
    }
    match &doc.body {
        DocBody::Testbed(t) => cx.testbed(t),
        DocBody::DataSource(d) => cx.data_source(d),
        DocBody::HardwareComponent(h) => cx.hardware_component(h),
        DocBody::Environment(e) => cx.environment(e),
        DocBody::Experiment(x) => cx.experiment(x),
    }
    let source = doc.source_label();
    let mut report = ValidationReport {
        items: cx
            .items
            .into_iter()
            .map(|i| if i.source.is_empty() { i.with_source(source.clone()) } else { i })
            .collect(),
    };
    report.canonicalize();
    report
}

struct Cx<'a> {
    registry: &'a Registry,
    base: std::path::PathBuf,
    items: Vec<ReportItem>,
}

impl Cx<'_> {
    fn error(&mut self, code: &str, at: Pointer, msg: impl Into<String>) {
        self.items.push(ReportItem::error(code, at, msg));
    }

    fn warning(&mut self, code: &str, at: Pointer, msg: impl Into<String>) {
        self.items.push(ReportItem::warning(code, at, msg));
    }

    fn loader(&self) -> FsLocationLoader {
        FsLocationLoader::new(&self.base)
    }

    fn units(&mut self, map: &BTreeMap<String, Quantity>, at: &Pointer) {
        for (name, q) in map {
            if q.unit.as_deref().is_some_and(|u| u.trim().is_empty()) {
                self.error(
                    "empty_unit",
                    at.key(name.clone()).key("unit"),
                    format!("`{name}` has an empty unit string"),
                );
            }
        }
    }

    fn testbed(&mut self, t: &TestbedDesc) {
        let chains_at = t.source.field("data_chains");
        if t.data_chains.is_empty() {
            self.error("empty_data_chains", chains_at.clone(), "a testbed needs at least one data chain");
        }
        let mut labels = BTreeSet::new();
        for chain in &t.data_chains {
            if !chain.label.is_empty() && !labels.insert(chain.label.as_str()) {
                self.error(
                    "duplicate_label",
                    chain.source.field("label"),
                    format!("data chain label {:?} is used twice", chain.label),
                );
            }
            self.chain(chain);
        }
    }

    fn chain(&mut self, chain: &DataChainDesc) {
        let registry = self.registry;
        // Data source.
        let ds_ref = &chain.data_source;
        let ds = match &ds_ref.inline {
            Some(inline) => {
                self.data_source(inline);
                Some(inline.as_ref())
            }
            None if ds_ref.id.is_empty() => None,
            None => {
                let found = registry.data_source(&ds_ref.id);
                if found.is_none() {
                    self.error(
                        "unresolved_ref",
                        ds_ref.source.at.clone(),
                        format!("data source {:?} is not defined", ds_ref.id),
                    );
                }
                found
            }
        };
        // Hardware components.
        for comp in &chain.hardware_components {
            match &comp.inline {
                Some(inline) => self.hardware_component(inline),
                None => {
                    if registry.hardware_component(&comp.id).is_none() {
                        self.error(
                            "unresolved_ref",
                            comp.source.at.clone(),
                            format!("hardware component {:?} is not defined", comp.id),
                        );
                    }
                }
            }
        }
        // Selector.
        let sel_at = chain.source.field("data_source_channel");
        let selector_len = if chain.data_source_channel.is_empty() {
            None
        } else {
            match ChannelSelector::parse_range(&chain.data_source_channel) {
                Ok(range) => {
                    if let Some(ds) = ds {
                        if range.end as u64 > ds.num_channels {
                            self.error(
                                "selector_range",
                                sel_at.clone(),
                                format!(
                                    "selector {:?} exceeds the {} channels of data source {:?}",
                                    chain.data_source_channel, ds.num_channels, ds.id
                                ),
                            );
                        }
                    }
                    Some(range.len())
                }
                Err(e @ DescError::Grammar { .. }) => {
                    self.error("selector_grammar", sel_at.clone(), e.to_string());
                    None
                }
                Err(e) => {
                    self.error("selector_range", sel_at.clone(), e.to_string());
                    None
                }
            }
        };
        if chain.num_data_source_chains < 1 {
            self.error(
                "invalid_value",
                chain.source.field("num_data_source_chains"),
                "num_data_source_chains must be at least 1",
            );
        }
        let expected = selector_len.and_then(|_| chain_channel_count(chain));

        let loader = self.loader();
        if let Some(loc) = &chain.channel_locations {
            let at = chain.source.field("channel_locations");
            if !loc.loc_unit.is_empty() && length_to_meters(&loc.loc_unit).is_none() {
                self.warning(
                    "uninterpreted_unit",
                    at.key("loc_unit"),
                    format!("location unit {:?} is not a length unit and is kept verbatim", loc.loc_unit),
                );
            }
            if loc.file.to_ascii_lowercase().ends_with(".npy") {
                self.warning(
                    "non_portable_format",
                    at.key("file"),
                    "`.npy` location files are accepted but CSV or DSS dataset files are portable",
                );
            }
            if !self.registry.file_access() {
                self.warning("external_file_unchecked", at.key("file"), "location file not checked");
            } else {
                match loader.load_locations(loc) {
                    Ok(rows) => {
                        if let Some(expected) = expected {
                            if rows.len() != expected {
                                self.error(
                                    "location_count_mismatch",
                                    at.key("file"),
                                    format!(
                                        "{} has {} rows, expected {expected} ({} chains x {} channels)",
                                        loc.file,
                                        rows.len(),
                                        chain.num_data_source_chains,
                                        selector_len.unwrap_or(0)
                                    ),
                                );
                            }
                        }
                    }
                    Err(DescError::Io { source, .. }) => self.error(
                        "location_file_unreadable",
                        at.key("file"),
                        format!("{}: {source}", loc.file),
                    ),
                    Err(e) => self.error("location_shape", at.key("file"), e.to_string()),
                }
            }
        }
        if let Some(o) = &chain.channel_orientations {
            let at = chain.source.field("channel_orientations");
            if !self.registry.file_access() {
                self.warning("external_file_unchecked", at.key("file"), "orientation file not checked");
            } else {
                match loader.load_orientations(o) {
                    Ok(rows) => {
                        if let Some(expected) = expected {
                            if rows.len() != expected {
                                self.error(
                                    "orientation_count_mismatch",
                                    at.key("file"),
                                    format!("{} has {} rows, expected {expected}", o.file, rows.len()),
                                );
                            }
                        }
                        if let Some((i, e)) = rows
                            .iter()
                            .enumerate()
                            .find_map(|(i, r)| orientation_quaternion(*r, o.format, &o.angle_unit).err().map(|e| (i, e)))
                        {
                            self.error("orientation_norm", at.key("file"), format!("row {i}: {e}"));
                        }
                    }
                    Err(DescError::Io { source, .. }) => self.error(
                        "orientation_file_unreadable",
                        at.key("file"),
                        format!("{}: {source}", o.file),
                    ),
                    Err(e) => self.error("orientation_shape", at.key("file"), e.to_string()),
                }
            }
        }
    }

    fn data_source(&mut self, d: &DataSourceDesc) {
        if d.num_channels < 1 && !self.items.iter().any(|i| i.code == "missing_field" && i.path == d.source.field("num_channels").to_string()) {
            self.error("invalid_value", d.source.field("num_channels"), "num_channels must be at least 1");
        }
        let params_at = d.source.field("parameters");
        self.units(&d.parameters, &params_at);
        if !d.parameters.contains_key("sampling_rate") && !d.parameters.contains_key("bandwidth") {
            self.warning(
                "missing_recommended_parameter",
                params_at,
                format!("data source {:?} gives neither sampling_rate nor bandwidth", d.id),
            );
        }
    }

    fn hardware_component(&mut self, h: &HardwareComponentDesc) {
        if h.ports < 1 {
            self.error("invalid_value", h.source.at.key("ports"), "ports must be at least 1");
        }
        let mut names = BTreeSet::new();
        for a in &h.attributes {
            if !a.name.is_empty() && !names.insert(a.name.as_str()) {
                self.error(
                    "duplicate_attribute",
                    a.source.at.key("name"),
                    format!("attribute {:?} defined twice", a.name),
                );
            }
            match &a.data {
                AttributeData::File { file, dataset } => {
                    if !self.registry.file_access() {
                        self.warning("external_file_unchecked", a.source.at.key("data_ref"), "data reference not checked");
                        continue;
                    }
                    let path = self.base.join(file);
                    if !crate::storage::has_array(&path, dataset) {
                        self.error(
                            "unresolved_data_ref",
                            a.source.at.key("data_ref"),
                            format!("{file}#{dataset} does not resolve to an array"),
                        );
                    }
                }
                AttributeData::Inline(rows) => {
                    let width = rows.first().map_or(0, Vec::len);
                    if rows.iter().any(|r| r.len() != width) {
                        self.error("ragged_inline_data", a.source.at.key("data"), "inline rows differ in length");
                    } else if !a.units.is_empty() && a.units.len() != width {
                        self.warning(
                            "unit_count_mismatch",
                            a.source.at.key("units"),
                            format!("{} units for {width} columns", a.units.len()),
                        );
                    }
                }
                AttributeData::Absent => self.warning(
                    "attribute_without_data",
                    a.source.at.clone(),
                    format!("attribute {:?} has neither data_ref nor data", a.name),
                ),
            }
        }
    }

    fn environment(&mut self, e: &EnvironmentDesc) {
        self.units(&e.properties, &e.source.at.key("properties"));
        let mut roles = BTreeSet::new();
        for (i, r) in e.file_refs.iter().enumerate() {
            if !roles.insert(r.role.as_str()) {
                self.error(
                    "duplicate_role",
                    e.source.field("file_refs").index(i).key("role"),
                    format!("file role {:?} used twice", r.role),
                );
            }
        }
    }

    fn experiment(&mut self, x: &ExperimentDesc) {
        let registry = self.registry;
        let mut total: Option<usize> = Some(0);
        for r in &x.testbeds {
            let tb = match &r.inline {
                Some(inline) => {
                    self.testbed(inline);
                    Some(inline.as_ref())
                }
                None => {
                    let found = registry.testbed(&r.id);
                    if found.is_none() {
                        self.error("unresolved_ref", r.source.at.clone(), format!("testbed {:?} is not defined", r.id));
                    }
                    found
                }
            };
            total = match (total, tb) {
                (Some(sum), Some(tb)) => tb
                    .data_chains
                    .iter()
                    .map(chain_channel_count)
                    .sum::<Option<usize>>()
                    .map(|n| sum + n),
                _ => None,
            };
        }
        if let Some(env) = &x.environment {
            match &env.inline {
                Some(inline) => self.environment(inline),
                None => {
                    if registry.environment(&env.id).is_none() {
                        self.error(
                            "unresolved_ref",
                            env.source.at.clone(),
                            format!("environment {:?} is not defined", env.id),
                        );
                    }
                }
            }
        }
        let m_at = x.source.at.key("measurements");
        let mut ids = BTreeSet::new();
        for (i, m) in x.measurements.iter().enumerate() {
            if !m.id.is_empty() && !ids.insert(m.id.as_str()) {
                self.error("duplicate_id", m_at.index(i).key("id"), format!("measurement id {:?} used twice", m.id));
            }
            self.units(&m.parameters, &m_at.index(i).key("parameters"));
        }
        self.units(&x.variables, &x.source.at.key("variables"));

        let map_at = x.source.field("tx_rx_mapping");
        match (&x.tx_rx_mapping, total) {
            (TxRxMapping::Pairs(pairs), Some(total)) => {
                for (i, p) in pairs.iter().enumerate() {
                    for (side, ch) in [("tx", p.tx), ("rx", p.rx)] {
                        if ch as usize >= total {
                            self.error(
                                "mapping_out_of_range",
                                map_at.index(i).key(side),
                                format!("{side} channel {ch} does not exist ({total} channels)"),
                            );
                        }
                    }
                }
            }
            (TxRxMapping::Full { tx, rx }, Some(total)) => {
                for (side, sel) in [("tx", tx), ("rx", rx)] {
                    if let Some(sel) = sel {
                        if let Err(e) = super::selector::parse_channel_selector(sel, total) {
                            self.error("mapping_out_of_range", map_at.key(side), e.to_string());
                        }
                    }
                }
            }
            (TxRxMapping::Unspecified, _) if !x.testbeds.is_empty() => self.warning(
                "missing_tx_rx_mapping",
                map_at,
                "no mapping between transmit and receive channels is described",
            ),
            _ => {}
        }
        for (i, m) in x.media.iter().enumerate() {
            if m.path.trim().is_empty() {
                self.error("invalid_value", x.source.at.key("media").index(i).key("path"), "empty media path");
            }
        }
    }
}

/// Validates every document of `registry` plus its load issues.
pub fn validate_registry(registry: &Registry) -> ValidationReport {
    let mut report = ValidationReport {
        items: registry.load_issues().to_vec(),
    };
    for doc in registry.docs() {
        report.extend(validate(doc, registry));
    }
    report.canonicalize();
    report
}
