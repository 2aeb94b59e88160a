use std::collections::BTreeMap;

use super::channels::{expand_channels, ChannelMap, FsLocationLoader, LocationLoader};
use super::registry::Registry;
use super::selector::parse_channel_selector;
use super::types::*;
use super::{DescError, DocKind};

/// A testbed with its references replaced by definitions and its channels
/// expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTestbed {
    pub testbed: TestbedDesc,
    pub data_sources: BTreeMap<String, DataSourceDesc>,
    pub components: BTreeMap<String, HardwareComponentDesc>,
    pub channel_map: ChannelMap,
    /// Index of this testbed's first channel in the experiment-wide space.
    pub channel_offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub experiment: ExperimentDesc,
    pub testbeds: Vec<ResolvedTestbed>,
    pub environment: Option<EnvironmentDesc>,
    /// Expanded tx/rx pairs in the experiment-wide channel space.
    pub pairs: Vec<ChannelPair>,
    pub total_channels: usize,
}

impl ResolvedExperiment {
    /// Testbed and local index of an experiment-wide channel index.
    pub fn locate(&self, channel: usize) -> Option<(&ResolvedTestbed, usize)> {
        self.testbeds.iter().find_map(|t| {
            let local = channel.checked_sub(t.channel_offset)?;
            (local < t.channel_map.len()).then_some((t, local))
        })
    }
}

/// Resolves experiment `id` transitively: testbeds, their data sources and
/// components, the environment, and the tx/rx mapping.
///
/// Channel locations are read relative to the experiment file's directory.
pub fn resolve_experiment(id: &str, registry: &Registry) -> Result<ResolvedExperiment, DescError> {
    let doc = registry.get(DocKind::Experiment, id).ok_or_else(|| DescError::UnresolvedRef {
        kind: DocKind::Experiment,
        id: id.to_string(),
        path: String::new(),
    })?;
    let super::DocBody::Experiment(x) = &doc.body else {
        unreachable!("registry keys match document kinds")
    };
    let loader = FsLocationLoader::new(registry.base_dir_for(Some(doc)));
    resolve_with(x, registry, &loader)
}

/// Like [`resolve_experiment`] for an experiment already at hand, with a
/// caller-provided location loader.
pub fn resolve_with(
    x: &ExperimentDesc,
    registry: &Registry,
    loader: &dyn LocationLoader,
) -> Result<ResolvedExperiment, DescError> {
    let mut testbeds = Vec::new();
    let mut offset = 0;
    for r in &x.testbeds {
        let tb = lookup(r, DocKind::Testbed, |id| registry.testbed(id))?;
        let resolved = resolve_testbed(tb, registry, loader, offset)?;
        offset += resolved.channel_map.len();
        testbeds.push(resolved);
    }
    let environment = x
        .environment
        .as_ref()
        .map(|r| lookup(r, DocKind::Environment, |id| registry.environment(id)).cloned())
        .transpose()?;
    let total = offset;
    let pairs = expand_mapping(&x.tx_rx_mapping, total)?;
    Ok(ResolvedExperiment {
        experiment: x.clone(),
        testbeds,
        environment,
        pairs,
        total_channels: total,
    })
}

fn lookup<'a, T>(
    r: &'a Reference<T>,
    kind: DocKind,
    get: impl FnOnce(&str) -> Option<&'a T>,
) -> Result<&'a T, DescError> {
    match &r.inline {
        Some(inline) => Ok(inline),
        None => get(&r.id).ok_or_else(|| DescError::UnresolvedRef {
            kind,
            id: r.id.clone(),
            path: r.source.at.to_string(),
        }),
    }
}

fn resolve_testbed(
    tb: &TestbedDesc,
    registry: &Registry,
    loader: &dyn LocationLoader,
    channel_offset: usize,
) -> Result<ResolvedTestbed, DescError> {
    let mut data_sources = BTreeMap::new();
    let mut components = BTreeMap::new();
    for chain in &tb.data_chains {
        let ds = lookup(&chain.data_source, DocKind::DataSource, |id| registry.data_source(id))?;
        let range = super::selector::ChannelSelector::parse_range(&chain.data_source_channel)?;
        if range.end as u64 > ds.num_channels {
            return Err(DescError::Range(format!(
                "chain {:?}: selector {:?} exceeds the {} channels of {:?}",
                chain.label, chain.data_source_channel, ds.num_channels, ds.id
            )));
        }
        data_sources.insert(ds.id.clone(), ds.clone());
        for c in &chain.hardware_components {
            let hc = lookup(c, DocKind::HardwareComponent, |id| registry.hardware_component(id))?;
            components.insert(hc.id.clone(), hc.clone());
        }
    }
    let channel_map = expand_channels(tb, loader)?;
    Ok(ResolvedTestbed {
        testbed: tb.clone(),
        data_sources,
        components,
        channel_map,
        channel_offset,
    })
}

fn expand_mapping(mapping: &TxRxMapping, total: usize) -> Result<Vec<ChannelPair>, DescError> {
    let side = |sel: &Option<String>| -> Result<Vec<usize>, DescError> {
        match sel {
            None => Ok((0..total).collect()),
            Some(s) => parse_channel_selector(s, total)
                .map(|s| s.indices)
                .map_err(|e| DescError::Mapping(e.to_string())),
        }
    };
    match mapping {
        TxRxMapping::Unspecified => Ok(Vec::new()),
        TxRxMapping::Full { tx, rx } => {
            let (tx, rx) = (side(tx)?, side(rx)?);
            Ok(tx
                .iter()
                .flat_map(|&t| {
                    rx.iter().map(move |&r| ChannelPair {
                        tx: t as u64,
                        rx: r as u64,
                    })
                })
                .collect())
        }
        TxRxMapping::Pairs(pairs) => {
            if let Some(p) = pairs.iter().find(|p| p.tx as usize >= total || p.rx as usize >= total) {
                return Err(DescError::Mapping(format!(
                    "pair ({}, {}) outside the {total} experiment channels",
                    p.tx, p.rx
                )));
            }
            Ok(pairs.clone())
        }
    }
}
