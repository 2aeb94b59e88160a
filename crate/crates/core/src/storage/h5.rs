use std::collections::BTreeMap;
use std::ffi::CString;
use std::path::Path;
use std::str::FromStr;

use hdf5::types::VarLenUnicode;
use hdf5::{Dataset, Datatype, File, Group, Location};
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use super::{Format, StorageError};
use crate::descfiles::DocKind;
use crate::model::{
    AttrValue, AxisDef, AxisKind, ChannelCoords, CoordinateVec, Domain, DssDataset, HardwareAttribute, Payload,
    RaggedSeries, Semantics,
};

/// `dss_version` written to every file.
pub(crate) const FILE_VERSION: &str = crate::DSS_VERSION;

const NC_PROPERTIES: &str = "version=2,netcdf=4.8.1,hdf5=1.10.7";
const NC_PURE_DIM: &str = "This is a netCDF dimension but not a netCDF variable.";

/// Root attributes owned by the layout.
pub(crate) const LAYOUT_ATTRS: [&str; 5] = ["dss_version", "dataset_type", "domain", "axes", "axis_kinds"];

#[derive(hdf5::H5Type, Clone, Copy, Debug)]
#[repr(C)]
struct C128 {
    r: f64,
    i: f64,
}

#[derive(hdf5::H5Type, Clone, Copy, Debug)]
#[repr(C)]
struct TimeValue {
    t: f64,
    value: f64,
}

unsafe extern "C" {
    fn H5DSset_scale(did: i64, name: *const std::os::raw::c_char) -> i32;
    fn H5DSattach_scale(did: i64, dsid: i64, idx: std::os::raw::c_uint) -> i32;
}

fn h5err(at: &str) -> impl Fn(hdf5::Error) -> StorageError + '_ {
    move |e| StorageError::format(at, e.to_string())
}

fn text(s: &str, at: &str) -> Result<VarLenUnicode, StorageError> {
    VarLenUnicode::from_str(s).map_err(|e| StorageError::UnsupportedFeature(format!("{at}: {e}")))
}

/// Rejects values the layout cannot hold.
pub(crate) fn check_storable(ds: &DssDataset) -> Result<(), StorageError> {
    let nul = |s: &str, what: &str| -> Result<(), StorageError> {
        if s.contains('\0') {
            Err(StorageError::UnsupportedFeature(format!(
                "{what} contains a NUL character, which HDF5 strings cannot hold"
            )))
        } else {
            Ok(())
        }
    };
    for (name, v) in &ds.attrs {
        if LAYOUT_ATTRS.contains(&name.as_str()) || name.starts_with('_') || name.is_empty() || name.contains('/') {
            return Err(crate::model::ModelError::ReservedName(format!("attribute name {name:?} is reserved")).into());
        }
        if let AttrValue::Text(t) = v {
            nul(t, &format!("attribute {name:?}"))?;
        }
    }
    for ((kind, id), body) in &ds.metadata_bundle {
        if id.is_empty() || id.contains('/') || id.starts_with('.') {
            return Err(StorageError::UnsupportedFeature(format!(
                "{kind} id {id:?} cannot be used as a path component"
            )));
        }
        nul(body, &format!("metadata {kind}/{id}"))?;
        nul(id, "metadata id")?;
    }
    for a in &ds.axes {
        if let Some(c) = &a.coordinate {
            nul(&c.unit, "coordinate unit")?;
        }
    }
    for s in ds.series() {
        nul(&s.unit, "series unit")?;
    }
    for (comp, attrs) in &ds.hardware_attributes {
        nul(comp, "component id")?;
        for (name, a) in attrs {
            nul(name, "attribute name")?;
            for u in &a.units {
                nul(u, "unit")?;
            }
            if a.values.ndim() == 0 {
                return Err(StorageError::UnsupportedFeature(format!(
                    "hardware attribute {comp}/{name} must have at least one dimension"
                )));
            }
        }
    }
    Ok(())
}

fn put_text_attr(loc: &Location, name: &str, value: &str) -> Result<(), StorageError> {
    let v = text(value, name)?;
    loc.new_attr::<VarLenUnicode>()
        .shape(())
        .create(name)
        .and_then(|a| a.write_scalar(&v))
        .map_err(h5err(name))
}

fn put_text_list_attr(loc: &Location, name: &str, values: &[String]) -> Result<(), StorageError> {
    let v = values.iter().map(|s| text(s, name)).collect::<Result<Vec<_>, _>>()?;
    loc.new_attr::<VarLenUnicode>()
        .shape([v.len()])
        .create(name)
        .and_then(|a| a.write_raw(&v))
        .map_err(h5err(name))
}

fn put_f64_attr(loc: &Location, name: &str, value: f64) -> Result<(), StorageError> {
    loc.new_attr::<f64>()
        .shape(())
        .create(name)
        .and_then(|a| a.write_scalar(&value))
        .map_err(h5err(name))
}

fn set_scale(ds: &Dataset, name: &str) -> Result<(), StorageError> {
    let c = CString::new(name).expect("dimension names have no NUL");
    // SAFETY: both ids are valid open handles for the duration of the call.
    let rc = hdf5::sync::sync(|| unsafe { H5DSset_scale(ds.id(), c.as_ptr()) });
    if rc < 0 {
        return Err(StorageError::format(name, "cannot mark dimension scale"));
    }
    Ok(())
}

fn attach_scale(var: &Dataset, scale: &Dataset, idx: usize, at: &str) -> Result<(), StorageError> {
    // SAFETY: as above.
    let rc = hdf5::sync::sync(|| unsafe { H5DSattach_scale(var.id(), scale.id(), idx as std::os::raw::c_uint) });
    if rc < 0 {
        return Err(StorageError::format(at, "cannot attach dimension scale"));
    }
    Ok(())
}

fn chunk_shape(ds: &DssDataset) -> Vec<usize> {
    let sample = ds
        .axes
        .iter()
        .position(|a| a.kind == AxisKind::Sample)
        .unwrap_or(ds.axes.len() - 1);
    ds.axes
        .iter()
        .enumerate()
        .map(|(i, a)| if i == sample { a.length } else { 1 })
        .collect()
}

pub(crate) fn write(ds: &DssDataset, path: &Path, format: Format) -> Result<(), StorageError> {
    let file = File::create(path).map_err(|e| StorageError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    if format == Format::Netcdf4 {
        put_text_attr(&file, "_NCProperties", NC_PROPERTIES)?;
    }
    put_text_attr(&file, "dss_version", FILE_VERSION)?;
    put_text_attr(&file, "dataset_type", &ds.dataset_type)?;
    put_text_attr(&file, "domain", ds.domain.as_str())?;
    if !ds.axes.is_empty() {
        let names: Vec<String> = ds.axes.iter().map(|a| a.name.clone()).collect();
        let kinds: Vec<String> = ds.axes.iter().map(|a| a.kind.as_str().to_string()).collect();
        put_text_list_attr(&file, "axes", &names)?;
        put_text_list_attr(&file, "axis_kinds", &kinds)?;
    }
    for (name, v) in &ds.attrs {
        match v {
            AttrValue::Number(x) => put_f64_attr(&file, name, *x)?,
            AttrValue::Text(t) => put_text_attr(&file, name, t)?,
        }
    }

    // One dimension per axis, at the root so every group sees it.
    let mut dims = Vec::new();
    for a in &ds.axes {
        let d = file
            .new_dataset::<f32>()
            .shape([a.length])
            .create(a.name.as_str())
            .map_err(h5err(&a.name))?;
        set_scale(&d, &format!("{NC_PURE_DIM}{:>10}", a.length))?;
        dims.push(d);
    }

    match &ds.payload {
        Payload::Complex(data) => {
            let dt = Datatype::from_type::<C128>().map_err(h5err("/data"))?;
            file.commit_datatype("complex128", &dt).map_err(h5err("/complex128"))?;
            let var = file
                .new_dataset_builder()
                .chunk(chunk_shape(ds))
                .deflate(4)
                .empty_as(&dt)
                .shape(data.shape())
                .create("data")
                .map_err(h5err("/data"))?;
            let raw: Vec<C128> = data.iter().map(|c| C128 { r: c.re, i: c.im }).collect();
            var.write_raw(&raw).map_err(h5err("/data"))?;
            for (i, d) in dims.iter().enumerate() {
                attach_scale(&var, d, i, "/data")?;
            }
        }
        Payload::Real(data) => {
            let var = file
                .new_dataset::<f64>()
                .chunk(chunk_shape(ds))
                .deflate(4)
                .shape(data.shape())
                .create("data")
                .map_err(h5err("/data"))?;
            let raw: Vec<f64> = data.iter().copied().collect();
            var.write_raw(&raw).map_err(h5err("/data"))?;
            for (i, d) in dims.iter().enumerate() {
                attach_scale(&var, d, i, "/data")?;
            }
        }
        Payload::Series(series) => {
            let dt = Datatype::from_type::<TimeValue>().map_err(h5err("/simulation"))?;
            file.commit_datatype("time_value", &dt).map_err(h5err("/time_value"))?;
            let sim = file.create_group("simulation").map_err(h5err("/simulation"))?;
            let mut runs: BTreeMap<u32, Group> = BTreeMap::new();
            for s in series {
                let at = format!("/simulation/run{}/{}", s.run, s.metric);
                if !runs.contains_key(&s.run) {
                    let g = sim.create_group(&format!("run{}", s.run)).map_err(h5err(&at))?;
                    runs.insert(s.run, g);
                }
                let g = &runs[&s.run];
                let var = g
                    .new_dataset_builder()
                    .empty_as(&dt)
                    .shape([s.points.len()])
                    .create(s.metric.as_str())
                    .map_err(h5err(&at))?;
                let raw: Vec<TimeValue> = s.points.iter().map(|&(t, value)| TimeValue { t, value }).collect();
                if !raw.is_empty() {
                    var.write_raw(&raw).map_err(h5err(&at))?;
                }
                put_text_attr(&var, "unit", &s.unit)?;
            }
        }
    }

    let has_coords = ds.axes.iter().any(|a| a.coordinate.is_some()) || !ds.channel_coords.is_empty();
    if has_coords {
        let g = file.create_group("coords").map_err(h5err("/coords"))?;
        for (i, a) in ds.axes.iter().enumerate() {
            if let Some(c) = &a.coordinate {
                let at = format!("/coords/{}", a.name);
                let var = g
                    .new_dataset::<f64>()
                    .shape([c.len()])
                    .create(a.name.as_str())
                    .map_err(h5err(&at))?;
                var.write_raw(&c.values).map_err(h5err(&at))?;
                attach_scale(&var, &dims[i], 0, &at)?;
                put_text_attr(&var, "unit", &c.unit)?;
                put_text_attr(&var, "semantics", c.semantics.as_str())?;
            }
        }
        // Position tables stay without dimension scales: netCDF needs all
        // dimensions of a variable attached or none.
        for (axis, cc) in &ds.channel_coords {
            let at = format!("/coords/{axis}_positions");
            let var = g
                .new_dataset::<f64>()
                .shape([cc.positions.len(), 3])
                .create(format!("{axis}_positions").as_str())
                .map_err(h5err(&at))?;
            let flat: Vec<f64> = cc.positions.iter().flatten().copied().collect();
            var.write_raw(&flat).map_err(h5err(&at))?;
            put_text_attr(&var, "unit", "m")?;
            if let Some(o) = &cc.orientations {
                let at = format!("/coords/{axis}_orientations");
                let var = g
                    .new_dataset::<f64>()
                    .shape([o.len(), 4])
                    .create(format!("{axis}_orientations").as_str())
                    .map_err(h5err(&at))?;
                let flat: Vec<f64> = o.iter().flatten().copied().collect();
                var.write_raw(&flat).map_err(h5err(&at))?;
                put_text_attr(&var, "unit", "quaternion")?;
            }
        }
    }

    if !ds.metadata_bundle.is_empty() {
        let g = file.create_group("metadata").map_err(h5err("/metadata"))?;
        let mut kinds: BTreeMap<DocKind, Group> = BTreeMap::new();
        for ((kind, id), body) in &ds.metadata_bundle {
            let at = format!("/metadata/{kind}/{id}");
            if !kinds.contains_key(kind) {
                kinds.insert(*kind, g.create_group(kind.as_str()).map_err(h5err(&at))?);
            }
            let var = kinds[kind]
                .new_dataset::<VarLenUnicode>()
                .shape(())
                .create(id.as_str())
                .map_err(h5err(&at))?;
            var.write_scalar(&text(body, &at)?).map_err(h5err(&at))?;
        }
    }

    if !ds.hardware_attributes.is_empty() {
        let g = file
            .create_group("hardware_attributes")
            .map_err(h5err("/hardware_attributes"))?;
        for (comp, attrs) in &ds.hardware_attributes {
            let cg = g.create_group(comp).map_err(h5err(comp))?;
            for (name, a) in attrs {
                let at = format!("/hardware_attributes/{comp}/{name}");
                let var = cg
                    .new_dataset::<f64>()
                    .shape(a.values.shape())
                    .create(name.as_str())
                    .map_err(h5err(&at))?;
                let raw: Vec<f64> = a.values.iter().copied().collect();
                if !raw.is_empty() {
                    var.write_raw(&raw).map_err(h5err(&at))?;
                }
                if !a.units.is_empty() {
                    put_text_list_attr(&var, "units", &a.units)?;
                }
            }
        }
    }
    file.flush().map_err(h5err("/"))?;
    Ok(())
}

fn get_text_attr(loc: &Location, name: &str, at: &str) -> Result<String, StorageError> {
    let a = loc
        .attr(name)
        .map_err(|_| StorageError::format(at, format!("missing attribute `{name}`")))?;
    a.read_scalar::<VarLenUnicode>()
        .map(|v| v.as_str().to_string())
        .map_err(|e| StorageError::format(at, format!("attribute `{name}` is not a string: {e}")))
}

fn get_text_list_attr(loc: &Location, name: &str, at: &str) -> Result<Vec<String>, StorageError> {
    let a = loc
        .attr(name)
        .map_err(|_| StorageError::format(at, format!("missing attribute `{name}`")))?;
    a.read_raw::<VarLenUnicode>()
        .map(|v| v.iter().map(|s| s.as_str().to_string()).collect())
        .map_err(|e| StorageError::format(at, format!("attribute `{name}` is not a string list: {e}")))
}

fn read_attr_value(loc: &Location, name: &str, at: &str) -> Result<AttrValue, StorageError> {
    let a = loc.attr(name).map_err(h5err(at))?;
    let dt = a.dtype().map_err(h5err(at))?;
    if !a.is_scalar() {
        return Err(StorageError::format(at, format!("attribute `{name}` is not a scalar")));
    }
    if dt.is::<VarLenUnicode>() {
        return get_text_attr(loc, name, at).map(AttrValue::Text);
    }
    a.read_scalar::<f64>()
        .map(AttrValue::Number)
        .map_err(|e| StorageError::format(at, format!("attribute `{name}`: {e}")))
}

fn member_names(g: &Group, at: &str) -> Result<Vec<String>, StorageError> {
    g.member_names().map_err(h5err(at))
}

pub(crate) fn read(path: &Path) -> Result<(DssDataset, Format), StorageError> {
    let file = File::open(path).map_err(|e| StorageError::format("/", format!("{}: {e}", path.display())))?;
    let root_attrs = file.attr_names().map_err(h5err("/"))?;
    let format = if root_attrs.iter().any(|n| n == "_NCProperties") {
        Format::Netcdf4
    } else {
        Format::Hdf5
    };
    let version = get_text_attr(&file, "dss_version", "/")?;
    if version != FILE_VERSION {
        return Err(StorageError::Version(format!(
            "dss_version {version:?} is not supported (expected {FILE_VERSION})"
        )));
    }
    let dataset_type = get_text_attr(&file, "dataset_type", "/")?;
    let domain = Domain::from_str(&get_text_attr(&file, "domain", "/")?)
        .map_err(|e| StorageError::format("/", e.to_string()))?;
    let mut attrs = BTreeMap::new();
    for name in &root_attrs {
        if LAYOUT_ATTRS.contains(&name.as_str()) || name.starts_with('_') {
            continue;
        }
        attrs.insert(name.clone(), read_attr_value(&file, name, "/")?);
    }

    let has_data = file.link_exists("data");
    let has_sim = file.link_exists("simulation");
    let (axes, payload) = if has_data {
        let names = get_text_list_attr(&file, "axes", "/")?;
        let kinds = get_text_list_attr(&file, "axis_kinds", "/")?;
        if names.len() != kinds.len() {
            return Err(StorageError::format("/", "`axes` and `axis_kinds` differ in length"));
        }
        let var = file.dataset("data").map_err(h5err("/data"))?;
        let shape = var.shape();
        if shape.len() != names.len() {
            return Err(StorageError::format(
                "/data",
                format!("rank {} for {} axes", shape.len(), names.len()),
            ));
        }
        let axes = names
            .iter()
            .zip(&kinds)
            .zip(&shape)
            .map(|((n, k), &len)| {
                let kind = AxisKind::from_str(k).map_err(|e| StorageError::format("/", e.to_string()))?;
                Ok(AxisDef::new(n.clone(), kind, len))
            })
            .collect::<Result<Vec<_>, StorageError>>()?;
        let dt = var.dtype().map_err(h5err("/data"))?;
        let payload = if dt.is::<f64>() {
            let raw = var.read_raw::<f64>().map_err(h5err("/data"))?;
            Payload::Real(ArrayD::from_shape_vec(IxDyn(&shape), raw).map_err(|e| StorageError::format("/data", e.to_string()))?)
        } else {
            let raw = var
                .read_raw::<C128>()
                .map_err(|e| StorageError::format("/data", format!("expected f64 or complex compound {{r, i}}: {e}")))?;
            let raw: Vec<Complex64> = raw.into_iter().map(|c| Complex64::new(c.r, c.i)).collect();
            Payload::Complex(
                ArrayD::from_shape_vec(IxDyn(&shape), raw).map_err(|e| StorageError::format("/data", e.to_string()))?,
            )
        };
        (axes, payload)
    } else if has_sim || dataset_type == crate::model::SIMULATION {
        let mut series = Vec::new();
        if has_sim {
            let sim = file.group("simulation").map_err(h5err("/simulation"))?;
            for run_name in member_names(&sim, "/simulation")? {
                let at = format!("/simulation/{run_name}");
                let run: u32 = run_name
                    .strip_prefix("run")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| StorageError::format(&at, "expected a group named run<k>"))?;
                let g = sim.group(&run_name).map_err(h5err(&at))?;
                for metric in member_names(&g, &at)? {
                    let at = format!("{at}/{metric}");
                    let var = g.dataset(&metric).map_err(h5err(&at))?;
                    let points = if var.size() == 0 {
                        Vec::new()
                    } else {
                        var.read_raw::<TimeValue>()
                            .map_err(h5err(&at))?
                            .into_iter()
                            .map(|p| (p.t, p.value))
                            .collect()
                    };
                    let unit = get_text_attr(&var, "unit", &at)?;
                    let s = RaggedSeries::new(run, metric, points, unit)
                        .map_err(|e| StorageError::format(&at, e.to_string()))?;
                    series.push(s);
                }
            }
        }
        series.sort_by(|a, b| (a.run, &a.metric).cmp(&(b.run, &b.metric)));
        (Vec::new(), Payload::Series(series))
    } else {
        return Err(StorageError::format("/data", "missing main tensor"));
    };

    let mut ds = DssDataset {
        dataset_type,
        axes,
        payload,
        domain,
        attrs,
        metadata_bundle: BTreeMap::new(),
        channel_coords: BTreeMap::new(),
        hardware_attributes: BTreeMap::new(),
    };

    if file.link_exists("coords") {
        let g = file.group("coords").map_err(h5err("/coords"))?;
        let members = member_names(&g, "/coords")?;
        for a in ds.axes.iter_mut() {
            if !members.contains(&a.name) {
                continue;
            }
            let at = format!("/coords/{}", a.name);
            let var = g.dataset(&a.name).map_err(h5err(&at))?;
            let values = var.read_raw::<f64>().map_err(h5err(&at))?;
            let unit = get_text_attr(&var, "unit", &at)?;
            let semantics = Semantics::from_str(&get_text_attr(&var, "semantics", &at)?)
                .map_err(|e| StorageError::format(&at, e.to_string()))?;
            if values.len() != a.length {
                return Err(StorageError::format(&at, format!("{} values for axis length {}", values.len(), a.length)));
            }
            a.coordinate = Some(CoordinateVec {
                values,
                unit,
                semantics,
            });
        }
        for m in &members {
            let Some(axis) = m.strip_suffix("_positions") else {
                if !m.ends_with("_orientations") && !ds.axes.iter().any(|a| &a.name == m) {
                    return Err(StorageError::format(format!("/coords/{m}"), "not an axis coordinate"));
                }
                continue;
            };
            let at = format!("/coords/{m}");
            let positions = read_rows::<3>(&g, m, &at)?;
            let o_name = format!("{axis}_orientations");
            let orientations = if members.contains(&o_name) {
                Some(read_rows::<4>(&g, &o_name, &format!("/coords/{o_name}"))?)
            } else {
                None
            };
            ds.channel_coords.insert(axis.to_string(), ChannelCoords { positions, orientations });
        }
    }

    if file.link_exists("metadata") {
        let g = file.group("metadata").map_err(h5err("/metadata"))?;
        for kind_name in member_names(&g, "/metadata")? {
            let at = format!("/metadata/{kind_name}");
            let kind = DocKind::from_str(&kind_name)
                .map_err(|_| StorageError::format(&at, "unknown description-file kind"))?;
            let kg = g.group(&kind_name).map_err(h5err(&at))?;
            for id in member_names(&kg, &at)? {
                let at = format!("{at}/{id}");
                let body = kg
                    .dataset(&id)
                    .and_then(|v| v.read_scalar::<VarLenUnicode>())
                    .map_err(h5err(&at))?;
                ds.metadata_bundle.insert((kind, id), body.as_str().to_string());
            }
        }
    }

    if file.link_exists("hardware_attributes") {
        let g = file
            .group("hardware_attributes")
            .map_err(h5err("/hardware_attributes"))?;
        for comp in member_names(&g, "/hardware_attributes")? {
            let at = format!("/hardware_attributes/{comp}");
            let cg = g.group(&comp).map_err(h5err(&at))?;
            let mut attrs = BTreeMap::new();
            for name in member_names(&cg, &at)? {
                let at = format!("{at}/{name}");
                let var = cg.dataset(&name).map_err(h5err(&at))?;
                let shape = var.shape();
                let raw = if var.size() == 0 {
                    Vec::new()
                } else {
                    var.read_raw::<f64>().map_err(h5err(&at))?
                };
                let values = ArrayD::from_shape_vec(IxDyn(&shape), raw).map_err(|e| StorageError::format(&at, e.to_string()))?;
                let units = if var.attr_names().map_err(h5err(&at))?.iter().any(|n| n == "units") {
                    get_text_list_attr(&var, "units", &at)?
                } else {
                    Vec::new()
                };
                attrs.insert(name, HardwareAttribute { values, units });
            }
            ds.hardware_attributes.insert(comp, attrs);
        }
    }

    ds.check().map_err(|e| StorageError::format("/", e.to_string()))?;
    Ok((ds, format))
}

fn read_rows<const N: usize>(g: &Group, name: &str, at: &str) -> Result<Vec<[f64; N]>, StorageError> {
    let var = g.dataset(name).map_err(h5err(at))?;
    let shape = var.shape();
    if shape.len() != 2 || shape[1] != N {
        return Err(StorageError::format(at, format!("expected an N x {N} array, found {shape:?}")));
    }
    let raw = var.read_raw::<f64>().map_err(h5err(at))?;
    Ok(raw
        .chunks_exact(N)
        .map(|c| {
            let mut row = [0.0; N];
            row.copy_from_slice(c);
            row
        })
        .collect())
}

/// Reads a numeric array at `dataset` (a path inside the file) as doubles,
/// with its shape.
pub fn read_f64_array(path: &Path, dataset: &str) -> Result<(Vec<f64>, Vec<usize>), StorageError> {
    let file = File::open(path).map_err(|e| StorageError::format("/", format!("{}: {e}", path.display())))?;
    let var = file
        .dataset(dataset.trim_start_matches('/'))
        .map_err(|_| StorageError::format(dataset, "no such array"))?;
    let shape = var.shape();
    let raw = if var.size() == 0 {
        Vec::new()
    } else {
        var.read_raw::<f64>().map_err(h5err(dataset))?
    };
    Ok((raw, shape))
}

/// Whether `dataset` names a numeric array in the HDF5 file at `path`.
pub fn has_array(path: &Path, dataset: &str) -> bool {
    let Ok(file) = File::open(path) else {
        return false;
    };
    file.dataset(dataset.trim_start_matches('/'))
        .and_then(|d| d.dtype())
        .map(|t| t.conv_to::<f64>().is_some())
        .unwrap_or(false)
}

/// Writes a standalone array file (e.g. channel locations) at `dataset`.
pub fn write_f64_array(path: &Path, dataset: &str, values: &[f64], shape: &[usize]) -> Result<(), StorageError> {
    let io = |e: hdf5::Error| StorageError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    };
    let file = File::create(path).map_err(io)?;
    put_text_attr(&file, "dss_version", FILE_VERSION)?;
    let name = dataset.trim_start_matches('/');
    let (parent, leaf) = match name.rsplit_once('/') {
        Some((p, l)) => (Some(p), l),
        None => (None, name),
    };
    let group = match parent {
        Some(p) => file.create_group(p).map_err(h5err(dataset))?,
        None => file.group("/").map_err(h5err(dataset))?,
    };
    group
        .new_dataset::<f64>()
        .shape(shape)
        .create(leaf)
        .and_then(|d| d.write_raw(values))
        .map_err(h5err(dataset))
}
