use std::path::{Path, PathBuf};

use super::report::ReportItem;
use super::selector::ChannelSelector;
use super::types::*;
use super::units::length_to_meters;
use super::DescError;

/// One physical channel of an expanded testbed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRecord {
    /// Dense index in document order.
    pub global_index: usize,
    pub chain_label: String,
    pub chain_instance: usize,
    pub source_channel: usize,
    /// Meters, when the unit was interpretable; otherwise raw values.
    pub location: Option<[f64; 3]>,
    /// Unit quaternion `[w, x, y, z]`.
    pub orientation: Option<[f64; 4]>,
    /// Component ids, nearest the medium first.
    pub hardware_chain: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelMap {
    pub channels: Vec<ChannelRecord>,
    pub warnings: Vec<ReportItem>,
}

impl ChannelMap {
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn by_label<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a ChannelRecord> + 'a {
        self.channels.iter().filter(move |c| c.chain_label == label)
    }
}

/// Source of per-channel location and orientation tables.
pub trait LocationLoader {
    /// Raw rows of `loc.file`, each with three coordinates, in `loc.loc_unit`.
    fn load_locations(&self, loc: &ChannelLocations) -> Result<Vec<[f64; 3]>, DescError>;

    /// Raw rows of `o.file`, each with four numbers.
    fn load_orientations(&self, o: &ChannelOrientations) -> Result<Vec<[f64; 4]>, DescError>;
}

/// Reads location files from disk, relative to a base directory.
///
/// Accepted formats: delimited text (comma or whitespace separated, `#`
/// comments, optional header row), DSS dataset files (array at `dataset`,
/// default `/locations`) and `.npy` arrays.
#[derive(Debug, Clone)]
pub struct FsLocationLoader {
    pub base_dir: PathBuf,
}

impl FsLocationLoader {
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        FsLocationLoader {
            base_dir: base_dir.into(),
        }
    }

    fn path(&self, file: &str) -> PathBuf {
        let p = Path::new(file);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Loads an `rows x cols` table of doubles.
    pub fn load_table(&self, file: &str, dataset: Option<&str>, cols: usize) -> Result<Vec<Vec<f64>>, DescError> {
        let path = self.path(file);
        let io = |source| DescError::Io {
            path: path.clone(),
            source,
        };
        let bytes = std::fs::read(&path).map_err(io)?;
        let rows = if crate::storage::is_hdf5_signature(&bytes) {
            let dataset = dataset.unwrap_or("/locations");
            let (values, shape) = crate::storage::read_f64_array(&path, dataset)
                .map_err(|e| DescError::Shape(format!("{}: {e}", path.display())))?;
            to_rows(values, &shape, &path)?
        } else if bytes.starts_with(b"\x93NUMPY") {
            read_npy(&bytes, &path)?
        } else {
            let text = String::from_utf8(bytes).map_err(|e| {
                io(std::io::Error::new(std::io::ErrorKind::InvalidData, e))
            })?;
            parse_text_table(&text, &path)?
        };
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(DescError::Shape(format!(
                "{}: row {i} has {} columns, expected {cols}",
                path.display(),
                r.len()
            )));
        }
        Ok(rows)
    }
}

fn to_rows(values: Vec<f64>, shape: &[usize], path: &Path) -> Result<Vec<Vec<f64>>, DescError> {
    match shape {
        [_, cols] if *cols > 0 => Ok(values.chunks(*cols).map(<[f64]>::to_vec).collect()),
        [_, 0] => Ok(Vec::new()),
        other => Err(DescError::Shape(format!(
            "{}: expected a two-dimensional array, found shape {other:?}",
            path.display()
        ))),
    }
}

fn read_npy(bytes: &[u8], path: &Path) -> Result<Vec<Vec<f64>>, DescError> {
    use ndarray::{Array2, ArrayD};
    use ndarray_npy::ReadNpyExt;
    let shape_err = |e: ndarray_npy::ReadNpyError| DescError::Shape(format!("{}: {e}", path.display()));
    if let Ok(a) = Array2::<f64>::read_npy(bytes) {
        return Ok(a.outer_iter().map(|r| r.to_vec()).collect());
    }
    if let Ok(a) = Array2::<f32>::read_npy(bytes) {
        return Ok(a.outer_iter().map(|r| r.iter().map(|&x| f64::from(x)).collect()).collect());
    }
    let any = ArrayD::<f64>::read_npy(bytes).map_err(shape_err)?;
    Err(DescError::Shape(format!(
        "{}: expected a two-dimensional array, found shape {:?}",
        path.display(),
        any.shape()
    )))
}

fn parse_text_table(text: &str, path: &Path) -> Result<Vec<Vec<f64>>, DescError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(r) => rows.push(r),
            // A non-numeric first row is a header.
            Err(_) if rows.is_empty() => continue,
            Err(e) => {
                return Err(DescError::Shape(format!(
                    "{}:{}: {e}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(rows)
}

impl LocationLoader for FsLocationLoader {
    fn load_locations(&self, loc: &ChannelLocations) -> Result<Vec<[f64; 3]>, DescError> {
        let rows = self.load_table(&loc.file, loc.dataset.as_deref(), 3)?;
        Ok(rows.into_iter().map(|r| [r[0], r[1], r[2]]).collect())
    }

    fn load_orientations(&self, o: &ChannelOrientations) -> Result<Vec<[f64; 4]>, DescError> {
        let rows = self.load_table(&o.file, o.dataset.as_deref(), 4)?;
        Ok(rows.into_iter().map(|r| [r[0], r[1], r[2], r[3]]).collect())
    }
}

/// Number of channels a chain contributes (`num_data_source_chains` times the
/// selector length), when the selector parses.
pub(crate) fn chain_channel_count(chain: &DataChainDesc) -> Option<usize> {
    let range = ChannelSelector::parse_range(&chain.data_source_channel).ok()?;
    usize::try_from(chain.num_data_source_chains)
        .ok()?
        .checked_mul(range.len())
}

/// Converts an orientation row to a unit quaternion.
pub(crate) fn orientation_quaternion(
    row: [f64; 4],
    format: OrientationFormat,
    angle_unit: &str,
) -> Result<[f64; 4], DescError> {
    match format {
        OrientationFormat::Quaternion => {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(DescError::Shape(format!(
                    "quaternion {row:?} has norm {norm}, expected 1"
                )));
            }
            Ok(row)
        }
        OrientationFormat::AxisAngle => {
            let [ax, ay, az, angle] = row;
            let angle = match angle_unit {
                "deg" => angle.to_radians(),
                "rad" => angle,
                other => {
                    return Err(DescError::Shape(format!(
                        "angle unit {other:?} not supported (rad, deg)"
                    )))
                }
            };
            let n = (ax * ax + ay * ay + az * az).sqrt();
            if n == 0.0 {
                if angle == 0.0 {
                    return Ok([1.0, 0.0, 0.0, 0.0]);
                }
                return Err(DescError::Shape("axis-angle with a zero axis".into()));
            }
            let (s, c) = (angle / 2.0).sin_cos();
            Ok([c, s * ax / n, s * ay / n, s * az / n])
        }
    }
}

/// Flattens a testbed into its globally indexed channels: chains in file
/// order, chain instances ascending, selector indices ascending.
///
/// Locations are converted to meters when `loc_unit` is a length unit.
pub fn expand_channels(testbed: &TestbedDesc, loader: &dyn LocationLoader) -> Result<ChannelMap, DescError> {
    let mut map = ChannelMap::default();
    for chain in &testbed.data_chains {
        let range = ChannelSelector::parse_range(&chain.data_source_channel)?;
        let per_instance = range.len();
        let instances = usize::try_from(chain.num_data_source_chains)
            .map_err(|_| DescError::Range("num_data_source_chains too large".into()))?;
        let expected = instances * per_instance;

        let locations = match &chain.channel_locations {
            Some(loc) => {
                let rows = loader.load_locations(loc)?;
                if rows.len() != expected {
                    return Err(DescError::Shape(format!(
                        "chain {:?}: {} location rows for {expected} channels",
                        chain.label,
                        rows.len()
                    )));
                }
                let factor = match length_to_meters(&loc.loc_unit) {
                    Some(f) => f,
                    None => {
                        map.warnings.push(ReportItem::warning(
                            "uninterpreted_unit",
                            chain.source.field("channel_locations").key("loc_unit"),
                            format!("location unit {:?} kept verbatim", loc.loc_unit),
                        ));
                        1.0
                    }
                };
                Some(rows.into_iter().map(|r| r.map(|x| x * factor)).collect::<Vec<_>>())
            }
            None => {
                map.warnings.push(ReportItem::warning(
                    "missing_locations",
                    chain.source.field("channel_locations"),
                    format!("chain {:?} has no channel locations", chain.label),
                ));
                None
            }
        };
        let orientations = match &chain.channel_orientations {
            Some(o) => {
                let rows = loader.load_orientations(o)?;
                if rows.len() != expected {
                    return Err(DescError::Shape(format!(
                        "chain {:?}: {} orientation rows for {expected} channels",
                        chain.label,
                        rows.len()
                    )));
                }
                Some(
                    rows.into_iter()
                        .map(|r| orientation_quaternion(r, o.format, &o.angle_unit))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            None => None,
        };

        let hardware_chain: Vec<String> = chain.hardware_components.iter().map(|r| r.id.clone()).collect();
        for instance in 0..instances {
            for (j, source_channel) in range.clone().enumerate() {
                let local = instance * per_instance + j;
                map.channels.push(ChannelRecord {
                    global_index: map.channels.len(),
                    chain_label: chain.label.clone(),
                    chain_instance: instance,
                    source_channel,
                    location: locations.as_ref().map(|l| l[local]),
                    orientation: orientations.as_ref().map(|o| o[local]),
                    hardware_chain: hardware_chain.clone(),
                });
            }
        }
    }
    Ok(map)
}
