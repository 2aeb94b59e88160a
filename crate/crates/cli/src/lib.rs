//! The `dss` command-line tool.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | validation errors present (description files, embedded metadata, dataset contents) |
//! | 2 | usage error (bad flags, selectors, indices, ranges, operations that do not fit the data) |
//! | 3 | I/O, format or version error |
//!
//! [`exit_code`] maps every [`ErrorClass`] onto this table.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dss_core::analysis::{self, RenderFormat, RenderOptions};
use dss_core::descfiles::{
    self, expand_channels, validate, DocKind, FsLocationLoader, Registry, ReportItem, ValidationReport,
};
use dss_core::model::{slice, AttrValue, DssDataset, Payload, SliceSelector};
use dss_core::storage::{self, Format, Signature};
use dss_core::synth::{self, Geometry, PathComponent, PathModel};
use dss_core::{Error, ErrorClass};
use num_complex::Complex64;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Exit code for a failure of class `class`.
pub fn exit_code(class: ErrorClass) -> u8 {
    use ErrorClass::*;
    match class {
        Syntax | KindMismatch | Type | UnresolvedRef | Mapping | Shape | ProfileViolation | Norm => EXIT_VALIDATION,
        Grammar | Range | Axis | Index | UnknownType | DuplicateType | ReservedName | Domain | NonUniformGrid
        | Selection | Profile | Window => EXIT_USAGE,
        Io | Format | Version | UnsupportedFeature => EXIT_IO,
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Bad combination of flags or values.
    Usage(String),
}

impl CliError {
    pub fn class_name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.class().name(),
            CliError::Usage(_) => "UsageError",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => exit_code(e.class()),
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Core(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Core(Error::Storage(storage::StorageError::Io {
        path: path.to_path_buf(),
        source,
    }))
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dss", version, about = "Validate, inspect, convert, slice, plot and synthesise DSS data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate description files, directories of them, or metadata embedded in dataset files.
    Validate(ValidateArgs),
    /// Summarise a dataset file.
    Info(InfoArgs),
    /// Re-encode a dataset file as HDF5 or NetCDF-4.
    Convert(ConvertArgs),
    /// Write a selection of a dataset to a new file.
    Slice(SliceArgs),
    /// Render channel responses, transfer functions or room impulse responses.
    Plot(PlotArgs),
    /// Generate a synthetic dataset from node geometry.
    Synth(SynthArgs),
    /// Convert a location table (.npy, text or dataset file) to CSV or a dataset file.
    Locations(LocationsArgs),
    /// List the expanded channels of a testbed.
    Channels(ChannelsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Hdf5,
    Netcdf4,
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Format {
        match f {
            FileFormat::Hdf5 => Format::Hdf5,
            FileFormat::Netcdf4 => Format::Netcdf4,
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Files or directories (non-recursive) to validate.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Directory of description files that references resolve against.
    #[arg(long, env = "DSS_REGISTRY")]
    pub registry: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub src: PathBuf,
    pub dst: PathBuf,
    /// Target format; inferred from the destination extension when omitted.
    #[arg(long, value_enum)]
    pub to: Option<FileFormat>,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    pub src: PathBuf,
    pub dst: PathBuf,
    /// Selection such as `tx=0,rx=0:4,t=0` or `(tx=0, rx=[0,1,2,3], t=0)`.
    #[arg(long)]
    pub select: Option<String>,
    /// Output format; defaults to the source format.
    #[arg(long, value_enum)]
    pub to: Option<FileFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotOp {
    Cr,
    Tf,
    Rir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotFormat {
    Svg,
    Csv,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub src: PathBuf,
    #[arg(long, value_enum)]
    pub op: PlotOp,
    #[arg(long)]
    pub select: Option<String>,
    /// Output file; `.svg` or `.csv` unless `--format` is given. For `tf`
    /// this receives the magnitude.
    #[arg(long)]
    pub out: PathBuf,
    /// Phase output of `tf`; defaults to `<out stem>_phase.<ext>`.
    #[arg(long)]
    pub phase_out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<PlotFormat>,
    /// Unwrap phase curves before rendering.
    #[arg(long)]
    pub unwrap_phase: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    #[value(alias = "channel_sounding", alias = "channel-sounding")]
    Cs,
    Acoustic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig4,
    Acoustic,
    Custom,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long, value_enum, default_value = "custom")]
    pub preset: Preset,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub to: Option<FileFormat>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Transmitter (speaker) position `x,y,z` in meters; repeatable.
    #[arg(long, value_parser = parse_point)]
    pub tx: Vec<[f64; 3]>,
    /// Receiver (microphone) position `x,y,z` in meters; repeatable.
    #[arg(long, value_parser = parse_point)]
    pub rx: Vec<[f64; 3]>,
    /// Sampling rate in Hz (the bandwidth for channel sounding).
    #[arg(long)]
    pub fs: Option<f64>,
    /// Center frequency in Hz.
    #[arg(long)]
    pub fc: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Extra path `delay,re[,im]` (seconds, complex gain) on every link; repeatable.
    #[arg(long = "path", value_parser = parse_path)]
    pub paths: Vec<PathComponent>,
    /// Drop the line-of-sight path.
    #[arg(long)]
    pub no_los: bool,
    /// Dataset attribute `name=value`; repeatable.
    #[arg(long = "attr")]
    pub attrs: Vec<String>,
    /// Description file to embed in the dataset; repeatable.
    #[arg(long)]
    pub embed: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocationsArgs {
    pub src: PathBuf,
    /// `.csv` (text) or any other name (dataset file with the array at `/locations`).
    pub dst: PathBuf,
    /// Array path inside a dataset-file source.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Columns per row: 3 for locations, 4 for quaternions.
    #[arg(long, default_value_t = 3)]
    pub cols: usize,
}

#[derive(Debug, Args)]
pub struct ChannelsArgs {
    pub testbed: String,
    #[arg(long, env = "DSS_REGISTRY")]
    pub registry: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

fn parse_numbers(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_point(s: &str) -> std::result::Result<[f64; 3], String> {
    match parse_numbers(s)?.as_slice() {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err("expected x,y,z".into()),
    }
}

fn parse_path(s: &str) -> std::result::Result<PathComponent, String> {
    match parse_numbers(s)?.as_slice() {
        [d, re] => Ok(PathComponent::new(*d, *re)),
        [d, re, im] => Ok(PathComponent::new(*d, Complex64::new(*re, *im))),
        _ => Err("expected delay,re[,im]".into()),
    }
}

/// Runs `cli`, writing reports and summaries to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Info(a) => cmd_info(&a, out),
        Command::Convert(a) => cmd_convert(&a),
        Command::Slice(a) => cmd_slice(&a),
        Command::Plot(a) => cmd_plot(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Locations(a) => cmd_locations(&a),
        Command::Channels(a) => cmd_channels(&a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| io_error(Path::new("<stdout>"), e))
}

fn yaml_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| io_error(dir, e))? {
        let p = entry.map_err(|e| io_error(dir, e))?.path();
        if p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("yaml" | "yml")) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn canonical(p: &Path) -> PathBuf {
    p.canonicalize().unwrap_or_else(|_| p.to_path_buf())
}

fn load_registry(dir: Option<&Path>) -> Result<Registry> {
    match dir {
        Some(d) => {
            if !d.is_dir() {
                return Err(io_error(d, std::io::Error::new(std::io::ErrorKind::NotFound, "registry directory not found")));
            }
            Ok(Registry::load_dir(d)?)
        }
        None => Ok(Registry::new()),
    }
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<u8> {
    let mut registry = load_registry(a.registry.as_deref())?;
    let preloaded: BTreeSet<PathBuf> = match &a.registry {
        Some(d) => yaml_files(d)?.iter().map(|p| canonical(p)).collect(),
        None => BTreeSet::new(),
    };

    let mut targets = BTreeSet::new();
    let mut datasets = Vec::new();
    for p in &a.paths {
        let meta = std::fs::metadata(p).map_err(|e| io_error(p, e))?;
        let files = if meta.is_dir() { yaml_files(p)? } else { vec![p.clone()] };
        for f in files {
            if storage::sniff(&f)? == Signature::Hdf5 {
                datasets.push(f);
                continue;
            }
            let c = canonical(&f);
            if !preloaded.contains(&c) && !targets.contains(&c) {
                registry.add_file(&f)?;
            }
            targets.insert(c);
        }
    }

    let mut report = ValidationReport::new();
    for item in registry.load_issues() {
        if targets.contains(&canonical(Path::new(&item.source))) {
            report.push(item.clone());
        }
    }
    for doc in registry.docs() {
        if doc.origin.file.as_deref().is_some_and(|f| targets.contains(&canonical(f))) {
            report.extend(validate(doc, &registry));
        }
    }
    for p in &datasets {
        let file = storage::open(p)?;
        let embedded = if a.registry.is_some() {
            embedded_against(&file.dataset, &registry)
        } else {
            file.metadata_report
        };
        for item in embedded.items {
            let source = format!("{}#{}", p.display(), item.source);
            report.push(item.with_source(source));
        }
    }
    report.canonicalize();
    match a.format {
        OutputFormat::Text => emit(out, &report.to_text())?,
        OutputFormat::Json => emit(out, &(report.to_json() + "\n"))?,
    }
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_VALIDATION })
}

/// Validates the documents embedded in `ds`, resolving references against
/// `registry` as well. Only findings about the embedded documents are kept.
fn embedded_against(ds: &DssDataset, registry: &Registry) -> ValidationReport {
    let mut reg = Registry::detached();
    let mut labels = BTreeSet::new();
    for ((kind, id), text) in &ds.metadata_bundle {
        let label = format!("/metadata/{kind}/{id}");
        reg.add_text(text, &label, Some(*kind));
        labels.insert(label);
    }
    for doc in registry.docs() {
        if reg.get(doc.kind(), doc.id()).is_none() {
            reg.insert(doc.clone());
        }
    }
    let mut report = ValidationReport::new();
    for item in reg.load_issues() {
        if labels.contains(&item.source) {
            report.push(item.clone());
        }
    }
    for doc in reg.docs() {
        if doc.origin.label.as_ref().is_some_and(|l| labels.contains(l)) {
            for item in validate(doc, &reg).items {
                let source = if item.source.is_empty() { doc.source_label() } else { item.source.clone() };
                report.push(item.with_source(source));
            }
        }
    }
    report
}

fn attr_json(v: &AttrValue) -> serde_json::Value {
    match v {
        AttrValue::Number(x) if x.is_finite() => serde_json::json!(x),
        AttrValue::Number(x) => serde_json::json!(x.to_string()),
        AttrValue::Text(t) => serde_json::json!(t),
    }
}

fn cmd_info(a: &InfoArgs, out: &mut dyn Write) -> Result<u8> {
    let file = storage::open(&a.path)?;
    let ds = &file.dataset;
    let report = &file.metadata_report;
    let axes_line = ds
        .axes
        .iter()
        .map(|x| format!("{}:{}", x.name, x.length))
        .collect::<Vec<_>>()
        .join(" ");
    let metadata: Vec<String> = ds.metadata_bundle.keys().map(|(k, id)| format!("{k}/{id}")).collect();
    let hardware: Vec<String> = ds
        .hardware_attributes
        .iter()
        .flat_map(|(c, attrs)| attrs.keys().map(move |n| format!("{c}/{n}")))
        .collect();
    match a.format {
        OutputFormat::Json => {
            let axes: Vec<serde_json::Value> = ds
                .axes
                .iter()
                .map(|x| {
                    let coord = x.coordinate.as_ref().map(|c| {
                        serde_json::json!({
                            "unit": c.unit,
                            "semantics": c.semantics.as_str(),
                            "first": c.values.first().map(|v| v.to_string()),
                            "last": c.values.last().map(|v| v.to_string()),
                        })
                    });
                    serde_json::json!({"name": x.name, "kind": x.kind.as_str(), "length": x.length, "coordinate": coord})
                })
                .collect();
            let attrs: serde_json::Map<String, serde_json::Value> =
                ds.attrs.iter().map(|(k, v)| (k.clone(), attr_json(v))).collect();
            let series: Vec<serde_json::Value> = ds
                .series()
                .iter()
                .map(|s| serde_json::json!({"run": s.run, "metric": s.metric, "unit": s.unit, "points": s.points.len()}))
                .collect();
            let v = serde_json::json!({
                "path": a.path.display().to_string(),
                "format": file.format.as_str(),
                "dataset_type": ds.dataset_type,
                "domain": ds.domain.as_str(),
                "shape": ds.shape(),
                "axes": axes,
                "attrs": attrs,
                "metadata": metadata,
                "metadata_valid": report.is_valid(),
                "metadata_errors": report.error_count(),
                "metadata_warnings": report.warning_count(),
                "channel_coords": ds.channel_coords.keys().collect::<Vec<_>>(),
                "hardware_attributes": hardware,
                "series": series,
            });
            emit(out, &(serde_json::to_string_pretty(&v).expect("json value") + "\n"))?;
        }
        OutputFormat::Text => {
            let mut s = String::new();
            s.push_str(&format!("path: {}\n", a.path.display()));
            s.push_str(&format!("format: {}\n", file.format));
            s.push_str(&format!("dataset_type: {}\n", ds.dataset_type));
            s.push_str(&format!("domain: {}\n", ds.domain));
            s.push_str(&format!("axes: {axes_line}\n"));
            for x in &ds.axes {
                if let Some(c) = &x.coordinate {
                    let (first, last) = (c.values.first(), c.values.last());
                    s.push_str(&format!(
                        "  {}: {} [{}] {} .. {}\n",
                        x.name,
                        c.semantics,
                        c.unit,
                        first.map(f64::to_string).unwrap_or_default(),
                        last.map(f64::to_string).unwrap_or_default()
                    ));
                }
            }
            if let Payload::Series(series) = &ds.payload {
                s.push_str(&format!("series: {}\n", series.len()));
                for x in series {
                    s.push_str(&format!("  run {} {} [{}]: {} points\n", x.run, x.metric, x.unit, x.points.len()));
                }
            }
            s.push_str("attrs:\n");
            for (k, v) in &ds.attrs {
                s.push_str(&format!("  {k} = {v}\n"));
            }
            if !ds.channel_coords.is_empty() {
                let names: Vec<&str> = ds.channel_coords.keys().map(String::as_str).collect();
                s.push_str(&format!("channel coordinates: {}\n", names.join(" ")));
            }
            if !hardware.is_empty() {
                s.push_str(&format!("hardware attributes: {}\n", hardware.join(" ")));
            }
            s.push_str(&format!(
                "metadata: {}\n",
                if metadata.is_empty() { "none".to_string() } else { metadata.join(" ") }
            ));
            s.push_str(&format!(
                "metadata validation: {} errors, {} warnings\n",
                report.error_count(),
                report.warning_count()
            ));
            for item in report.items.iter().filter(|i| i.severity == descfiles::Severity::Error) {
                s.push_str(&format!("  error[{}] {}:{}: {}\n", item.code, item.source, item.path, item.message));
            }
            emit(out, &s)?;
        }
    }
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_VALIDATION })
}

fn format_for(dst: &Path, flag: Option<FileFormat>, fallback: Option<Format>) -> Result<Format> {
    if let Some(f) = flag {
        return Ok(f.into());
    }
    let name = dst.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_ascii_lowercase();
    if name.ends_with(".nc") || name.ends_with(".nc4") {
        Ok(Format::Netcdf4)
    } else if name.ends_with(".h5") || name.ends_with(".hdf5") {
        Ok(Format::Hdf5)
    } else {
        fallback.ok_or_else(|| usage(format!("cannot infer a format from {}; pass --to", dst.display())))
    }
}

/// Refuses to write over the source file.
fn distinct(src: &Path, dst: &Path) -> Result<()> {
    if dst.exists() && canonical(src) == canonical(dst) {
        return Err(usage("destination is the source file; sources are never modified"));
    }
    Ok(())
}

fn cmd_convert(a: &ConvertArgs) -> Result<u8> {
    let file = storage::open(&a.src)?;
    let format = format_for(&a.dst, a.to, None)?;
    distinct(&a.src, &a.dst)?;
    storage::save(&file.dataset, &a.dst, format)?;
    Ok(EXIT_OK)
}

fn selector(text: Option<&str>) -> Result<SliceSelector> {
    Ok(match text {
        Some(t) => SliceSelector::parse(t)?,
        None => SliceSelector::all(),
    })
}

fn cmd_slice(a: &SliceArgs) -> Result<u8> {
    let sel = selector(a.select.as_deref())?;
    let file = storage::open(&a.src)?;
    let format = format_for(&a.dst, a.to, Some(file.format))?;
    let sliced = slice(&file.dataset, &sel)?;
    distinct(&a.src, &a.dst)?;
    storage::save(&sliced, &a.dst, format)?;
    Ok(EXIT_OK)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".dss-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

fn phase_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let name = match out.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_phase.{ext}"),
        None => format!("{stem}_phase"),
    };
    out.with_file_name(name)
}

fn cmd_plot(a: &PlotArgs) -> Result<u8> {
    let format = match a.format {
        Some(PlotFormat::Svg) => RenderFormat::Svg,
        Some(PlotFormat::Csv) => RenderFormat::Csv,
        None => RenderFormat::from_path(&a.out)
            .ok_or_else(|| usage(format!("cannot infer svg/csv from {}; pass --format", a.out.display())))?,
    };
    if a.phase_out.is_some() && a.op != PlotOp::Tf {
        return Err(usage("--phase-out only applies to --op tf"));
    }
    let sel = selector(a.select.as_deref())?;
    let file = storage::open(&a.src)?;
    let opts = RenderOptions {
        unwrap_phase: a.unwrap_phase,
    };
    let mut outputs = Vec::new();
    match a.op {
        PlotOp::Cr => outputs.push((a.out.clone(), analysis::plot_cr(&file.dataset, &sel)?)),
        PlotOp::Rir => outputs.push((a.out.clone(), analysis::plot_rir(&file.dataset, &sel)?)),
        PlotOp::Tf => {
            let (mag, phase) = analysis::plot_tf(&file.dataset, &sel)?;
            let p = a.phase_out.clone().unwrap_or_else(|| phase_path(&a.out));
            outputs.push((a.out.clone(), mag));
            outputs.push((p, phase));
        }
    }
    let rendered = outputs
        .iter()
        .map(|(path, plot)| Ok((path, analysis::render_with(plot, format, &opts)?)))
        .collect::<Result<Vec<_>>>()?;
    for (path, bytes) in rendered {
        write_atomic(path, &bytes)?;
    }
    Ok(EXIT_OK)
}

fn attr_value(raw: &str) -> AttrValue {
    match raw.parse::<f64>() {
        Ok(x) => AttrValue::Number(x),
        Err(_) => AttrValue::Text(raw.to_string()),
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<u8> {
    let custom_geometry = !a.tx.is_empty() || !a.rx.is_empty() || a.fs.is_some() || a.fc.is_some() || a.samples.is_some();
    let profile = match (a.preset, a.profile) {
        (Preset::Fig4, Some(Profile::Acoustic)) => return Err(usage("preset fig4 is a channel-sounding preset")),
        (Preset::Acoustic, Some(Profile::Cs)) => return Err(usage("preset acoustic is an acoustic preset")),
        (Preset::Fig4, _) => Profile::Cs,
        (Preset::Acoustic, _) => Profile::Acoustic,
        (Preset::Custom, p) => p.unwrap_or(Profile::Cs),
    };
    if a.preset != Preset::Custom && custom_geometry {
        return Err(usage("geometry flags (--tx, --rx, --fs, --fc, --samples) conflict with a preset"));
    }
    if profile == Profile::Acoustic && a.fc.is_some() {
        return Err(usage("--fc does not apply to acoustic datasets"));
    }

    let mut model = if a.no_los { PathModel::explicit(Vec::new()) } else { PathModel::los() };
    for p in &a.paths {
        model = model.with_path(p.delay, p.gain);
    }
    if a.noise != 0.0 {
        model = model.with_noise(a.noise, a.seed);
    }

    let mut ds = match a.preset {
        Preset::Fig4 => synth::fig4_preset(&model)?,
        Preset::Acoustic => synth::acoustic_preset(&model)?,
        Preset::Custom => {
            if a.tx.is_empty() || a.rx.is_empty() {
                return Err(usage("a custom dataset needs at least one --tx and one --rx"));
            }
            let fs = a.fs.ok_or_else(|| usage("a custom dataset needs --fs"))?;
            let n = a.samples.ok_or_else(|| usage("a custom dataset needs --samples"))?;
            let g = Geometry {
                tx: a.tx.clone(),
                rx: a.rx.clone(),
            };
            match profile {
                Profile::Cs => {
                    let fc = a.fc.ok_or_else(|| usage("a custom channel-sounding dataset needs --fc"))?;
                    synth::gen_channel_sounding(&g, fs, fc, n, &model)?
                }
                Profile::Acoustic => synth::gen_acoustic(&g, fs, n, &model)?,
            }
        }
    };
    if a.noise != 0.0 {
        ds = ds.with_attr("seed", a.seed as f64);
    }
    for raw in &a.attrs {
        let (name, value) = raw
            .split_once('=')
            .ok_or_else(|| usage(format!("--attr expects name=value, got {raw:?}")))?;
        ds = ds.with_attr(name, attr_value(value));
    }
    for p in &a.embed {
        let text = std::fs::read_to_string(p).map_err(|e| io_error(p, e))?;
        let hint = p.file_name().and_then(|n| n.to_str()).and_then(DocKind::from_file_name);
        let docs = descfiles::parse_documents(&text, hint)?;
        let [doc] = docs.as_slice() else {
            return Err(usage(format!("{}: embedded files must hold exactly one document", p.display())));
        };
        ds = ds.with_metadata(doc.kind(), doc.id(), &text);
    }
    let format = format_for(&a.out, a.to, Some(Format::Hdf5))?;
    storage::save(&ds, &a.out, format)?;
    Ok(EXIT_OK)
}

fn cmd_locations(a: &LocationsArgs) -> Result<u8> {
    if !(3..=4).contains(&a.cols) {
        return Err(usage("--cols must be 3 (locations) or 4 (quaternions)"));
    }
    let loader = FsLocationLoader::new(".");
    let src = a.src.to_str().ok_or_else(|| usage("source path is not valid UTF-8"))?;
    let rows = loader.load_table(src, a.dataset.as_deref(), a.cols)?;
    distinct(&a.src, &a.dst)?;
    let is_csv = a.dst.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let mut s = String::from(if a.cols == 3 { "x,y,z\n" } else { "w,x,y,z\n" });
        for r in &rows {
            let cells: Vec<String> = r.iter().map(f64::to_string).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        write_atomic(&a.dst, s.as_bytes())?;
    } else {
        let dir = match a.dst.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let tmp = tempfile::Builder::new()
            .prefix(".dss-")
            .suffix(".tmp")
            .tempfile_in(dir)
            .map_err(|e| io_error(&a.dst, e))?;
        let values: Vec<f64> = rows.iter().flatten().copied().collect();
        storage::write_f64_array(tmp.path(), "/locations", &values, &[rows.len(), a.cols])?;
        tmp.persist(&a.dst).map_err(|e| io_error(&a.dst, e.error))?;
    }
    Ok(EXIT_OK)
}

fn cmd_channels(a: &ChannelsArgs, out: &mut dyn Write) -> Result<u8> {
    let dir = a
        .registry
        .as_deref()
        .ok_or_else(|| usage("channels needs --registry (or DSS_REGISTRY)"))?;
    let registry = load_registry(Some(dir))?;
    let doc = registry
        .get(DocKind::Testbed, &a.testbed)
        .ok_or_else(|| descfiles::DescError::UnresolvedRef {
            kind: DocKind::Testbed,
            id: a.testbed.clone(),
            path: String::new(),
        })?;
    let descfiles::DocBody::Testbed(tb) = &doc.body else {
        unreachable!("registry keys match document kinds")
    };
    let map = expand_channels(tb, &FsLocationLoader::new(registry.base_dir_for(Some(doc))))?;
    match a.format {
        OutputFormat::Json => {
            let channels: Vec<serde_json::Value> = map
                .channels
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "index": c.global_index,
                        "label": c.chain_label,
                        "instance": c.chain_instance,
                        "source_channel": c.source_channel,
                        "location": c.location,
                        "orientation": c.orientation,
                        "hardware_chain": c.hardware_chain,
                    })
                })
                .collect();
            let warnings: Vec<&ReportItem> = map.warnings.iter().collect();
            let v = serde_json::json!({"testbed": a.testbed, "count": map.len(), "channels": channels, "warnings": warnings});
            emit(out, &(serde_json::to_string_pretty(&v).expect("json value") + "\n"))?;
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for c in &map.channels {
                let loc = c
                    .location
                    .map(|l| format!("{},{},{}", l[0], l[1], l[2]))
                    .unwrap_or_else(|| "-".into());
                s.push_str(&format!(
                    "{} {} {} {} {} {}\n",
                    c.global_index,
                    c.chain_label,
                    c.chain_instance,
                    c.source_channel,
                    loc,
                    c.hardware_chain.join(">")
                ));
            }
            let mut labels: Vec<&str> = map.channels.iter().map(|c| c.chain_label.as_str()).collect();
            labels.dedup();
            for l in labels {
                s.push_str(&format!("{l}: {} channels\n", map.by_label(l).count()));
            }
            s.push_str(&format!("total: {} channels\n", map.len()));
            emit(out, &s)?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_class_has_a_code() {
        for c in ErrorClass::ALL {
            assert!((1..=3).contains(&exit_code(c)), "{c}");
        }
        assert_eq!(exit_code(ErrorClass::Index), EXIT_USAGE);
        assert_eq!(exit_code(ErrorClass::Format), EXIT_IO);
    }

    #[test]
    fn phase_file_name() {
        assert_eq!(phase_path(Path::new("out/tf.svg")), Path::new("out/tf_phase.svg"));
    }
}
