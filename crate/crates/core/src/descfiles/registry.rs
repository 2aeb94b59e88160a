use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::parse::parse_documents;
use super::report::ReportItem;
use super::types::*;
use super::{DescError, DescriptionDoc, DocBody, DocKind};

/// A set of loaded description documents, addressable by kind and id.
///
/// Immutable once built; share it behind an `Arc` across threads.
#[derive(Debug, Clone)]
pub struct Registry {
    docs: BTreeMap<(DocKind, String), Arc<DescriptionDoc>>,
    load_issues: Vec<ReportItem>,
    base_dir: Option<PathBuf>,
    file_access: bool,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new()
    }
}

impl Registry {
    pub fn new() -> Self {
        Registry {
            docs: BTreeMap::new(),
            load_issues: Vec::new(),
            base_dir: None,
            file_access: true,
        }
    }

    /// A registry whose validation never touches the filesystem; checks that
    /// need external files are reported as skipped. Used for metadata
    /// embedded in dataset files.
    pub fn detached() -> Self {
        Registry {
            file_access: false,
            ..Registry::new()
        }
    }

    /// Loads every `*.yaml` / `*.yml` file of `dir` (not recursive).
    ///
    /// Unreadable directories are errors; problems inside individual files
    /// are collected as load issues.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, DescError> {
        let dir = dir.as_ref();
        let mut reg = Registry::new();
        reg.base_dir = Some(dir.to_path_buf());
        reg.add_dir(dir)?;
        Ok(reg)
    }

    pub fn add_dir(&mut self, dir: &Path) -> Result<(), DescError> {
        let io = |source| DescError::Io {
            path: dir.to_path_buf(),
            source,
        };
        let mut files = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            let is_yaml = matches!(
                path.extension().and_then(|e| e.to_str()),
                Some("yaml") | Some("yml")
            );
            if is_yaml && path.is_file() {
                files.push(path);
            }
        }
        files.sort();
        for f in files {
            self.add_file(&f)?;
        }
        Ok(())
    }

    /// Parses and adds one file. I/O failures are errors; parse failures
    /// become load issues attributed to the file.
    pub fn add_file(&mut self, path: &Path) -> Result<Vec<(DocKind, String)>, DescError> {
        let text = std::fs::read_to_string(path).map_err(|source| DescError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let hint = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(DocKind::from_file_name);
        match parse_documents(&text, hint) {
            Ok(docs) => {
                let mut added = Vec::new();
                for mut doc in docs {
                    doc.origin.file = Some(path.to_path_buf());
                    added.push((doc.kind(), doc.id().to_string()));
                    self.insert(doc);
                }
                Ok(added)
            }
            Err(e) => {
                self.load_issues
                    .push(parse_error_item(&e).with_source(path.display().to_string()));
                Ok(Vec::new())
            }
        }
    }

    /// Parses `text` (one or more documents) under the report label `label`.
    pub fn add_text(&mut self, text: &str, label: &str, hint: Option<DocKind>) -> Vec<(DocKind, String)> {
        match parse_documents(text, hint) {
            Ok(docs) => {
                let mut added = Vec::new();
                for mut doc in docs {
                    doc.origin.label = Some(label.to_string());
                    added.push((doc.kind(), doc.id().to_string()));
                    self.insert(doc);
                }
                added
            }
            Err(e) => {
                self.load_issues.push(parse_error_item(&e).with_source(label));
                Vec::new()
            }
        }
    }

    /// Adds a document; a clash with an existing id of the same kind is
    /// recorded as a `duplicate_id` load issue and the first one is kept.
    pub fn insert(&mut self, doc: DescriptionDoc) {
        let key = (doc.kind(), doc.id().to_string());
        if let Some(existing) = self.docs.get(&key) {
            self.load_issues.push(
                ReportItem::error(
                    "duplicate_id",
                    doc.origin.prefix.clone(),
                    format!(
                        "{} id {:?} already defined in {}",
                        key.0,
                        key.1,
                        existing.source_label()
                    ),
                )
                .with_source(doc.source_label()),
            );
            return;
        }
        self.docs.insert(key, Arc::new(doc));
    }

    pub fn get(&self, kind: DocKind, id: &str) -> Option<&DescriptionDoc> {
        self.docs.get(&(kind, id.to_string())).map(|d| d.as_ref())
    }

    pub fn testbed(&self, id: &str) -> Option<&TestbedDesc> {
        match self.get(DocKind::Testbed, id).map(|d| &d.body) {
            Some(DocBody::Testbed(t)) => Some(t),
            _ => None,
        }
    }

    pub fn data_source(&self, id: &str) -> Option<&DataSourceDesc> {
        match self.get(DocKind::DataSource, id).map(|d| &d.body) {
            Some(DocBody::DataSource(t)) => Some(t),
            _ => None,
        }
    }

    pub fn hardware_component(&self, id: &str) -> Option<&HardwareComponentDesc> {
        match self.get(DocKind::HardwareComponent, id).map(|d| &d.body) {
            Some(DocBody::HardwareComponent(t)) => Some(t),
            _ => None,
        }
    }

    pub fn environment(&self, id: &str) -> Option<&EnvironmentDesc> {
        match self.get(DocKind::Environment, id).map(|d| &d.body) {
            Some(DocBody::Environment(t)) => Some(t),
            _ => None,
        }
    }

    pub fn experiment(&self, id: &str) -> Option<&ExperimentDesc> {
        match self.get(DocKind::Experiment, id).map(|d| &d.body) {
            Some(DocBody::Experiment(t)) => Some(t),
            _ => None,
        }
    }

    pub fn docs(&self) -> impl Iterator<Item = &DescriptionDoc> {
        self.docs.values().map(|d| d.as_ref())
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn load_issues(&self) -> &[ReportItem] {
        &self.load_issues
    }

    pub fn file_access(&self) -> bool {
        self.file_access
    }

    /// Directory that relative file references of `doc` resolve against: the
    /// directory of its file, else the registry directory, else the CWD.
    pub fn base_dir_for(&self, doc: Option<&DescriptionDoc>) -> PathBuf {
        doc.and_then(|d| d.origin.file.as_ref())
            .and_then(|f| f.parent().map(Path::to_path_buf))
            .or_else(|| self.base_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Converts a parse failure into a report item.
pub(crate) fn parse_error_item(e: &DescError) -> ReportItem {
    let code = match e {
        DescError::Syntax { .. } => "syntax_error",
        DescError::KindMismatch { .. } => "kind_mismatch",
        DescError::Type { .. } => "type_error",
        _ => "parse_error",
    };
    let path = match e {
        DescError::Syntax { line, column, .. } => format!("@{line}:{column}"),
        other => other.path().unwrap_or_default().to_string(),
    };
    ReportItem::error(code, path, e.to_string())
}
