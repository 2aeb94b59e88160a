use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One finding of a validation pass.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ReportItem {
    pub severity: Severity,
    /// Stable machine-readable code, e.g. `unresolved_ref`.
    pub code: String,
    /// File or document the item belongs to.
    pub source: String,
    /// Document pointer inside `source`.
    pub path: String,
    pub message: String,
}

impl ReportItem {
    pub fn error(code: &str, path: impl ToString, message: impl Into<String>) -> Self {
        ReportItem {
            severity: Severity::Error,
            code: code.to_string(),
            source: String::new(),
            path: path.to_string(),
            message: message.into(),
        }
    }

    pub fn warning(code: &str, path: impl ToString, message: impl Into<String>) -> Self {
        ReportItem {
            severity: Severity::Warning,
            ..ReportItem::error(code, path, message)
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub items: Vec<ReportItem>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, item: ReportItem) {
        self.items.push(item);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.items.extend(other.items);
    }

    /// A document is valid iff no item has severity error.
    pub fn is_valid(&self) -> bool {
        self.error_count() == 0
    }

    pub fn error_count(&self) -> usize {
        self.items.iter().filter(|i| i.severity == Severity::Error).count()
    }

    pub fn warning_count(&self) -> usize {
        self.items.iter().filter(|i| i.severity == Severity::Warning).count()
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.items.iter().any(|i| i.code == code)
    }

    /// Sorts by source, path, code, then message and drops exact duplicates.
    pub fn canonicalize(&mut self) {
        self.items.sort_by(|a, b| {
            (&a.source, &a.path, &a.code, a.severity, &a.message)
                .cmp(&(&b.source, &b.path, &b.code, b.severity, &b.message))
        });
        self.items.dedup();
    }

    pub fn to_json(&self) -> String {
        let mut sorted = self.clone();
        sorted.canonicalize();
        #[derive(Serialize)]
        struct Out<'a> {
            valid: bool,
            errors: usize,
            warnings: usize,
            items: &'a [ReportItem],
        }
        serde_json::to_string_pretty(&Out {
            valid: sorted.is_valid(),
            errors: sorted.error_count(),
            warnings: sorted.warning_count(),
            items: &sorted.items,
        })
        .expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut sorted = self.clone();
        sorted.canonicalize();
        let mut out = String::new();
        for item in &sorted.items {
            let sev = match item.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            out.push_str(&format!(
                "{sev}[{}] {}:{}: {}\n",
                item.code, item.source, item.path, item.message
            ));
        }
        out.push_str(&format!(
            "{} errors, {} warnings\n",
            sorted.error_count(),
            sorted.warning_count()
        ));
        out
    }
}
