use std::fmt;

use ndarray::Axis;

use super::axis::AxisDef;
use super::dataset::{DssDataset, Payload};
use super::ModelError;

/// Selection along one axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxisSel {
    Index(usize),
    List(Vec<usize>),
    All,
}

impl AxisSel {
    /// Source indices selected from an axis of length `len`.
    pub fn indices(&self, axis: &str, len: usize) -> Result<Vec<usize>, ModelError> {
        let idx = match self {
            AxisSel::Index(i) => vec![*i],
            AxisSel::List(l) => l.clone(),
            AxisSel::All => (0..len).collect(),
        };
        if idx.is_empty() {
            return Err(ModelError::Index(format!("empty selection on axis {axis:?}")));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= len) {
            return Err(ModelError::Index(format!(
                "index {bad} out of range for axis {axis:?} of length {len}"
            )));
        }
        Ok(idx)
    }
}

/// Per-axis selection, e.g. `tx=0, rx=[0,1,2,3], t=0`. Axes not named are
/// selected whole.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SliceSelector {
    pub entries: Vec<(String, AxisSel)>,
}

/// Short names accepted for axes when no axis has the short name itself.
pub const AXIS_ALIASES: [(&str, &str); 4] = [("t", "time"), ("sp", "speaker"), ("mic", "microphone"), ("ch", "channel")];

impl SliceSelector {
    pub fn all() -> Self {
        SliceSelector::default()
    }

    pub fn with(mut self, axis: &str, sel: AxisSel) -> Self {
        self.entries.push((axis.to_string(), sel));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `axis=k`, `axis=a:b` (half-open) and `axis=[i,j,k]` items
    /// separated by commas; surrounding parentheses and spaces are ignored.
    /// Inside brackets the list is comma separated.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let t = text.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(t)
            .trim();
        let mut sel = SliceSelector::default();
        if t.is_empty() {
            return Ok(sel);
        }
        for item in split_top_level(t)? {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| ModelError::Grammar(format!("expected `axis=value`, found {item:?}")))?;
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ModelError::Grammar(format!("invalid axis name {name:?}")));
            }
            sel.entries.push((name.to_string(), parse_value(value.trim())?));
        }
        Ok(sel)
    }

    /// Source indices for every axis of `axes`, in axis order.
    pub fn resolve(&self, axes: &[AxisDef]) -> Result<Vec<Vec<usize>>, ModelError> {
        let mut chosen: Vec<Option<&AxisSel>> = vec![None; axes.len()];
        for (name, s) in &self.entries {
            let pos = axis_position(axes, name)?;
            if chosen[pos].is_some() {
                return Err(ModelError::Axis(format!("axis {:?} selected twice", axes[pos].name)));
            }
            chosen[pos] = Some(s);
        }
        axes.iter()
            .zip(chosen)
            .map(|(a, s)| s.unwrap_or(&AxisSel::All).indices(&a.name, a.length))
            .collect()
    }

    /// The selector equivalent to applying `self` and then `then` to the
    /// result, expressed against `axes`.
    pub fn compose(&self, then: &SliceSelector, axes: &[AxisDef]) -> Result<SliceSelector, ModelError> {
        let first = self.resolve(axes)?;
        let intermediate: Vec<AxisDef> = axes
            .iter()
            .zip(&first)
            .map(|(a, idx)| AxisDef::new(a.name.clone(), a.kind, idx.len()))
            .collect();
        let second = then.resolve(&intermediate)?;
        let entries = axes
            .iter()
            .zip(first.iter().zip(&second))
            .map(|(a, (f, s))| (a.name.clone(), AxisSel::List(s.iter().map(|&j| f[j]).collect())))
            .collect();
        Ok(SliceSelector { entries })
    }
}

fn axis_position(axes: &[AxisDef], name: &str) -> Result<usize, ModelError> {
    if let Some(p) = axes.iter().position(|a| a.name == name) {
        return Ok(p);
    }
    let full = AXIS_ALIASES.iter().find(|(short, _)| *short == name).map(|(_, full)| *full);
    full.and_then(|f| axes.iter().position(|a| a.name == f)).ok_or_else(|| {
        let names: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
        ModelError::Axis(format!("no axis named {name:?} (axes: {})", names.join(", ")))
    })
}

fn split_top_level(t: &str) -> Result<Vec<&str>, ModelError> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in t.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(ModelError::Grammar(format!("unbalanced `]` in {t:?}")));
                }
            }
            ',' if depth == 0 => {
                items.push(t[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(ModelError::Grammar(format!("unbalanced `[` in {t:?}")));
    }
    items.push(t[start..].trim());
    // A bare list continuation (`rx=0,1,2`) is not an item of its own.
    let mut merged: Vec<&str> = Vec::new();
    for item in items {
        if !item.contains('=') && !merged.is_empty() {
            return Err(ModelError::Grammar(format!(
                "{item:?} is not `axis=value`; write index lists in brackets, e.g. rx=[0,1]"
            )));
        }
        merged.push(item);
    }
    Ok(merged)
}

fn index(s: &str) -> Result<usize, ModelError> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ModelError::Grammar(format!("expected a non-negative index, found {s:?}")));
    }
    s.parse()
        .map_err(|_| ModelError::Grammar(format!("index {s:?} does not fit")))
}

fn parse_value(v: &str) -> Result<AxisSel, ModelError> {
    if v == ":" || v == "*" {
        return Ok(AxisSel::All);
    }
    if let Some(inner) = v.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        if inner.contains(':') && !inner.contains(',') {
            return parse_value(inner.trim());
        }
        let list = inner.split(',').map(index).collect::<Result<Vec<_>, _>>()?;
        return Ok(AxisSel::List(list));
    }
    if let Some((a, b)) = v.split_once(':') {
        let (a, b) = (index(a)?, index(b)?);
        if a >= b {
            return Err(ModelError::Index(format!("empty range {v:?}: start must be below end")));
        }
        return Ok(AxisSel::List((a..b).collect()));
    }
    Ok(AxisSel::Index(index(v)?))
}

impl fmt::Display for SliceSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .entries
            .iter()
            .map(|(name, s)| match s {
                AxisSel::Index(i) => format!("{name}={i}"),
                AxisSel::List(l) => {
                    let l: Vec<String> = l.iter().map(usize::to_string).collect();
                    format!("{name}=[{}]", l.join(","))
                }
                AxisSel::All => format!("{name}=:"),
            })
            .collect();
        f.write_str(&items.join(","))
    }
}

impl std::str::FromStr for SliceSelector {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        SliceSelector::parse(s)
    }
}

/// Copies the selected part of `ds`. Every axis is kept (a single index keeps
/// the axis at length 1); coordinates and channel coordinates follow the data.
pub fn slice(ds: &DssDataset, sel: &SliceSelector) -> Result<DssDataset, ModelError> {
    if matches!(ds.payload, Payload::Series(_)) {
        if let Some((name, _)) = sel.entries.first() {
            return Err(ModelError::Axis(format!(
                "simulation datasets have no axis {name:?} to select"
            )));
        }
        return Ok(ds.clone());
    }
    let picks = sel.resolve(&ds.axes)?;
    let mut out = ds.clone();
    for (k, idx) in picks.iter().enumerate() {
        let axis = &mut out.axes[k];
        if idx.len() == axis.length && idx.iter().enumerate().all(|(i, &j)| i == j) {
            continue;
        }
        axis.length = idx.len();
        axis.coordinate = axis.coordinate.as_ref().map(|c| c.select(idx));
        out.payload = match &out.payload {
            Payload::Real(a) => Payload::Real(a.select(Axis(k), idx)),
            Payload::Complex(a) => Payload::Complex(a.select(Axis(k), idx)),
            Payload::Series(_) => unreachable!(),
        };
        let name = axis.name.clone();
        if let Some(cc) = out.channel_coords.get(&name) {
            let sliced = cc.select(idx);
            out.channel_coords.insert(name, sliced);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_call_style_and_shell_style() {
        let a = SliceSelector::parse("(tx=0, rx=[0,1,2,3], t=0)").unwrap();
        let b = SliceSelector::parse("tx=0,rx=0:4,t=0").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entries[1].1, AxisSel::List(vec![0, 1, 2, 3]));
        assert_eq!(SliceSelector::parse("rx=[2:4]").unwrap().entries[0].1, AxisSel::List(vec![2, 3]));
        assert!(SliceSelector::parse("").unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_grammar() {
        for bad in ["tx", "tx=a", "rx=[0,1", "rx=0,1", "=3", "rx=-1"] {
            assert!(matches!(SliceSelector::parse(bad), Err(ModelError::Grammar(_))), "{bad}");
        }
        assert!(matches!(SliceSelector::parse("rx=4:4"), Err(ModelError::Index(_))));
    }

    #[test]
    fn display_round_trips() {
        let s = SliceSelector::parse("tx=0,rx=[3,1],t=:").unwrap();
        assert_eq!(SliceSelector::parse(&s.to_string()).unwrap(), s);
    }
}
