use std::fmt;

use serde_yaml::Value;

/// One step of a [`Pointer`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    Key(String),
    Index(usize),
}

/// Location of a node inside a YAML document, written `a.b[0].c`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pointer(pub Vec<Segment>);

impl Pointer {
    pub fn root() -> Self {
        Pointer(Vec::new())
    }

    pub fn key(&self, key: impl Into<String>) -> Self {
        let mut p = self.clone();
        p.0.push(Segment::Key(key.into()));
        p
    }

    pub fn index(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.0.push(Segment::Index(i));
        p
    }

    pub fn join(&self, other: &Pointer) -> Self {
        let mut p = self.clone();
        p.0.extend(other.0.iter().cloned());
        p
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses the textual form produced by `Display`.
    pub fn parse(text: &str) -> Option<Pointer> {
        let mut segs = Vec::new();
        for part in text.split('.').filter(|p| !p.is_empty()) {
            let (key, mut rest) = match part.find('[') {
                Some(i) => (&part[..i], &part[i..]),
                None => (part, ""),
            };
            if !key.is_empty() {
                segs.push(Segment::Key(key.to_string()));
            }
            while let Some(stripped) = rest.strip_prefix('[') {
                let end = stripped.find(']')?;
                segs.push(Segment::Index(stripped[..end].parse().ok()?));
                rest = &stripped[end + 1..];
            }
            if !rest.is_empty() {
                return None;
            }
        }
        Some(Pointer(segs))
    }
}

impl fmt::Display for Pointer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for seg in &self.0 {
            match seg {
                Segment::Key(k) => {
                    if !first {
                        f.write_str(".")?;
                    }
                    f.write_str(k)?;
                }
                Segment::Index(i) => write!(f, "[{i}]")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Follows `pointer` from `root`; keys are compared against the string form
/// of mapping keys.
pub fn resolve_pointer<'a>(root: &'a Value, pointer: &Pointer) -> Option<&'a Value> {
    let mut node = root;
    for seg in &pointer.0 {
        node = match (seg, node) {
            (Segment::Key(k), Value::Mapping(m)) => m
                .iter()
                .find(|(key, _)| super::parse::key_string(key).as_deref() == Some(k.as_str()))
                .map(|(_, v)| v)?,
            (Segment::Index(i), Value::Sequence(s)) => s.get(*i)?,
            (_, Value::Tagged(t)) => return resolve_pointer(&t.value, &Pointer(vec![seg.clone()])),
            _ => return None,
        };
    }
    Some(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_agree() {
        let p = Pointer::root().key("data_chains").index(0).key("chain").index(2).index(1);
        assert_eq!(p.to_string(), "data_chains[0].chain[2][1]");
        assert_eq!(Pointer::parse(&p.to_string()), Some(p));
        assert_eq!(Pointer::parse(""), Some(Pointer::root()));
        assert_eq!(Pointer::parse("a[x]"), None);
    }

    #[test]
    fn resolves_into_yaml() {
        let v: Value = serde_yaml::from_str("a:\n  - {b: 1}\n  - {b: 2}\n").unwrap();
        let p = Pointer::parse("a[1].b").unwrap();
        assert_eq!(resolve_pointer(&v, &p), Some(&Value::from(2)));
        assert_eq!(resolve_pointer(&v, &Pointer::parse("a[2]").unwrap()), None);
    }
}
