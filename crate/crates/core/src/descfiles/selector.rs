use super::DescError;

/// A `data_source_channel` selector: a single index `"k"` or a half-open
/// range `"a:b"` covering `a, a+1, .., b-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelSelector {
    pub raw: String,
    pub indices: Vec<usize>,
}

impl ChannelSelector {
    /// Checks the grammar only; returns the half-open index range.
    pub fn parse_range(raw: &str) -> Result<std::ops::Range<usize>, DescError> {
        let grammar = |message: &str| DescError::Grammar {
            raw: raw.to_string(),
            message: message.to_string(),
        };
        let number = |s: &str| -> Result<usize, DescError> {
            let s = s.trim();
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(grammar("expected a non-negative integer or `a:b`"));
            }
            s.parse().map_err(|_| grammar("index does not fit"))
        };
        match raw.split_once(':') {
            None => {
                let k = number(raw)?;
                Ok(k..k + 1)
            }
            Some((a, b)) => {
                let (a, b) = (number(a)?, number(b)?);
                if a >= b {
                    return Err(DescError::Range(format!(
                        "empty channel range {raw:?}: start must be below end"
                    )));
                }
                Ok(a..b)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Parses `raw` and checks every index against `num_channels`.
pub fn parse_channel_selector(raw: &str, num_channels: usize) -> Result<ChannelSelector, DescError> {
    let range = ChannelSelector::parse_range(raw)?;
    if range.end > num_channels {
        return Err(DescError::Range(format!(
            "selector {raw:?} addresses channel {} but the data source has {num_channels}",
            range.end - 1
        )));
    }
    Ok(ChannelSelector {
        raw: raw.to_string(),
        indices: range.collect(),
    })
}
