//! Machine-readable `key=value` report blocks.

use std::fmt;

/// An ordered list of `key=value` pairs, rendered one pair per line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvBlock {
    pairs: Vec<(String, String)>,
}

impl KvBlock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.pairs.push((key.into(), value.to_string()));
        self
    }

    pub fn extend(&mut self, prefix: &str, other: &KvBlock) -> &mut Self {
        for (k, v) in &other.pairs {
            self.pairs.push((format!("{prefix}{k}"), v.clone()));
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Parses the output of `Display` back into a block. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Option<Self> {
        let mut block = KvBlock::new();
        for line in text.lines() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=')?;
            block.push(k, v);
        }
        Some(block)
    }
}

impl fmt::Display for KvBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.pairs {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
