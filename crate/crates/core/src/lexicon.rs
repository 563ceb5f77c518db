//! Bilingual lexicons: single-word maps and n-gram title maps.
//!
//! Keys are case-folded on insert and on lookup; targets keep their original
//! casing. The first entry for a key wins.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use indexmap::IndexMap;

use crate::report::KvBlock;
use crate::tokenize::{fold, tokenize, TokenKind};
use crate::{Error, Result};

/// Default maximum n-gram length for title lexicons.
pub const DEFAULT_MAX_N: usize = 3;

/// Anything that can translate a token sequence.
pub trait Lookup {
    fn lookup_tokens(&self, key: &[&str]) -> Option<&str>;

    fn size(&self) -> usize;

    /// Fraction of `tokens` that have a single-token translation. Zero for
    /// an empty token sequence.
    fn coverage<'t, I>(&self, tokens: I) -> f64
    where
        I: IntoIterator<Item = &'t str>,
        Self: Sized,
    {
        let (mut total, mut hit) = (0usize, 0usize);
        for t in tokens {
            total += 1;
            if self.lookup_tokens(&[t]).is_some() {
                hit += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}

/// Single-token source term to target string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilingualLexicon {
    pub src_lang: String,
    pub tgt_lang: String,
    entries: IndexMap<String, String>,
}

impl BilingualLexicon {
    pub fn new(src_lang: impl Into<String>, tgt_lang: impl Into<String>) -> Self {
        Self {
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
            entries: IndexMap::new(),
        }
    }

    /// Inserts `source -> target` unless the folded key already exists.
    /// Returns whether the entry was added.
    pub fn insert(&mut self, source: &str, target: &str) -> Result<bool> {
        if source.is_empty() || source.chars().any(char::is_whitespace) {
            return Err(Error::Invalid(format!(
                "lexicon key {source:?} must be a single non-empty token"
            )));
        }
        let key = fold(source);
        if self.entries.contains_key(&key) {
            return Ok(false);
        }
        self.entries.insert(key, target.to_string());
        Ok(true)
    }

    pub fn lookup(&self, term: &str) -> Option<&str> {
        match self.entries.get(term) {
            Some(t) => Some(t.as_str()),
            None => self.entries.get(&fold(term)).map(String::as_str),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Reads a two-column `source<TAB>target` file.
    pub fn read_tsv(path: impl AsRef<Path>, src_lang: &str, tgt_lang: &str) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file), &path.display().to_string(), src_lang, tgt_lang)
    }

    pub fn from_reader<R: BufRead>(
        reader: R,
        origin: &str,
        src_lang: &str,
        tgt_lang: &str,
    ) -> Result<Self> {
        let mut lex = Self::new(src_lang, tgt_lang);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            let (src, tgt) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, lineno, "expected source<TAB>target"))?;
            lex.insert(src, tgt)
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        }
        Ok(lex)
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "{k}\t{v}")?;
        }
        Ok(())
    }

    pub fn stats(&self) -> LexiconStats {
        LexiconStats {
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            size: self.len(),
            ngram_histogram: if self.is_empty() { vec![] } else { vec![self.len()] },
        }
    }
}

impl Lookup for BilingualLexicon {
    fn lookup_tokens(&self, key: &[&str]) -> Option<&str> {
        match key {
            [t] => self.lookup(t),
            _ => None,
        }
    }

    fn size(&self) -> usize {
        self.len()
    }
}

/// Multi-word source expressions (1 to `max_n` tokens) to target strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramLexicon {
    pub src_lang: String,
    pub tgt_lang: String,
    max_n: usize,
    /// Folded tokens joined by a single space.
    entries: IndexMap<String, String>,
}

impl NGramLexicon {
    pub fn new(src_lang: impl Into<String>, tgt_lang: impl Into<String>, max_n: usize) -> Self {
        Self {
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
            max_n: max_n.max(1),
            entries: IndexMap::new(),
        }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Inserts a pre-tokenized key. Keys outside `1..=max_n` tokens are
    /// rejected with `Ok(false)`, as are duplicates.
    pub fn insert_tokens(&mut self, tokens: &[&str], target: &str) -> bool {
        if tokens.is_empty() || tokens.len() > self.max_n {
            return false;
        }
        let key = join_folded(tokens);
        if self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, target.to_string());
        true
    }

    /// Tokenizes `source` and inserts it.
    pub fn insert(&mut self, source: &str, target: &str) -> bool {
        let tokens = title_tokens(source);
        self.insert_tokens(&tokens, target)
    }

    pub fn lookup(&self, tokens: &[&str]) -> Option<&str> {
        if tokens.is_empty() || tokens.len() > self.max_n {
            return None;
        }
        self.entries.get(&join_folded(tokens)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(folded key tokens joined by space, target)` pairs in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn stats(&self) -> LexiconStats {
        let mut histogram = vec![0usize; self.max_n];
        for key in self.entries.keys() {
            let n = key.split(' ').count();
            histogram[n - 1] += 1;
        }
        LexiconStats {
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            size: self.len(),
            ngram_histogram: if self.is_empty() { vec![] } else { histogram },
        }
    }
}

impl Lookup for NGramLexicon {
    fn lookup_tokens(&self, key: &[&str]) -> Option<&str> {
        self.lookup(key)
    }

    fn size(&self) -> usize {
        self.len()
    }
}

fn join_folded(tokens: &[&str]) -> String {
    let mut key = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            key.push(' ');
        }
        key.push_str(&fold(t));
    }
    key
}

/// Non-space tokens of a title. Punctuation is kept, so `Mercury (planet)`
/// yields four tokens.
fn title_tokens(title: &str) -> Vec<&str> {
    tokenize(title)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Space)
        .map(|t| t.surface)
        .collect()
}

/// Counters from ingesting a parallel-title file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub kept: usize,
    pub too_long: usize,
    pub empty: usize,
    pub duplicates: usize,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.too_long + self.empty + self.duplicates
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("lines", self.lines)
            .push("kept", self.kept)
            .push("dropped", self.dropped())
            .push("dropped_too_long", self.too_long)
            .push("dropped_empty", self.empty)
            .push("dropped_duplicate", self.duplicates);
        kv
    }
}

/// Parses a `source-title<TAB>target-title` file into an n-gram lexicon,
/// keeping titles of at most `max_n` tokens.
pub fn parse_wiki_titles(
    path: impl AsRef<Path>,
    src_lang: &str,
    tgt_lang: &str,
    max_n: usize,
) -> Result<(NGramLexicon, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_wiki_titles_from(
        BufReader::new(file),
        &path.display().to_string(),
        src_lang,
        tgt_lang,
        max_n,
    )
}

pub fn parse_wiki_titles_from<R: BufRead>(
    reader: R,
    origin: &str,
    src_lang: &str,
    tgt_lang: &str,
    max_n: usize,
) -> Result<(NGramLexicon, IngestReport)> {
    let mut lex = NGramLexicon::new(src_lang, tgt_lang, max_n);
    let mut report = IngestReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        report.lines += 1;
        let (src, tgt) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, i + 1, "expected source<TAB>target"))?;
        let tokens = title_tokens(src);
        if tokens.is_empty() || tgt.trim().is_empty() {
            report.empty += 1;
        } else if tokens.len() > lex.max_n {
            report.too_long += 1;
        } else if lex.insert_tokens(&tokens, tgt.trim()) {
            report.kept += 1;
        } else {
            report.duplicates += 1;
        }
    }
    Ok((lex, report))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconStats {
    pub src_lang: String,
    pub tgt_lang: String,
    pub size: usize,
    /// `ngram_histogram[n - 1]` is the number of n-token keys.
    pub ngram_histogram: Vec<usize>,
}

impl LexiconStats {
    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("src_lang", &self.src_lang)
            .push("tgt_lang", &self.tgt_lang)
            .push("size", self.size);
        for (i, c) in self.ngram_histogram.iter().enumerate() {
            kv.push(format!("ngram_{}", i + 1), c);
        }
        kv
    }
}

impl fmt::Display for LexiconStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lexicon {} -> {}", self.src_lang, self.tgt_lang)?;
        writeln!(f, "  entries      {:>12}", self.size)?;
        for (i, c) in self.ngram_histogram.iter().enumerate() {
            writeln!(f, "  {}-gram keys  {:>12}", i + 1, c)?;
        }
        Ok(())
    }
}

/// Lexicons available to a switching run, keyed by target language.
#[derive(Debug, Clone, Default)]
pub struct LexiconSet {
    pub bilingual: BTreeMap<String, BilingualLexicon>,
    pub ngram: BTreeMap<String, NGramLexicon>,
}

impl LexiconSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_bilingual(&mut self, lang: &str, lex: BilingualLexicon) -> &mut Self {
        self.bilingual.insert(lang.to_string(), lex);
        self
    }

    pub fn add_ngram(&mut self, lang: &str, lex: NGramLexicon) -> &mut Self {
        self.ngram.insert(lang.to_string(), lex);
        self
    }

    pub fn bilingual(&self, lang: &str) -> Result<&BilingualLexicon> {
        self.bilingual
            .get(lang)
            .ok_or_else(|| Error::MissingLexicon(lang.to_string()))
    }

    pub fn ngram(&self, lang: &str) -> Result<&NGramLexicon> {
        self.ngram
            .get(lang)
            .ok_or_else(|| Error::MissingLexicon(lang.to_string()))
    }
}
