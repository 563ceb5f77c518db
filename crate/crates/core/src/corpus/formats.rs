use std::fs::File;
use std::io::{BufRead, BufReader, Lines, Write};
use std::path::Path;

use indexmap::IndexMap;

use crate::stream::{fnv1a, mix64};
use crate::{Error, Result};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Line iterator yielding `(line_number, line)` and skipping empty lines.
pub struct TsvLines<R> {
    lines: Lines<R>,
    lineno: usize,
}

impl<R: BufRead> TsvLines<R> {
    pub fn new(reader: R) -> Self {
        Self {
            lines: reader.lines(),
            lineno: 0,
        }
    }
}

impl<R: BufRead> Iterator for TsvLines<R> {
    type Item = Result<(usize, String)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.lineno += 1;
            match line {
                Ok(l) if l.is_empty() => continue,
                Ok(l) => return Some(Ok((self.lineno, l))),
                Err(e) => return Some(Err(e.into())),
            }
        }
    }
}

/// Passages or queries keyed by id, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Collection {
    entries: IndexMap<String, String>,
}

/// Queries share the collection layout and invariants.
pub type QuerySet = Collection;

impl Collection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: &str, text: &str) -> Result<()> {
        if id.is_empty() || text.is_empty() {
            return Err(Error::Invalid(format!("empty id or text for {id:?}")));
        }
        if self.entries.contains_key(id) {
            return Err(Error::DuplicateId {
                origin: "collection".into(),
                id: id.to_string(),
            });
        }
        self.entries.insert(id.to_string(), text.to_string());
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&str> {
        self.entries.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn from_reader<R: BufRead>(reader: R, origin: &str) -> Result<Self> {
        let mut c = Self::new();
        for item in TsvLines::new(reader) {
            let (lineno, line) = item?;
            let (id, text) = parse_id_text(&line, origin, lineno)?;
            if c.entries.contains_key(id) {
                return Err(Error::parse(origin, lineno, format!("duplicate id {id:?}")));
            }
            c.entries.insert(id.to_string(), text.to_string());
        }
        Ok(c)
    }
}

impl<S: Into<String>, T: Into<String>> FromIterator<(S, T)> for Collection {
    /// Later duplicates are ignored.
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        let mut entries = IndexMap::new();
        for (k, v) in iter {
            entries.entry(k.into()).or_insert_with(|| v.into());
        }
        Self { entries }
    }
}

pub(crate) fn parse_id_text<'l>(line: &'l str, origin: &str, lineno: usize) -> Result<(&'l str, &'l str)> {
    let (id, text) = line
        .split_once('\t')
        .ok_or_else(|| Error::parse(origin, lineno, "expected id<TAB>text"))?;
    if id.is_empty() || text.is_empty() {
        return Err(Error::parse(origin, lineno, "empty id or text"));
    }
    Ok((id, text))
}

pub fn read_collection(path: impl AsRef<Path>) -> Result<Collection> {
    let path = path.as_ref();
    Collection::from_reader(open(path)?, &path.display().to_string())
}

pub fn read_queries(path: impl AsRef<Path>) -> Result<QuerySet> {
    read_collection(path)
}

pub fn write_collection<W: Write>(mut out: W, c: &Collection) -> Result<()> {
    for (id, text) in c.iter() {
        writeln!(out, "{id}\t{text}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextTriple {
    pub query: String,
    pub positive: String,
    pub negative: String,
}

impl TextTriple {
    pub fn new(query: impl Into<String>, positive: impl Into<String>, negative: impl Into<String>) -> Self {
        Self {
            query: query.into(),
            positive: positive.into(),
            negative: negative.into(),
        }
    }

    /// Content-derived record id, so switching a triple does not depend on
    /// where it sits in the file.
    pub fn record_id(&self) -> String {
        let h = mix64(
            fnv1a(self.query.as_bytes())
                ^ mix64(fnv1a(self.positive.as_bytes()))
                ^ mix64(mix64(fnv1a(self.negative.as_bytes()))),
        );
        format!("{h:016x}")
    }

    pub fn parse(line: &str, origin: &str, lineno: usize) -> Result<Self> {
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next(), cols.next()) {
            (Some(q), Some(p), Some(n), None) if !q.is_empty() && !p.is_empty() && !n.is_empty() => {
                if p == n {
                    return Err(Error::parse(origin, lineno, "positive equals negative"));
                }
                Ok(Self::new(q, p, n))
            }
            _ => Err(Error::parse(origin, lineno, "expected query<TAB>positive<TAB>negative")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdTriple {
    pub qid: String,
    pub positive: String,
    pub negative: String,
}

impl IdTriple {
    pub fn parse(line: &str, origin: &str, lineno: usize) -> Result<Self> {
        let t = TextTriple::parse(line, origin, lineno)?;
        Ok(Self {
            qid: t.query,
            positive: t.positive,
            negative: t.negative,
        })
    }

    pub fn record_id(&self) -> String {
        format!("{}:{}:{}", self.qid, self.positive, self.negative)
    }

    /// Joins ids against the query set and collection.
    pub fn resolve(&self, queries: &QuerySet, collection: &Collection) -> Result<TextTriple> {
        let get = |c: &Collection, id: &str, what: &str| {
            c.get(id)
                .map(str::to_string)
                .ok_or_else(|| Error::IdMismatch(format!("{what} {id:?} not found")))
        };
        Ok(TextTriple {
            query: get(queries, &self.qid, "query")?,
            positive: get(collection, &self.positive, "passage")?,
            negative: get(collection, &self.negative, "passage")?,
        })
    }
}

pub fn read_text_triples(path: impl AsRef<Path>) -> Result<Vec<TextTriple>> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    TsvLines::new(open(path)?)
        .map(|item| item.and_then(|(n, l)| TextTriple::parse(&l, &origin, n)))
        .collect()
}

pub fn read_id_triples(path: impl AsRef<Path>) -> Result<Vec<IdTriple>> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    TsvLines::new(open(path)?)
        .map(|item| item.and_then(|(n, l)| IdTriple::parse(&l, &origin, n)))
        .collect()
}

pub fn write_text_triples<W: Write>(mut out: W, triples: &[TextTriple]) -> Result<()> {
    for t in triples {
        writeln!(out, "{}\t{}\t{}", t.query, t.positive, t.negative)?;
    }
    Ok(())
}

/// Relevance judgments: query id to (doc id to grade).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    by_query: IndexMap<String, IndexMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, qid: &str, docid: &str, grade: u32) -> Result<()> {
        let docs = self.by_query.entry(qid.to_string()).or_default();
        if docs.contains_key(docid) {
            return Err(Error::DuplicateId {
                origin: "qrels".into(),
                id: format!("{qid} {docid}"),
            });
        }
        docs.insert(docid.to_string(), grade);
        Ok(())
    }

    pub fn grade(&self, qid: &str, docid: &str) -> u32 {
        self.by_query
            .get(qid)
            .and_then(|d| d.get(docid))
            .copied()
            .unwrap_or(0)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.by_query.keys().map(String::as_str)
    }

    pub fn judged(&self, qid: &str) -> impl Iterator<Item = (&str, u32)> {
        self.by_query
            .get(qid)
            .into_iter()
            .flat_map(|d| d.iter().map(|(k, &g)| (k.as_str(), g)))
    }

    /// Documents with grade above zero.
    pub fn relevant(&self, qid: &str) -> impl Iterator<Item = &str> {
        self.judged(qid).filter(|(_, g)| *g > 0).map(|(d, _)| d)
    }

    pub fn num_queries(&self) -> usize {
        self.by_query.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_query.is_empty()
    }

    pub fn from_reader<R: BufRead>(reader: R, origin: &str) -> Result<Self> {
        let mut q = Self::new();
        for item in TsvLines::new(reader) {
            let (lineno, line) = item?;
            let cols: Vec<&str> = line.split_whitespace().collect();
            let [qid, _iter, docid, grade] = cols[..] else {
                return Err(Error::parse(origin, lineno, "expected `qid 0 docid grade`"));
            };
            let grade: u32 = grade
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("bad grade {grade:?}")))?;
            q.insert(qid, docid, grade)
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        }
        Ok(q)
    }
}

pub fn read_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    Qrels::from_reader(open(path)?, &path.display().to_string())
}

pub fn write_qrels<W: Write>(mut out: W, q: &Qrels) -> Result<()> {
    for (qid, docs) in &q.by_query {
        for (docid, grade) in docs {
            writeln!(out, "{qid} 0 {docid} {grade}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub docid: String,
    pub rank: u64,
    pub score: f64,
    pub tag: String,
}

/// Ranked lists per query. Within a query ranks strictly increase in file
/// order and doc ids are unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Run {
    by_query: IndexMap<String, Vec<RunEntry>>,
}

impl Run {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, qid: &str, entry: RunEntry) -> Result<()> {
        let list = self.by_query.entry(qid.to_string()).or_default();
        if let Some(last) = list.last() {
            if entry.rank <= last.rank {
                return Err(Error::Invalid(format!(
                    "query {qid}: rank {} does not follow rank {}",
                    entry.rank, last.rank
                )));
            }
        }
        if list.iter().any(|e| e.docid == entry.docid) {
            return Err(Error::DuplicateId {
                origin: format!("run, query {qid}"),
                id: entry.docid,
            });
        }
        list.push(entry);
        Ok(())
    }

    /// Builds a run from scored documents, ranking by score descending with
    /// doc id as the tie-break.
    pub fn from_scores<'a, I>(qid: &str, scored: I, tag: &str) -> Self
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut run = Self::new();
        run.by_query.insert(qid.to_string(), rank_by_score(scored, tag));
        run
    }

    pub fn extend(&mut self, other: Run) -> Result<()> {
        for (qid, entries) in other.by_query {
            for e in entries {
                self.push(&qid, e)?;
            }
        }
        Ok(())
    }

    pub fn get(&self, qid: &str) -> Option<&[RunEntry]> {
        self.by_query.get(qid).map(Vec::as_slice)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.by_query.keys().map(String::as_str)
    }

    pub fn num_queries(&self) -> usize {
        self.by_query.len()
    }

    /// Adjacent pairs where a later rank carries a strictly higher score.
    pub fn score_rank_disagreements(&self) -> usize {
        self.by_query
            .values()
            .map(|l| l.windows(2).filter(|w| w[1].score > w[0].score).count())
            .sum()
    }

    pub fn from_reader<R: BufRead>(reader: R, origin: &str) -> Result<Self> {
        let mut run = Self::new();
        for item in TsvLines::new(reader) {
            let (lineno, line) = item?;
            let cols: Vec<&str> = line.split_whitespace().collect();
            let [qid, _q0, docid, rank, score, tag] = cols[..] else {
                return Err(Error::parse(origin, lineno, "expected `qid Q0 docid rank score tag`"));
            };
            let rank: u64 = rank
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("bad rank {rank:?}")))?;
            let score: f64 = score
                .parse()
                .map_err(|_| Error::parse(origin, lineno, format!("bad score {score:?}")))?;
            run.push(
                qid,
                RunEntry {
                    docid: docid.to_string(),
                    rank,
                    score,
                    tag: tag.to_string(),
                },
            )
            .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        }
        Ok(run)
    }
}

/// Sorts by score descending then doc id ascending and assigns ranks from 1.
pub fn rank_by_score<'a, I>(scored: I, tag: &str) -> Vec<RunEntry>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut items: Vec<(&str, f64)> = scored.into_iter().collect();
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    items
        .into_iter()
        .enumerate()
        .map(|(i, (docid, score))| RunEntry {
            docid: docid.to_string(),
            rank: i as u64 + 1,
            score,
            tag: tag.to_string(),
        })
        .collect()
}

pub fn read_run(path: impl AsRef<Path>) -> Result<Run> {
    let path = path.as_ref();
    Run::from_reader(open(path)?, &path.display().to_string())
}

pub fn write_run<W: Write>(mut out: W, run: &Run) -> Result<()> {
    for (qid, entries) in &run.by_query {
        for e in entries {
            writeln!(out, "{qid} Q0 {} {} {} {}", e.docid, e.rank, e.score, e.tag)?;
        }
    }
    Ok(())
}
