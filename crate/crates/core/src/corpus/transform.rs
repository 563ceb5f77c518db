use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::formats::{parse_id_text, IdTriple, TextTriple, TsvLines};
use super::{Collection, QuerySet};
use crate::codeswitch::{SwitchOutcome, SwitchStats, Switcher};
use crate::report::KvBlock;
use crate::stream::Side;
use crate::Result;

/// Records per parallel batch in the streaming transforms.
pub const DEFAULT_CHUNK: usize = 4096;

/// Which pool an `id<TAB>text` file is switched with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Queries,
    Passages,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformReport {
    pub records: usize,
    pub query: SwitchStats,
    pub doc: SwitchStats,
}

impl TransformReport {
    fn absorb(&mut self, outcomes: &[SwitchOutcome], kinds: &[Side]) {
        self.records += 1;
        for (o, side) in outcomes.iter().zip(kinds) {
            match side {
                Side::Query => self.query.absorb(o),
                _ => self.doc.absorb(o),
            }
        }
    }

    /// Query and document statistics combined.
    pub fn total(&self) -> SwitchStats {
        let mut all = self.query.clone();
        all.merge(&self.doc);
        all
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("records", self.records);
        kv.extend("all.", &self.total().to_kv());
        kv.extend("query.", &self.query.to_kv());
        kv.extend("doc.", &self.doc.to_kv());
        kv
    }
}

const TRIPLE_SIDES: [Side; 3] = [Side::Query, Side::Document, Side::Negative];

/// Switches the query with the query pool and both passages with the
/// document pool.
pub fn switch_triple(sw: &Switcher<'_>, t: &TextTriple, record_id: &str) -> (TextTriple, [SwitchOutcome; 3]) {
    let q = sw.switch(&t.query, record_id, Side::Query);
    let p = sw.switch(&t.positive, record_id, Side::Document);
    let n = sw.switch(&t.negative, record_id, Side::Negative);
    let out = TextTriple::new(q.text.clone(), p.text.clone(), n.text.clone());
    (out, [q, p, n])
}

/// In-memory transform of text triples. Record ids are content-derived.
pub fn transform_triples(triples: &[TextTriple], sw: &Switcher<'_>) -> (Vec<TextTriple>, TransformReport) {
    let results: Vec<_> = triples
        .par_iter()
        .map(|t| switch_triple(sw, t, &t.record_id()))
        .collect();
    let mut report = TransformReport::default();
    let mut out = Vec::with_capacity(results.len());
    for (t, outcomes) in results {
        report.absorb(&outcomes, &TRIPLE_SIDES);
        out.push(t);
    }
    (out, report)
}

/// Streams triples from `reader` to `writer` as text triples. With `join`,
/// input lines are id triples resolved against `(queries, collection)`
/// first. Output order equals input order for any thread count.
pub fn transform_text_triples<R: BufRead, W: Write>(
    reader: R,
    mut writer: W,
    origin: &str,
    sw: &Switcher<'_>,
    join: Option<(&QuerySet, &Collection)>,
    chunk: usize,
) -> Result<TransformReport> {
    let mut report = TransformReport::default();
    let mut lines = TsvLines::new(reader);
    let mut batch = Vec::with_capacity(chunk);
    loop {
        batch.clear();
        for item in lines.by_ref().take(chunk.max(1)) {
            batch.push(item?);
        }
        if batch.is_empty() {
            break;
        }
        let results: Vec<Result<_>> = batch
            .par_iter()
            .map(|(lineno, line)| {
                let (triple, id) = match join {
                    None => {
                        let t = TextTriple::parse(line, origin, *lineno)?;
                        let id = t.record_id();
                        (t, id)
                    }
                    Some((queries, coll)) => {
                        let ids = IdTriple::parse(line, origin, *lineno)?;
                        (ids.resolve(queries, coll)?, ids.record_id())
                    }
                };
                Ok(switch_triple(sw, &triple, &id))
            })
            .collect();
        for r in results {
            let (t, outcomes) = r?;
            writeln!(writer, "{}\t{}\t{}", t.query, t.positive, t.negative)?;
            report.absorb(&outcomes, &TRIPLE_SIDES);
        }
    }
    writer.flush()?;
    Ok(report)
}

/// Streams an `id<TAB>text` file, switching each text with the pool that
/// matches `kind`. The id is the record id.
pub fn transform_id_records<R: BufRead, W: Write>(
    reader: R,
    mut writer: W,
    origin: &str,
    sw: &Switcher<'_>,
    kind: RecordKind,
    chunk: usize,
) -> Result<TransformReport> {
    let side = match kind {
        RecordKind::Queries => Side::Query,
        RecordKind::Passages => Side::Document,
    };
    let mut report = TransformReport::default();
    let mut lines = TsvLines::new(reader);
    let mut batch = Vec::with_capacity(chunk);
    loop {
        batch.clear();
        for item in lines.by_ref().take(chunk.max(1)) {
            batch.push(item?);
        }
        if batch.is_empty() {
            break;
        }
        let results: Vec<Result<_>> = batch
            .par_iter()
            .map(|(lineno, line)| {
                let (id, text) = parse_id_text(line, origin, *lineno)?;
                Ok((id.to_string(), sw.switch(text, id, side)))
            })
            .collect();
        for r in results {
            let (id, outcome) = r?;
            writeln!(writer, "{id}\t{}", outcome.text)?;
            report.absorb(std::slice::from_ref(&outcome), &[side]);
        }
    }
    writer.flush()?;
    Ok(report)
}
