use std::collections::HashSet;
use std::fmt;

use super::metrics::{mrr_at_k, DEFAULT_K};
use crate::corpus::{Collection, Qrels, QuerySet, Run, TextTriple};
use crate::report::KvBlock;
use crate::tokenize::{folded_words, word_types};
use crate::{Error, Result};

/// Number of distinct query token types that also occur in the document.
pub fn token_overlap<Q, D>(query_tokens: &[Q], doc_tokens: &[D]) -> usize
where
    Q: AsRef<str>,
    D: AsRef<str>,
{
    let doc: HashSet<&str> = doc_tokens.iter().map(AsRef::as_ref).collect();
    let query: HashSet<&str> = query_tokens.iter().map(AsRef::as_ref).collect();
    query.iter().filter(|t| doc.contains(*t)).count()
}

/// [`token_overlap`] over tokenized, case-folded texts.
pub fn text_overlap(query: &str, doc: &str) -> usize {
    let q = word_types(query);
    let d = word_types(doc);
    q.intersection(&d).count()
}

/// Query token occurrences whose folded form appears in the passage.
pub fn occurrence_overlap(query: &str, passage: &str) -> usize {
    let types = word_types(passage);
    folded_words(query).iter().filter(|t| types.contains(*t)).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bucket {
    /// No shared tokens.
    None,
    /// Up to three shared tokens.
    Some,
    /// More than three shared tokens.
    Significant,
}

impl Bucket {
    pub const ALL: [Bucket; 3] = [Bucket::None, Bucket::Some, Bucket::Significant];

    /// A mean overlap strictly between 0 and 1 counts as some overlap.
    pub fn from_overlap(overlap: f64) -> Self {
        if overlap <= 0.0 {
            Bucket::None
        } else if overlap <= 3.0 {
            Bucket::Some
        } else {
            Bucket::Significant
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::None => "none",
            Bucket::Some => "some",
            Bucket::Significant => "significant",
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryOverlap {
    pub qid: String,
    pub mean_overlap: f64,
    pub bucket: Bucket,
    pub reciprocal_rank: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketSummary {
    pub bucket: Bucket,
    pub queries: usize,
    pub mrr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapBuckets {
    pub k: usize,
    pub per_query: Vec<QueryOverlap>,
    pub buckets: [BucketSummary; 3],
    pub mrr: f64,
}

impl OverlapBuckets {
    pub fn bucket(&self, b: Bucket) -> &BucketSummary {
        &self.buckets[b as usize]
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("tokenizer", "word").push("k", self.k);
        for s in &self.buckets {
            kv.push(format!("{}.queries", s.bucket), s.queries)
                .push(format!("{}.mrr", s.bucket), format!("{:.6}", s.mrr));
        }
        kv.push("all.queries", self.per_query.len())
            .push("all.mrr", format!("{:.6}", self.mrr));
        kv
    }
}

impl fmt::Display for OverlapBuckets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# overlap counted on word tokens (case-folded), not model subwords"
        )?;
        writeln!(f, "{:<14}{:>10}{:>12}", "bucket", "queries", format!("MRR@{}", self.k))?;
        for s in &self.buckets {
            writeln!(f, "{:<14}{:>10}{:>12.4}", s.bucket.as_str(), s.queries, s.mrr)?;
        }
        writeln!(f, "{:<14}{:>10}{:>12.4}", "all", self.per_query.len(), self.mrr)
    }
}

/// Groups judged queries by their mean token overlap with their relevant
/// documents and reports MRR@10 per group. Queries without a relevant
/// document are left out.
pub fn bucket_queries(
    queries: &QuerySet,
    collection: &Collection,
    qrels: &Qrels,
    run: &Run,
) -> Result<OverlapBuckets> {
    let report = mrr_at_k(run, qrels, DEFAULT_K)?;
    let mut per_query = Vec::new();
    for qid in qrels.queries() {
        let relevant: Vec<&str> = qrels.relevant(qid).collect();
        if relevant.is_empty() {
            continue;
        }
        let query = queries
            .get(qid)
            .ok_or_else(|| Error::NotFound(format!("query {qid}")))?;
        let mut total = 0usize;
        for docid in &relevant {
            let doc = collection
                .get(docid)
                .ok_or_else(|| Error::NotFound(format!("document {docid}")))?;
            total += text_overlap(query, doc);
        }
        let mean_overlap = total as f64 / relevant.len() as f64;
        per_query.push(QueryOverlap {
            qid: qid.to_string(),
            mean_overlap,
            bucket: Bucket::from_overlap(mean_overlap),
            reciprocal_rank: report.per_query[qid],
        });
    }
    let buckets = Bucket::ALL.map(|b| {
        let rrs: Vec<f64> = per_query
            .iter()
            .filter(|q| q.bucket == b)
            .map(|q| q.reciprocal_rank)
            .collect();
        BucketSummary {
            bucket: b,
            queries: rrs.len(),
            mrr: mean(&rrs),
        }
    });
    let all: Vec<f64> = per_query.iter().map(|q| q.reciprocal_rank).collect();
    Ok(OverlapBuckets {
        k: DEFAULT_K,
        mrr: mean(&all),
        per_query,
        buckets,
    })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Query/positive-passage overlap totals before and after switching.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OverlapReduction {
    pub records: usize,
    pub tokens_before: u64,
    pub tokens_after: u64,
}

impl OverlapReduction {
    pub fn add(&mut self, before: &TextTriple, after: &TextTriple) {
        self.records += 1;
        self.tokens_before += occurrence_overlap(&before.query, &before.positive) as u64;
        self.tokens_after += occurrence_overlap(&after.query, &after.positive) as u64;
    }

    /// `1 - after / before`, zero when nothing overlapped before.
    pub fn reduction(&self) -> f64 {
        if self.tokens_before == 0 {
            0.0
        } else {
            1.0 - self.tokens_after as f64 / self.tokens_before as f64
        }
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("records", self.records)
            .push("tokens_before", self.tokens_before)
            .push("tokens_after", self.tokens_after)
            .push("reduction", format!("{:.6}", self.reduction()));
        kv
    }
}

pub fn overlap_reduction(before: &[TextTriple], after: &[TextTriple]) -> Result<OverlapReduction> {
    if before.len() != after.len() {
        return Err(Error::Invalid(format!(
            "record counts differ: {} before, {} after",
            before.len(),
            after.len()
        )));
    }
    let mut r = OverlapReduction::default();
    for (b, a) in before.iter().zip(after) {
        r.add(b, a);
    }
    Ok(r)
}
