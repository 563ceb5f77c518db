use std::fmt;
use std::io::{BufRead, Write};

use indexmap::IndexMap;

use crate::corpus::{Qrels, Run, RunEntry, TsvLines};
use crate::report::KvBlock;
use crate::{Error, Result};

pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub k: usize,
    /// Reciprocal rank per judged query, in qrels order.
    pub per_query: IndexMap<String, f64>,
    pub mrr: f64,
}

impl MetricReport {
    pub fn num_queries(&self) -> usize {
        self.per_query.len()
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("metric", format!("mrr@{}", self.k))
            .push("queries", self.num_queries())
            .push("value", format!("{:.6}", self.mrr));
        kv
    }

    /// `qid<TAB>rr` lines.
    pub fn write_per_query<W: Write>(&self, mut out: W) -> Result<()> {
        for (qid, rr) in &self.per_query {
            writeln!(out, "{qid}\t{rr}")?;
        }
        Ok(())
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12}{:>10}{:>12}", "metric", "queries", "value")?;
        writeln!(
            f,
            "{:<12}{:>10}{:>12.4}",
            format!("MRR@{}", self.k),
            self.num_queries(),
            self.mrr
        )
    }
}

/// Reads a `qid<TAB>value` per-query dump.
pub fn read_per_query<R: BufRead>(reader: R, origin: &str) -> Result<IndexMap<String, f64>> {
    let mut out = IndexMap::new();
    for item in TsvLines::new(reader) {
        let (lineno, line) = item?;
        let (qid, v) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, lineno, "expected qid<TAB>value"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::parse(origin, lineno, format!("bad value {v:?}")))?;
        if out.insert(qid.to_string(), v).is_some() {
            return Err(Error::parse(origin, lineno, format!("duplicate query {qid:?}")));
        }
    }
    Ok(out)
}

/// Reciprocal rank of the first relevant entry among the `k` best-ranked,
/// ordering by the rank field.
pub fn reciprocal_rank(entries: &[RunEntry], qrels: &Qrels, qid: &str, k: usize) -> f64 {
    let mut by_rank: Vec<&RunEntry> = entries.iter().collect();
    by_rank.sort_by_key(|e| e.rank);
    by_rank
        .iter()
        .take(k)
        .position(|e| qrels.grade(qid, &e.docid) > 0)
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

/// MRR@k over the queries present in `qrels`. Judged queries missing from
/// the run score zero; unjudged run queries are ignored.
pub fn mrr_at_k(run: &Run, qrels: &Qrels, k: usize) -> Result<MetricReport> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    if qrels.is_empty() {
        return Err(Error::Invalid("qrels are empty".into()));
    }
    let per_query: IndexMap<String, f64> = qrels
        .queries()
        .map(|qid| {
            let rr = run
                .get(qid)
                .map_or(0.0, |entries| reciprocal_rank(entries, qrels, qid, k));
            (qid.to_string(), rr)
        })
        .collect();
    let mrr = per_query.values().sum::<f64>() / per_query.len() as f64;
    Ok(MetricReport { k, per_query, mrr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn run_with_relevant_at(qid: &str, rank: u64, n: u64) -> (Run, Qrels) {
        let mut run = Run::new();
        let mut qrels = Qrels::new();
        for r in 1..=n {
            let docid = format!("{qid}-d{r}");
            run.push(
                qid,
                RunEntry {
                    docid: docid.clone(),
                    rank: r,
                    score: (n - r) as f64,
                    tag: "t".into(),
                },
            )
            .unwrap();
            qrels.insert(qid, &docid, u32::from(r == rank)).unwrap();
        }
        (run, qrels)
    }

    #[test]
    fn single_query_examples() {
        for (rank, expected) in [(1, 1.0), (4, 0.25), (11, 0.0)] {
            let (run, qrels) = run_with_relevant_at("q", rank, 20);
            assert_eq!(mrr_at_k(&run, &qrels, 10).unwrap().mrr, expected);
        }
    }

    #[test]
    fn two_query_mean() {
        let (mut run, mut qrels) = run_with_relevant_at("a", 2, 10);
        let (run_b, qrels_b) = run_with_relevant_at("b", 5, 10);
        run.extend(run_b).unwrap();
        for qid in qrels_b.queries().collect::<Vec<_>>() {
            for (d, g) in qrels_b.judged(qid) {
                qrels.insert(qid, d, g).unwrap();
            }
        }
        let report = mrr_at_k(&run, &qrels, 10).unwrap();
        assert!((report.mrr - 0.35).abs() < 1e-15);
        assert_eq!(report.num_queries(), 2);
    }

    #[test]
    fn missing_and_unjudged_queries() {
        let (run, mut qrels) = run_with_relevant_at("a", 1, 3);
        qrels.insert("absent", "x", 1).unwrap();
        let report = mrr_at_k(&run, &qrels, 10).unwrap();
        assert_eq!(report.per_query["absent"], 0.0);
        assert_eq!(report.mrr, 0.5);

        let (mut run2, qrels2) = run_with_relevant_at("a", 1, 3);
        run2.extend(run_with_relevant_at("unjudged", 1, 3).0).unwrap();
        assert_eq!(mrr_at_k(&run2, &qrels2, 10).unwrap().num_queries(), 1);
    }

    #[test]
    fn errors() {
        let (run, qrels) = run_with_relevant_at("a", 1, 3);
        assert!(mrr_at_k(&run, &Qrels::new(), 10).is_err());
        assert!(mrr_at_k(&run, &qrels, 0).is_err());
    }

    #[test]
    fn per_query_dump_round_trips() {
        let (run, qrels) = run_with_relevant_at("a", 3, 5);
        let report = mrr_at_k(&run, &qrels, 10).unwrap();
        let mut out = Vec::new();
        report.write_per_query(&mut out).unwrap();
        let back = read_per_query(out.as_slice(), "dump").unwrap();
        assert_eq!(back, report.per_query);
    }

    proptest! {
        #[test]
        fn monotone_in_k_and_score_free(rank in 1u64..30, n in 1u64..30, scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
            let (run, qrels) = run_with_relevant_at("q", rank, n);
            let mut prev = 0.0;
            for k in 1..35 {
                let v = mrr_at_k(&run, &qrels, k).unwrap().mrr;
                prop_assert!(v >= prev);
                prop_assert!(v == 0.0 || (1..=k).any(|r| v == 1.0 / r as f64));
                prev = v;
            }
            let mut moved = Run::new();
            for e in run.get("q").unwrap() {
                moved.push("q", RunEntry { score: e.score * scale + shift, ..e.clone() }).unwrap();
            }
            prop_assert_eq!(mrr_at_k(&run, &qrels, 10).unwrap(), mrr_at_k(&moved, &qrels, 10).unwrap());
        }
    }
}
