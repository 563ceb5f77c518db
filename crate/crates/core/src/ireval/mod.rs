//! Retrieval evaluation: MRR@k, query/document token-overlap analysis and
//! paired significance testing.

mod metrics;
mod overlap;
mod stats;

pub use metrics::{mrr_at_k, read_per_query, reciprocal_rank, MetricReport, DEFAULT_K};
pub use overlap::{
    bucket_queries, occurrence_overlap, overlap_reduction, text_overlap, token_overlap, Bucket,
    BucketSummary, OverlapBuckets, OverlapReduction, QueryOverlap,
};
pub use stats::{paired_t_test, student_t_two_sided, SignificanceResult};
