//! MS MARCO and TREC file formats, mixed-language collections and streaming
//! code-switching of training data.
//!
//! | file | layout |
//! |------|--------|
//! | collection / queries | `id<TAB>text` |
//! | triples (text) | `query<TAB>positive<TAB>negative` |
//! | triples (ids) | `qid<TAB>positive-pid<TAB>negative-pid` |
//! | qrels | `qid 0 docid grade` |
//! | run | `qid Q0 docid rank score tag` |
//!
//! All files are UTF-8 and LF-terminated.

mod formats;
mod mix;
mod transform;

pub use formats::{
    read_collection, read_id_triples, read_qrels, read_queries, read_run, read_text_triples,
    write_collection, write_qrels, write_run, write_text_triples, Collection, IdTriple, Qrels,
    QuerySet, Run, RunEntry, TextTriple, TsvLines, rank_by_score,
};
pub use mix::{mix_language_corpus, MixedCollection};
pub use transform::{
    switch_triple, transform_id_records, transform_text_triples, transform_triples, RecordKind,
    TransformReport, DEFAULT_CHUNK,
};
