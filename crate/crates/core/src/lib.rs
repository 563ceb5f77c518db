//! Code-switched training data generation and evaluation tooling for
//! cross-lingual passage reranking.
//!
//! The crate covers the non-neural data path end to end:
//!
//! * [`embedspace`]: word2vec-format embedding spaces and bilingual lexicon
//!   induction by nearest cosine neighbour.
//! * [`lexicon`]: single-word and n-gram lexicons, including parallel
//!   Wikipedia title dumps.
//! * [`tokenize`] and [`codeswitch`]: lossless word tokenization and the
//!   bilingual, multilingual, n-gram title and translate-test substitution
//!   strategies, all keyed by a stable per-record random stream.
//! * [`corpus`]: MS MARCO / TREC file formats, mixed-language collections and
//!   streaming triple transformation.
//! * [`ireval`]: MRR@k, query/document token-overlap analysis and paired
//!   significance testing.
//! * [`toyrank`]: a small logistic ranker over lexical features used to show
//!   how monolingual training over-relies on exact matches.

pub mod codeswitch;
pub mod corpus;
pub mod embedspace;
mod error;
pub mod ireval;
pub mod lexicon;
pub mod report;
pub mod stream;
pub mod tokenize;
pub mod toyrank;

pub use codeswitch::{Strategy, SwitchOutcome, SwitchPolicy, SwitchStats, Switcher};
pub use corpus::{Collection, Qrels, QuerySet, Run, RunEntry, TextTriple};
pub use embedspace::EmbeddingSpace;
pub use error::{Error, Result};
pub use lexicon::{BilingualLexicon, LexiconSet, NGramLexicon};
pub use report::KvBlock;
pub use stream::{RecordStream, Side};
