use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "csir",
    version,
    about = "Code-switched training data and evaluation for cross-lingual reranking",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads; output is identical for any value.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// TOML file of flag values, applied before the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Induce a bilingual lexicon by nearest cosine neighbour.
    InduceLexicon(InduceArgs),
    /// Code-switch triples, queries or passages.
    CodeSwitch(CodeSwitchArgs),
    /// Build a mixed-language collection or query set.
    Mix(MixArgs),
    /// MRR@k, optionally with a paired t-test against a baseline run.
    Eval(EvalArgs),
    /// Token-overlap buckets and overlap reduction.
    AnalyzeOverlap(OverlapArgs),
    /// Train monolingual and code-switched toy rankers on synthetic data.
    ToyExperiment(ToyArgs),
    /// Size, n-gram histogram and coverage of a lexicon.
    LexiconStats(LexiconStatsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct InduceArgs {
    /// Source-language embeddings (word2vec text).
    #[arg(long)]
    pub src: PathBuf,
    /// Target-language embeddings, aligned with the source space.
    #[arg(long)]
    pub tgt: PathBuf,
    #[arg(long, default_value = "en")]
    pub src_lang: String,
    #[arg(long)]
    pub tgt_lang: String,
    /// Output TSV, `source<TAB>target`.
    #[arg(long)]
    pub out: PathBuf,
    /// Read at most this many terms from each file.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Bl,
    Ml,
    Wiki,
    TranslateTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    /// `query<TAB>positive<TAB>negative`
    Triples,
    /// `qid<TAB>pid<TAB>pid`, joined against --queries and --collection.
    IdTriples,
    /// `qid<TAB>text`, switched with the query pool.
    Queries,
    /// `pid<TAB>text`, switched with the document pool.
    Collection,
}

#[derive(Debug, Args, Serialize)]
pub struct CodeSwitchArgs {
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Per-token translation probability (ignored by wiki and translate-test).
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Comma-separated query-side language pool.
    #[arg(long, value_delimiter = ',', required = true)]
    pub query_langs: Vec<String>,
    /// Comma-separated document-side language pool.
    #[arg(long, value_delimiter = ',', required = true)]
    pub doc_langs: Vec<String>,
    /// `LANG=PATH`, repeatable. Two-column TSV; title pairs for --strategy wiki.
    #[arg(long = "lexicon", value_name = "LANG=PATH")]
    pub lexicons: Vec<String>,
    /// Required for every randomized strategy.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "triples")]
    pub input_kind: InputKind,
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long)]
    pub collection: Option<PathBuf>,
    /// Output file; omitted in sweep mode.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "en")]
    pub source_lang: String,
    /// Longest title n-gram kept from wiki lexicons.
    #[arg(long, default_value_t = 3)]
    pub max_n: usize,
    /// Comma-separated probabilities; reports switch rates without writing text.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<f64>,
    /// Records per parallel batch.
    #[arg(long, default_value_t = csir_core::corpus::DEFAULT_CHUNK)]
    pub chunk: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MixArgs {
    /// `LANG=PATH`, repeatable; files share one id set.
    #[arg(long = "input", value_name = "LANG=PATH", required = true)]
    pub inputs: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: PathBuf,
    /// Sidecar `id<TAB>lang` file.
    #[arg(long)]
    pub sidecar: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Baseline run for a paired t-test on per-query reciprocal rank.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Number of comparisons for the Bonferroni correction.
    #[arg(long, default_value_t = 1)]
    pub comparisons: usize,
    /// Write per-query reciprocal ranks as `qid<TAB>rr`.
    #[arg(long)]
    pub per_query: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OverlapArgs {
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long)]
    pub collection: Option<PathBuf>,
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// Text triples before switching.
    #[arg(long)]
    pub before: Option<PathBuf>,
    /// The same triples after switching, in the same order.
    #[arg(long)]
    pub after: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ToyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 2000)]
    pub concepts: usize,
    #[arg(long, default_value_t = 40)]
    pub topics: usize,
    #[arg(long, value_delimiter = ',', default_value = "de,ru")]
    pub languages: Vec<String>,
    #[arg(long, default_value_t = 600)]
    pub train_queries: usize,
    #[arg(long, default_value_t = 300)]
    pub test_queries: usize,
    #[arg(long, default_value_t = 20)]
    pub candidates: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 400)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 4)]
    pub negatives: usize,
    /// Directory for `monolingual.weights` and `code_switched.weights`.
    #[arg(long)]
    pub weights_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LexiconStatsArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, default_value = "en")]
    pub src_lang: String,
    #[arg(long, default_value = "xx")]
    pub tgt_lang: String,
    /// Parse as parallel titles instead of a single-word lexicon.
    #[arg(long)]
    pub wiki: bool,
    #[arg(long, default_value_t = 3)]
    pub max_n: usize,
    /// Text file whose word tokens are used to measure coverage.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
}
