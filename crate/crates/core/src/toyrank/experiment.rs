//! Synthetic monolingual-overfitting experiment.
//!
//! Words are integer concepts rendered into one surface vocabulary per
//! language (`en17`, `de17`, ...), and every pair of languages gets a
//! perfect concept-level lexicon. Queries draw concepts from one topic; the
//! relevant passage repeats some of them, negatives come from other topics.
//!
//! Ranker A trains on English triples. Ranker B trains on the same triples
//! after multilingual code-switching into the seen languages. Both are then
//! evaluated on a monolingual test (query and passages in one seen
//! language) and a cross-lingual one (query and passages in different
//! seen languages).

use std::fmt;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::FEATURE_NAMES;
use super::model::{rerank, train, ToyRanker, TrainConfig};
use crate::codeswitch::{Strategy, SwitchPolicy, Switcher};
use crate::corpus::{transform_triples, Qrels, Run, TextTriple};
use crate::ireval::mrr_at_k;
use crate::lexicon::{BilingualLexicon, LexiconSet};
use crate::report::KvBlock;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub concepts: usize,
    pub topics: usize,
    pub pivot: String,
    /// Seen languages: the code-switching pool and the test languages.
    pub languages: Vec<String>,
    pub query_len: usize,
    pub doc_len: usize,
    /// Chance that each query concept reappears in the relevant passage.
    pub relevant_overlap: f64,
    /// Chance that a negative passage carries one query concept.
    pub hard_negative_rate: f64,
    pub train_queries: usize,
    pub test_queries: usize,
    /// Candidates per test query, one of them relevant.
    pub candidates: usize,
    /// Code-switching probability for ranker B.
    pub p: f64,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            concepts: 2000,
            topics: 40,
            pivot: "en".into(),
            languages: vec!["de".into(), "ru".into()],
            query_len: 4,
            doc_len: 30,
            relevant_overlap: 0.6,
            hard_negative_rate: 0.3,
            train_queries: 600,
            test_queries: 300,
            candidates: 20,
            p: 0.5,
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("seed", self.seed)
            .push("concepts", self.concepts)
            .push("topics", self.topics)
            .push("pivot", &self.pivot)
            .push("languages", self.languages.join(","))
            .push("query_len", self.query_len)
            .push("doc_len", self.doc_len)
            .push("relevant_overlap", self.relevant_overlap)
            .push("hard_negative_rate", self.hard_negative_rate)
            .push("train_queries", self.train_queries)
            .push("test_queries", self.test_queries)
            .push("candidates", self.candidates)
            .push("p", self.p);
        kv.extend("train.", &self.train.to_kv());
        kv
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub monolingual: ToyRanker,
    pub code_switched: ToyRanker,
    pub moir_a: f64,
    pub clir_a: f64,
    pub moir_b: f64,
    pub clir_b: f64,
}

impl ExperimentReport {
    /// Relative MRR lost by ranker A going from MoIR to CLIR.
    pub fn relative_drop_a(&self) -> f64 {
        if self.moir_a == 0.0 {
            0.0
        } else {
            1.0 - self.clir_a / self.moir_a
        }
    }

    /// CLIR MRR of B minus that of A.
    pub fn clir_margin(&self) -> f64 {
        self.clir_b - self.clir_a
    }

    /// `|moir_b - moir_a| / moir_a`.
    pub fn moir_relative_gap(&self) -> f64 {
        if self.moir_a == 0.0 {
            0.0
        } else {
            (self.moir_b - self.moir_a).abs() / self.moir_a
        }
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("moir.monolingual", format!("{:.6}", self.moir_a))
            .push("clir.monolingual", format!("{:.6}", self.clir_a))
            .push("moir.code_switched", format!("{:.6}", self.moir_b))
            .push("clir.code_switched", format!("{:.6}", self.clir_b))
            .push("relative_drop.monolingual", format!("{:.6}", self.relative_drop_a()))
            .push("clir_margin", format!("{:.6}", self.clir_margin()))
            .push("moir_relative_gap", format!("{:.6}", self.moir_relative_gap()));
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            kv.push(format!("weight.monolingual.{name}"), self.monolingual.weights[i]);
            kv.push(format!("weight.code_switched.{name}"), self.code_switched.weights[i]);
        }
        kv
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16}{:>10}{:>10}", "ranker", "MoIR", "CLIR")?;
        writeln!(f, "{:<16}{:>10.4}{:>10.4}", "monolingual", self.moir_a, self.clir_a)?;
        writeln!(f, "{:<16}{:>10.4}{:>10.4}", "code-switched", self.moir_b, self.clir_b)?;
        writeln!(f)?;
        writeln!(f, "{:<16}{:>14}{:>14}", "weight", "monolingual", "code-switched")?;
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            writeln!(
                f,
                "{:<16}{:>14.4}{:>14.4}",
                name, self.monolingual.weights[i], self.code_switched.weights[i]
            )?;
        }
        Ok(())
    }
}

struct Generator<'c> {
    config: &'c ExperimentConfig,
    rng: ChaCha8Rng,
}

/// One query with its relevant passage and negatives, as concept ids.
struct Instance {
    query: Vec<usize>,
    relevant: Vec<usize>,
    negatives: Vec<Vec<usize>>,
}

impl Generator<'_> {
    fn topic_concept(&mut self, topic: usize) -> usize {
        let per_topic = self.config.concepts / self.config.topics;
        topic + self.config.topics * self.rng.random_range(0..per_topic)
    }

    fn any_concept(&mut self) -> usize {
        self.rng.random_range(0..self.config.concepts)
    }

    /// Half topical filler, half background.
    fn passage(&mut self, topic: usize, mut words: Vec<usize>) -> Vec<usize> {
        while words.len() < self.config.doc_len {
            let w = if self.rng.random_bool(0.5) {
                self.topic_concept(topic)
            } else {
                self.any_concept()
            };
            words.push(w);
        }
        words.shuffle(&mut self.rng);
        words
    }

    fn instance(&mut self, negatives: usize) -> Instance {
        let topics = self.config.topics;
        let topic = self.rng.random_range(0..topics);
        let mut query = Vec::with_capacity(self.config.query_len);
        while query.len() < self.config.query_len {
            let c = self.topic_concept(topic);
            if !query.contains(&c) {
                query.push(c);
            }
        }
        let kept: Vec<usize> = query
            .iter()
            .copied()
            .filter(|_| self.rng.random_bool(self.config.relevant_overlap))
            .collect();
        let relevant = self.passage(topic, kept);
        let negatives = (0..negatives)
            .map(|_| {
                let other = (topic + 1 + self.rng.random_range(0..topics - 1)) % topics;
                let mut seed_words = Vec::new();
                if self.rng.random_bool(self.config.hard_negative_rate) {
                    seed_words.push(*query.choose(&mut self.rng).expect("query is non-empty"));
                }
                self.passage(other, seed_words)
            })
            .collect();
        Instance {
            query,
            relevant,
            negatives,
        }
    }
}

fn render(lang: &str, concepts: &[usize]) -> String {
    concepts
        .iter()
        .map(|c| format!("{lang}{c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Concept-level lexicons between every ordered pair of languages.
fn concept_lexicons(langs: &[&str], concepts: usize) -> Result<Vec<BilingualLexicon>> {
    let mut out = Vec::new();
    for src in langs {
        for tgt in langs {
            if src == tgt {
                continue;
            }
            let mut lex = BilingualLexicon::new(*src, *tgt);
            for c in 0..concepts {
                lex.insert(&format!("{src}{c}"), &format!("{tgt}{c}"))?;
            }
            out.push(lex);
        }
    }
    Ok(out)
}

fn evaluate(
    ranker: &ToyRanker,
    test: &[Instance],
    query_lang: &str,
    doc_lang: &str,
    lexicons: &[&BilingualLexicon],
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut run = Run::new();
    let mut qrels = Qrels::new();
    for (qi, inst) in test.iter().enumerate() {
        let qid = format!("q{qi}");
        let query = render(query_lang, &inst.query);
        // shuffled doc ids so the id tie-break carries no signal
        let mut slots: Vec<usize> = (0..=inst.negatives.len()).collect();
        slots.shuffle(rng);
        let texts: Vec<(String, String)> = std::iter::once(&inst.relevant)
            .chain(&inst.negatives)
            .zip(&slots)
            .map(|(doc, slot)| (format!("{qid}-d{slot:03}"), render(doc_lang, doc)))
            .collect();
        qrels.insert(&qid, &texts[0].0, 1)?;
        let candidates: Vec<(&str, &str)> =
            texts.iter().map(|(i, t)| (i.as_str(), t.as_str())).collect();
        for e in rerank(ranker, &query, &candidates, lexicons, "toy") {
            run.push(&qid, e)?;
        }
    }
    Ok(mrr_at_k(&run, &qrels, 10)?.mrr)
}

pub fn run_overfitting_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.languages.is_empty() || config.topics < 2 || config.concepts < config.topics {
        return Err(crate::Error::Invalid(
            "experiment needs at least one seen language, two topics and a concept per topic".into(),
        ));
    }
    let mut gen = Generator {
        config,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };
    let negatives_per_query = config.train.negatives_per_positive.max(1);
    let train_set: Vec<Instance> = (0..config.train_queries)
        .map(|_| gen.instance(negatives_per_query))
        .collect();
    let test_set: Vec<Instance> = (0..config.test_queries)
        .map(|_| gen.instance(config.candidates.saturating_sub(1).max(1)))
        .collect();

    let pivot = config.pivot.as_str();
    let mut triples = Vec::new();
    for inst in &train_set {
        let q = render(pivot, &inst.query);
        let pos = render(pivot, &inst.relevant);
        for neg in &inst.negatives {
            triples.push(TextTriple::new(q.clone(), pos.clone(), render(pivot, neg)));
        }
    }

    let mut langs: Vec<&str> = vec![pivot];
    langs.extend(config.languages.iter().map(String::as_str));
    let lexicons = concept_lexicons(&langs, config.concepts)?;
    let lex_refs: Vec<&BilingualLexicon> = lexicons.iter().collect();

    let mut switch_set = LexiconSet::new();
    for lex in lexicons.iter().filter(|l| l.src_lang == pivot) {
        switch_set.add_bilingual(&lex.tgt_lang, lex.clone());
    }
    let policy = SwitchPolicy::new(
        Strategy::Multilingual,
        config.p,
        config.languages.clone(),
        config.languages.clone(),
        config.seed,
    )?;
    let switcher = Switcher::new(policy, &switch_set)?;
    let (switched, _) = transform_triples(&triples, &switcher);

    let monolingual = train(&triples, &lex_refs, &config.train)?;
    let code_switched = train(&switched, &lex_refs, &config.train)?;

    let moir_lang = config.languages[0].as_str();
    let clir_doc_lang = config.languages.get(1).map_or(pivot, String::as_str);
    // every evaluation replays the same candidate id shuffles
    let eval_seed = config.seed ^ 0x7e57;
    let eval = |r: &ToyRanker, q: &str, d: &str| {
        evaluate(r, &test_set, q, d, &lex_refs, &mut ChaCha8Rng::seed_from_u64(eval_seed))
    };
    let moir_a = eval(&monolingual, moir_lang, moir_lang)?;
    let moir_b = eval(&code_switched, moir_lang, moir_lang)?;
    let clir_a = eval(&monolingual, moir_lang, clir_doc_lang)?;
    let clir_b = eval(&code_switched, moir_lang, clir_doc_lang)?;

    Ok(ExperimentReport {
        config: config.clone(),
        monolingual,
        code_switched,
        moir_a,
        clir_a,
        moir_b,
        clir_b,
    })
}
