use std::fmt;

use indexmap::IndexMap;

use super::features::{featurize, FeatureVector, FEATURE_NAMES, NUM_FEATURES};
use crate::corpus::{RunEntry, TextTriple};
use crate::lexicon::BilingualLexicon;
use crate::report::KvBlock;
use crate::stream::stable_hash;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Negatives kept per positive (1:4 by default).
    pub negatives_per_positive: usize,
    /// L2 penalty on the non-bias weights.
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 400,
            seed: 0,
            negatives_per_positive: 4,
            l2: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("learning_rate", self.learning_rate)
            .push("epochs", self.epochs)
            .push("seed", self.seed)
            .push("negatives_per_positive", self.negatives_per_positive)
            .push("l2", self.l2);
        kv
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyRanker {
    pub weights: [f64; NUM_FEATURES],
    pub config: TrainConfig,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn logit(weights: &[f64; NUM_FEATURES], f: &FeatureVector) -> f64 {
    weights.iter().zip(f.to_array()).map(|(w, x)| w * x).sum()
}

impl ToyRanker {
    pub fn untrained(config: TrainConfig) -> Self {
        Self {
            weights: [0.0; NUM_FEATURES],
            config,
        }
    }

    pub fn weight(&self, feature: &str) -> Option<f64> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == feature)
            .map(|i| self.weights[i])
    }

    /// Linear score (the logit).
    pub fn score(&self, f: &FeatureVector) -> f64 {
        logit(&self.weights, f)
    }

    pub fn probability(&self, f: &FeatureVector) -> f64 {
        sigmoid(self.score(f))
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        for (name, w) in FEATURE_NAMES.iter().zip(self.weights) {
            kv.push(format!("weight.{name}"), w);
        }
        kv.extend("train.", &self.config.to_kv());
        kv
    }

    /// Parses the `key=value` form written by [`ToyRanker::to_kv`].
    pub fn from_kv(text: &str) -> Result<Self> {
        let kv = KvBlock::parse(text)
            .ok_or_else(|| Error::Invalid("ranker file is not key=value".into()))?;
        let num = |key: &str| -> Result<f64> {
            kv.get(key)
                .ok_or_else(|| Error::Invalid(format!("ranker file lacks {key}")))?
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("bad value for {key}")))
        };
        let mut weights = [0.0; NUM_FEATURES];
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            weights[i] = num(&format!("weight.{name}"))?;
        }
        let config = TrainConfig {
            learning_rate: num("train.learning_rate")?,
            epochs: num("train.epochs")? as usize,
            seed: kv
                .get("train.seed")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Invalid("bad value for train.seed".into()))?,
            negatives_per_positive: num("train.negatives_per_positive")? as usize,
            l2: num("train.l2")?,
        };
        Ok(Self { weights, config })
    }
}

impl fmt::Display for ToyRanker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, w) in FEATURE_NAMES.iter().zip(self.weights) {
            writeln!(f, "  {name:<14}{w:>10.4}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example {
    pub features: FeatureVector,
    pub label: f64,
}

/// Turns triples into labelled examples: one positive per distinct
/// `(query, positive)` pair and up to `negatives_per_positive` of its
/// negatives, picked by a seeded hash order.
pub fn build_examples(
    triples: &[TextTriple],
    lexicons: &[&BilingualLexicon],
    config: &TrainConfig,
) -> Vec<Example> {
    let mut groups: IndexMap<(&str, &str), Vec<&str>> = IndexMap::new();
    for t in triples {
        let negs = groups.entry((&t.query, &t.positive)).or_default();
        if !negs.contains(&t.negative.as_str()) {
            negs.push(&t.negative);
        }
    }
    let mut examples = Vec::new();
    for ((query, positive), mut negatives) in groups {
        if negatives.len() > config.negatives_per_positive {
            negatives.sort_by_key(|n| (stable_hash(config.seed, n, 0x004e_4547), *n));
            negatives.truncate(config.negatives_per_positive);
        }
        examples.push(Example {
            features: featurize(query, positive, lexicons),
            label: 1.0,
        });
        for n in negatives {
            examples.push(Example {
                features: featurize(query, n, lexicons),
                label: 0.0,
            });
        }
    }
    examples
}

/// Mean logistic loss plus `l2/2 * |w|^2` over the non-bias weights.
pub fn loss(weights: &[f64; NUM_FEATURES], examples: &[Example], l2: f64) -> f64 {
    let data = examples
        .iter()
        .map(|e| {
            let z = logit(weights, &e.features);
            softplus(z) - e.label * z
        })
        .sum::<f64>()
        / examples.len() as f64;
    let penalty: f64 = weights[..NUM_FEATURES - 1].iter().map(|w| w * w).sum();
    data + 0.5 * l2 * penalty
}

/// Analytic gradient of [`loss`].
pub fn gradient(weights: &[f64; NUM_FEATURES], examples: &[Example], l2: f64) -> [f64; NUM_FEATURES] {
    let mut g = [0.0; NUM_FEATURES];
    for e in examples {
        let r = sigmoid(logit(weights, &e.features)) - e.label;
        for (gi, x) in g.iter_mut().zip(e.features.to_array()) {
            *gi += r * x;
        }
    }
    let n = examples.len() as f64;
    for (i, gi) in g.iter_mut().enumerate() {
        *gi /= n;
        if i < NUM_FEATURES - 1 {
            *gi += l2 * weights[i];
        }
    }
    g
}

/// Full-batch gradient descent from zero weights.
pub fn train(
    triples: &[TextTriple],
    lexicons: &[&BilingualLexicon],
    config: &TrainConfig,
) -> Result<ToyRanker> {
    if triples.is_empty() {
        return Err(Error::Invalid("no training triples".into()));
    }
    let examples = build_examples(triples, lexicons, config);
    let mut ranker = ToyRanker::untrained(config.clone());
    for _ in 0..config.epochs {
        let g = gradient(&ranker.weights, &examples, config.l2);
        for (w, gi) in ranker.weights.iter_mut().zip(g) {
            *w -= config.learning_rate * gi;
        }
    }
    Ok(ranker)
}

/// Scores `(docid, text)` candidates and ranks them by score, breaking ties
/// by doc id.
pub fn rerank(
    ranker: &ToyRanker,
    query: &str,
    candidates: &[(&str, &str)],
    lexicons: &[&BilingualLexicon],
    tag: &str,
) -> Vec<RunEntry> {
    let scored: Vec<(&str, f64)> = candidates
        .iter()
        .map(|(id, text)| (*id, ranker.score(&featurize(query, text, lexicons))))
        .collect();
    crate::corpus::rank_by_score(scored, tag)
}
