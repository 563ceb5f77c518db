//! A small logistic relevance scorer over lexical features.
//!
//! Two features compete: `exact_match` (query types found verbatim in the
//! document) and `lexicon_match` (query types whose translation is found in
//! the document). A ranker trained on monolingual pairs only ever sees the
//! first one fire, so it has nothing to go on once query and document are in
//! different languages. [`experiment`] builds synthetic data to show this and
//! to show that training on code-switched pairs repairs it.

mod experiment;
mod features;
mod model;

pub use experiment::{run_overfitting_experiment, ExperimentConfig, ExperimentReport};
pub use features::{featurize, FeatureVector, FEATURE_NAMES, NUM_FEATURES};
pub use model::{
    build_examples, gradient, loss, rerank, sigmoid, train, Example, ToyRanker, TrainConfig,
};
