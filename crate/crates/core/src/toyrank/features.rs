use std::collections::HashSet;

use crate::lexicon::BilingualLexicon;
use crate::tokenize::{fold, folded_words};

pub const NUM_FEATURES: usize = 5;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "exact_match",
    "lexicon_match",
    "query_length",
    "doc_length",
    "bias",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Distinct query types present in the document.
    pub exact_match: f64,
    /// Distinct query types absent from the document whose translation under
    /// some lexicon is present.
    pub lexicon_match: f64,
    /// `ln(1 + query word tokens)`.
    pub query_length: f64,
    /// `ln(1 + document word tokens)`.
    pub doc_length: f64,
    pub bias: f64,
}

impl FeatureVector {
    pub fn to_array(self) -> [f64; NUM_FEATURES] {
        [
            self.exact_match,
            self.lexicon_match,
            self.query_length,
            self.doc_length,
            self.bias,
        ]
    }

    pub fn from_array(a: [f64; NUM_FEATURES]) -> Self {
        Self {
            exact_match: a[0],
            lexicon_match: a[1],
            query_length: a[2],
            doc_length: a[3],
            bias: a[4],
        }
    }
}

pub fn featurize(query: &str, doc: &str, lexicons: &[&BilingualLexicon]) -> FeatureVector {
    let q_tokens = folded_words(query);
    let d_tokens = folded_words(doc);
    let doc_types: HashSet<&str> = d_tokens.iter().map(String::as_str).collect();
    let query_types: HashSet<&str> = q_tokens.iter().map(String::as_str).collect();

    let mut exact = 0usize;
    let mut via_lexicon = 0usize;
    for t in &query_types {
        if doc_types.contains(t) {
            exact += 1;
        } else if lexicons
            .iter()
            .filter_map(|lex| lex.lookup(t))
            .any(|target| translation_present(target, &doc_types))
        {
            via_lexicon += 1;
        }
    }
    FeatureVector {
        exact_match: exact as f64,
        lexicon_match: via_lexicon as f64,
        query_length: (1.0 + q_tokens.len() as f64).ln(),
        doc_length: (1.0 + d_tokens.len() as f64).ln(),
        bias: 1.0,
    }
}

/// A multi-word translation counts when all of its words occur.
fn translation_present(target: &str, doc_types: &HashSet<&str>) -> bool {
    let folded = fold(target);
    let mut words = folded.split_whitespace().peekable();
    words.peek().is_some() && words.all(|w| doc_types.contains(w))
}
