//! Artificial code-switching of monolingual text with bilingual lexicons.
//!
//! Four strategies are supported:
//!
//! * **bilingual**: each word token is translated into a fixed language with
//!   probability `p`;
//! * **multilingual**: as bilingual, but each switched token draws its target
//!   language uniformly from a pool;
//! * **wiki**: one language per text, longest-first n-gram replacement
//!   (n = 3, 2, 1) with a title lexicon;
//! * **translate-test**: bilingual with `p = 1`.
//!
//! Decisions are taken per token occurrence. A token whose Bernoulli draw
//! succeeds but has no lexicon entry stays as it is; there is no retry.
//! Replacement strings are inserted verbatim, so multi-word targets and the
//! target's casing carry through.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::lexicon::{BilingualLexicon, LexiconSet, NGramLexicon};
use crate::report::KvBlock;
use crate::stream::{RecordStream, Side};
use crate::tokenize::{tokenize, Token, TokenKind};
use crate::{Error, Result};

/// Default translation probability.
pub const DEFAULT_P: f64 = 0.5;

/// Word-token index used for the per-text language draw of the wiki strategy.
const TEXT_LANGUAGE_INDEX: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Bilingual,
    Multilingual,
    Wiki,
    TranslateTest,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Bilingual => "bl",
            Strategy::Multilingual => "ml",
            Strategy::Wiki => "wiki",
            Strategy::TranslateTest => "translate-test",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bl" | "bilingual" => Ok(Strategy::Bilingual),
            "ml" | "multilingual" => Ok(Strategy::Multilingual),
            "wiki" => Ok(Strategy::Wiki),
            "translate-test" | "tt" => Ok(Strategy::TranslateTest),
            other => Err(Error::InvalidPolicy(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchPolicy {
    pub strategy: Strategy,
    pub p: f64,
    pub query_langs: Vec<String>,
    pub doc_langs: Vec<String>,
    pub seed: u64,
}

impl SwitchPolicy {
    /// Validates and builds a policy. Translate-test always runs at `p = 1`.
    pub fn new(
        strategy: Strategy,
        p: f64,
        query_langs: Vec<String>,
        doc_langs: Vec<String>,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPolicy(format!("p must lie in [0, 1], got {p}")));
        }
        if query_langs.is_empty() || doc_langs.is_empty() {
            return Err(Error::InvalidPolicy("language pools must be non-empty".into()));
        }
        if matches!(strategy, Strategy::Bilingual | Strategy::TranslateTest)
            && (query_langs.len() != 1 || doc_langs.len() != 1)
        {
            return Err(Error::InvalidPolicy(format!(
                "{strategy} takes exactly one language per side"
            )));
        }
        let p = if strategy == Strategy::TranslateTest { 1.0 } else { p };
        Ok(Self {
            strategy,
            p,
            query_langs,
            doc_langs,
            seed,
        })
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("strategy", self.strategy)
            .push("p", self.p)
            .push("query_langs", self.query_langs.join(","))
            .push("doc_langs", self.doc_langs.join(","))
            .push("seed", self.seed);
        kv
    }
}

/// Result of switching one text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwitchOutcome {
    pub text: String,
    /// Non-space tokens (words and punctuation).
    pub tokens_total: usize,
    /// Word tokens.
    pub tokens_eligible: usize,
    /// Word tokens the consulted lexicon could translate.
    pub tokens_covered: usize,
    /// Word tokens actually replaced.
    pub tokens_switched: usize,
    /// Replacement events; equals `tokens_switched` except for n-gram hits.
    pub replacements: usize,
    /// Switched word tokens per target language.
    pub per_language: BTreeMap<String, usize>,
}

impl SwitchOutcome {
    fn unchanged(text: &str, tokens: &[Token<'_>]) -> Self {
        let mut out = Self {
            text: text.to_string(),
            ..Self::default()
        };
        out.count(tokens);
        out
    }

    fn count(&mut self, tokens: &[Token<'_>]) {
        for t in tokens {
            match t.kind {
                TokenKind::Word => {
                    self.tokens_total += 1;
                    self.tokens_eligible += 1;
                }
                TokenKind::Punct => self.tokens_total += 1,
                TokenKind::Space => {}
            }
        }
    }

    fn record(&mut self, lang: &str, n: usize) {
        self.tokens_switched += n;
        self.replacements += 1;
        *self.per_language.entry(lang.to_string()).or_default() += n;
    }
}

/// Running totals over many outcomes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwitchStats {
    pub texts: usize,
    pub texts_with_switch: usize,
    pub tokens_total: usize,
    pub tokens_eligible: usize,
    pub tokens_covered: usize,
    pub tokens_switched: usize,
    pub replacements: usize,
    pub per_language: BTreeMap<String, usize>,
}

impl SwitchStats {
    pub fn absorb(&mut self, o: &SwitchOutcome) {
        self.texts += 1;
        if o.replacements > 0 {
            self.texts_with_switch += 1;
        }
        self.tokens_total += o.tokens_total;
        self.tokens_eligible += o.tokens_eligible;
        self.tokens_covered += o.tokens_covered;
        self.tokens_switched += o.tokens_switched;
        self.replacements += o.replacements;
        for (lang, n) in &o.per_language {
            *self.per_language.entry(lang.clone()).or_default() += n;
        }
    }

    pub fn merge(&mut self, other: &SwitchStats) {
        self.texts += other.texts;
        self.texts_with_switch += other.texts_with_switch;
        self.tokens_total += other.tokens_total;
        self.tokens_eligible += other.tokens_eligible;
        self.tokens_covered += other.tokens_covered;
        self.tokens_switched += other.tokens_switched;
        self.replacements += other.replacements;
        for (lang, n) in &other.per_language {
            *self.per_language.entry(lang.clone()).or_default() += n;
        }
    }

    /// Switched word tokens over word tokens.
    pub fn switch_rate(&self) -> f64 {
        ratio(self.tokens_switched, self.tokens_eligible)
    }

    pub fn coverage(&self) -> f64 {
        ratio(self.tokens_covered, self.tokens_eligible)
    }

    /// Fraction of texts with at least one replacement.
    pub fn text_switch_fraction(&self) -> f64 {
        ratio(self.texts_with_switch, self.texts)
    }

    pub fn to_kv(&self) -> KvBlock {
        let mut kv = KvBlock::new();
        kv.push("texts", self.texts)
            .push("texts_with_switch", self.texts_with_switch)
            .push("text_switch_fraction", fmt_f(self.text_switch_fraction()))
            .push("tokens_total", self.tokens_total)
            .push("tokens_eligible", self.tokens_eligible)
            .push("tokens_covered", self.tokens_covered)
            .push("tokens_switched", self.tokens_switched)
            .push("replacements", self.replacements)
            .push("coverage", fmt_f(self.coverage()))
            .push("switch_rate", fmt_f(self.switch_rate()));
        for (lang, n) in &self.per_language {
            kv.push(format!("switched_{lang}"), n);
        }
        kv
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

/// Translates each word token with probability `p` using one lexicon.
pub fn switch_bilingual(
    text: &str,
    lex: &BilingualLexicon,
    p: f64,
    stream: &RecordStream,
) -> SwitchOutcome {
    switch_per_token(text, &[lex], p, stream)
}

/// Translates each word token with probability `p` into a language drawn
/// uniformly from `lexicons`. With a single lexicon this is exactly
/// [`switch_bilingual`].
pub fn switch_multilingual(
    text: &str,
    lexicons: &[&BilingualLexicon],
    p: f64,
    stream: &RecordStream,
) -> SwitchOutcome {
    switch_per_token(text, lexicons, p, stream)
}

/// Translates every covered word token; uncovered tokens pass through.
pub fn translate_test(text: &str, lex: &BilingualLexicon) -> SwitchOutcome {
    // p = 1 makes every Bernoulli draw succeed regardless of the stream
    let stream = RecordStream::new(0, "", Side::Query);
    switch_per_token(text, &[lex], 1.0, &stream)
}

fn switch_per_token(
    text: &str,
    lexicons: &[&BilingualLexicon],
    p: f64,
    stream: &RecordStream,
) -> SwitchOutcome {
    let tokens = tokenize(text);
    if lexicons.is_empty() {
        return SwitchOutcome::unchanged(text, &tokens);
    }
    let mut out = SwitchOutcome::default();
    out.count(&tokens);
    let mut buf = String::with_capacity(text.len() + text.len() / 2);
    let mut word_index = 0u64;
    for t in &tokens {
        if !t.is_word() {
            buf.push_str(t.surface);
            continue;
        }
        let i = word_index;
        word_index += 1;
        let lex = if lexicons.len() == 1 {
            lexicons[0]
        } else {
            lexicons[stream.choose(i, lexicons.len())]
        };
        match lex.lookup(t.surface) {
            Some(target) => {
                out.tokens_covered += 1;
                if stream.bernoulli(i, p) {
                    buf.push_str(target);
                    out.record(&lex.tgt_lang, 1);
                } else {
                    buf.push_str(t.surface);
                }
            }
            None => buf.push_str(t.surface),
        }
    }
    out.text = buf;
    out
}

/// Longest-first n-gram replacement with one language drawn for the whole
/// text. Windows consist of word tokens separated only by whitespace and
/// never overlap.
pub fn switch_wiki(text: &str, lexicons: &[&NGramLexicon], stream: &RecordStream) -> SwitchOutcome {
    let tokens = tokenize(text);
    if lexicons.is_empty() {
        return SwitchOutcome::unchanged(text, &tokens);
    }
    let lex = lexicons[stream.choose(TEXT_LANGUAGE_INDEX, lexicons.len())];
    let mut out = SwitchOutcome::default();
    out.count(&tokens);
    if lex.is_empty() {
        out.text = text.to_string();
        return out;
    }

    // word token positions, and for each the length of the whitespace-only
    // joined run starting there
    let word_pos: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_word())
        .map(|(i, _)| i)
        .collect();
    let joined_with_next: Vec<bool> = word_pos
        .windows(2)
        .map(|w| (w[0] + 1..w[1]).all(|k| tokens[k].kind == TokenKind::Space))
        .chain(std::iter::once(false))
        .collect();

    let mut buf = String::with_capacity(text.len() + text.len() / 2);
    let mut cursor = 0usize; // next token to copy
    let mut w = 0usize;
    let mut window: Vec<&str> = Vec::with_capacity(lex.max_n());
    while w < word_pos.len() {
        let mut run = 1;
        while run < lex.max_n() && w + run < word_pos.len() && joined_with_next[w + run - 1] {
            run += 1;
        }
        let mut hit = None;
        for n in (1..=run).rev() {
            window.clear();
            window.extend(word_pos[w..w + n].iter().map(|&k| tokens[k].surface));
            if let Some(target) = lex.lookup(&window) {
                hit = Some((n, target));
                break;
            }
        }
        match hit {
            Some((n, target)) => {
                let first = word_pos[w];
                let last = word_pos[w + n - 1];
                for t in &tokens[cursor..first] {
                    buf.push_str(t.surface);
                }
                buf.push_str(target);
                cursor = last + 1;
                out.tokens_covered += n;
                out.record(&lex.tgt_lang, n);
                w += n;
            }
            None => w += 1,
        }
    }
    for t in &tokens[cursor..] {
        buf.push_str(t.surface);
    }
    out.text = buf;
    out
}

/// Both sides of a switched query/document pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOutcome {
    pub query: SwitchOutcome,
    pub doc: SwitchOutcome,
}

/// A policy bound to its resolved lexicons.
#[derive(Debug, Clone)]
pub struct Switcher<'a> {
    policy: SwitchPolicy,
    query_bl: Vec<&'a BilingualLexicon>,
    doc_bl: Vec<&'a BilingualLexicon>,
    query_ng: Vec<&'a NGramLexicon>,
    doc_ng: Vec<&'a NGramLexicon>,
}

impl<'a> Switcher<'a> {
    /// Resolves every pooled language against `lexicons`; a missing lexicon
    /// is an error here rather than mid-stream.
    pub fn new(policy: SwitchPolicy, lexicons: &'a LexiconSet) -> Result<Self> {
        let mut s = Self {
            policy,
            query_bl: Vec::new(),
            doc_bl: Vec::new(),
            query_ng: Vec::new(),
            doc_ng: Vec::new(),
        };
        if s.policy.strategy == Strategy::Wiki {
            s.query_ng = resolve(&s.policy.query_langs, |l| lexicons.ngram(l))?;
            s.doc_ng = resolve(&s.policy.doc_langs, |l| lexicons.ngram(l))?;
        } else {
            s.query_bl = resolve(&s.policy.query_langs, |l| lexicons.bilingual(l))?;
            s.doc_bl = resolve(&s.policy.doc_langs, |l| lexicons.bilingual(l))?;
        }
        Ok(s)
    }

    pub fn policy(&self) -> &SwitchPolicy {
        &self.policy
    }

    /// Switches one text. `side` selects the language pool (`Query` uses the
    /// query pool, anything else the document pool) and the random stream.
    pub fn switch(&self, text: &str, record_id: &str, side: Side) -> SwitchOutcome {
        let stream = RecordStream::new(self.policy.seed, record_id, side);
        let query_side = side == Side::Query;
        match self.policy.strategy {
            Strategy::Wiki => {
                let pool = if query_side { &self.query_ng } else { &self.doc_ng };
                switch_wiki(text, pool, &stream)
            }
            _ => {
                let pool = if query_side { &self.query_bl } else { &self.doc_bl };
                switch_per_token(text, pool, self.policy.p, &stream)
            }
        }
    }

    pub fn switch_pair(&self, query: &str, doc: &str, record_id: &str) -> PairOutcome {
        PairOutcome {
            query: self.switch(query, record_id, Side::Query),
            doc: self.switch(doc, record_id, Side::Document),
        }
    }
}

fn resolve<'a, T>(
    langs: &[String],
    get: impl Fn(&str) -> Result<&'a T>,
) -> Result<Vec<&'a T>> {
    langs.iter().map(|l| get(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon(tgt: &str, pairs: &[(&str, &str)]) -> BilingualLexicon {
        let mut lex = BilingualLexicon::new("en", tgt);
        for (s, t) in pairs {
            lex.insert(s, t).unwrap();
        }
        lex
    }

    fn full_coverage(tgt: &str, words: &[&str]) -> BilingualLexicon {
        let mut lex = BilingualLexicon::new("en", tgt);
        for w in words {
            lex.insert(w, &format!("{w}_{tgt}")).unwrap();
        }
        lex
    }

    fn ngram(tgt: &str, pairs: &[(&str, &str)]) -> NGramLexicon {
        let mut lex = NGramLexicon::new("en", tgt, 3);
        for (s, t) in pairs {
            assert!(lex.insert(s, t));
        }
        lex
    }

    const QUERY: &str = "What is an affinity credit card program?";

    #[test]
    fn zero_probability_is_identity() {
        let lex = full_coverage("de", &["what", "is", "an", "affinity", "credit", "card", "program"]);
        for seed in 0..20 {
            let s = RecordStream::new(seed, "r", Side::Query);
            let out = switch_bilingual(QUERY, &lex, 0.0, &s);
            assert_eq!(out.text, QUERY);
            assert_eq!(out.tokens_switched, 0);
            assert_eq!(out.tokens_eligible, 7);
            assert_eq!(out.tokens_covered, 7);
            assert_eq!(out.tokens_total, 8);
        }
    }

    #[test]
    fn full_probability_switches_everything() {
        let lex = full_coverage("de", &["what", "is", "an", "affinity", "credit", "card", "program"]);
        let s = RecordStream::new(1, "r", Side::Query);
        let out = switch_bilingual(QUERY, &lex, 1.0, &s);
        assert_eq!(
            out.text,
            "what_de is_de an_de affinity_de credit_de card_de program_de?"
        );
        assert_eq!(out.tokens_switched, 7);
        assert_eq!(out.per_language["de"], 7);
    }

    #[test]
    fn bernoulli_miss_is_not_retried() {
        let lex = lexicon("de", &[("card", "Karte")]);
        let s = RecordStream::new(1, "r", Side::Query);
        let out = switch_bilingual("credit card", &lex, 1.0, &s);
        assert_eq!(out.text, "credit Karte");
        assert_eq!((out.tokens_eligible, out.tokens_covered, out.tokens_switched), (2, 1, 1));
    }

    #[test]
    fn multilingual_single_pool_equals_bilingual() {
        let lex = full_coverage("ru", &["use", "your", "paypal", "plus", "credit", "card"]);
        let text = "Use your PayPal Plus credit card to deposit funds.";
        for seed in 0..50 {
            let s = RecordStream::new(seed, "867890", Side::Document);
            assert_eq!(
                switch_multilingual(text, &[&lex], 0.5, &s),
                switch_bilingual(text, &lex, 0.5, &s)
            );
        }
    }

    #[test]
    fn multilingual_mixes_languages() {
        let words = ["what", "is", "an", "affinity", "credit", "card", "program"];
        let lexes: Vec<_> = ["de", "ru", "it", "nl", "ar"]
            .iter()
            .map(|l| full_coverage(l, &words))
            .collect();
        let refs: Vec<_> = lexes.iter().collect();
        let s = RecordStream::new(3, "711253", Side::Query);
        let out = switch_multilingual(QUERY, &refs, 1.0, &s);
        assert_eq!(out.tokens_switched, 7);
        assert!(out.per_language.len() >= 3, "{:?}", out.per_language);
    }

    #[test]
    fn wiki_prefers_the_bigram() {
        let lex = ngram("it", &[("credit card", "carta di credito"), ("card", "carta")]);
        let s = RecordStream::new(0, "r", Side::Document);
        let out = switch_wiki(
            "Use your PayPal Plus credit card to deposit funds.",
            &[&lex],
            &s,
        );
        assert_eq!(out.text, "Use your PayPal Plus carta di credito to deposit funds.");
        assert_eq!(out.replacements, 1);
        assert_eq!(out.tokens_switched, 2);
    }

    #[test]
    fn wiki_windows_do_not_overlap() {
        let lex = ngram("xx", &[("a b c", "ABC"), ("b c", "BC")]);
        let s = RecordStream::new(0, "r", Side::Query);
        let out = switch_wiki("a b c", &[&lex], &s);
        assert_eq!(out.text, "ABC");
        assert_eq!(out.replacements, 1);
    }

    #[test]
    fn wiki_windows_stop_at_punctuation() {
        let lex = ngram("it", &[("credit card", "carta di credito"), ("card", "carta")]);
        let s = RecordStream::new(0, "r", Side::Query);
        assert_eq!(switch_wiki("credit, card", &[&lex], &s).text, "credit, carta");
        assert_eq!(
            switch_wiki("Credit  Card!", &[&lex], &s).text,
            "carta di credito!"
        );
    }

    #[test]
    fn wiki_with_empty_lexicons_is_identity() {
        let empty = NGramLexicon::new("en", "de", 3);
        let s = RecordStream::new(0, "r", Side::Query);
        assert_eq!(switch_wiki(QUERY, &[&empty], &s).text, QUERY);
        assert_eq!(switch_wiki(QUERY, &[], &s).text, QUERY);
    }

    #[test]
    fn wiki_unigrams_only_equals_full_substitution() {
        let pairs = [("credit", "Kredit"), ("card", "Karte"), ("program", "Programm")];
        let ng = ngram("de", &pairs);
        let bl = lexicon("de", &pairs);
        let s = RecordStream::new(0, "r", Side::Query);
        assert_eq!(switch_wiki(QUERY, &[&ng], &s).text, translate_test(QUERY, &bl).text);
    }

    #[test]
    fn wiki_uses_a_single_language_per_text() {
        let de = ngram("de", &[("credit", "Kredit"), ("card", "Karte")]);
        let it = ngram("it", &[("credit", "credito"), ("card", "carta")]);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..40 {
            let s = RecordStream::new(seed, "r", Side::Query);
            let out = switch_wiki("credit card", &[&de, &it], &s);
            assert_eq!(out.per_language.len(), 1);
            seen.extend(out.per_language.keys().cloned());
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn translate_test_partial_coverage() {
        let lex = lexicon("en", &[("was", "what"), ("ist", "is"), ("ein", "a")]);
        let out = translate_test("Was ist ein Affinity-Kreditkartenprogramm?", &lex);
        assert_eq!(out.text, "what is a Affinity-Kreditkartenprogramm?");
        assert_eq!(out.tokens_switched, 3);
        let oov = translate_test("nothing here", &lex);
        assert_eq!(oov.text, "nothing here");
        assert_eq!(oov.tokens_switched, 0);
    }

    #[test]
    fn punctuation_is_never_modified() {
        let lex = lexicon("xx", &[("?", "Q"), ("a", "b")]);
        let s = RecordStream::new(0, "r", Side::Query);
        assert_eq!(switch_bilingual("a? a.", &lex, 1.0, &s).text, "b? b.");
    }

    #[test]
    fn policy_validation() {
        let one = || vec!["de".to_string()];
        assert!(SwitchPolicy::new(Strategy::Bilingual, 1.5, one(), one(), 0).is_err());
        assert!(SwitchPolicy::new(Strategy::Bilingual, 0.5, vec![], one(), 0).is_err());
        assert!(SwitchPolicy::new(
            Strategy::Bilingual,
            0.5,
            vec!["de".into(), "ru".into()],
            one(),
            0
        )
        .is_err());
        let tt = SwitchPolicy::new(Strategy::TranslateTest, 0.3, one(), one(), 0).unwrap();
        assert_eq!(tt.p, 1.0);
        assert!(SwitchPolicy::new(
            Strategy::Multilingual,
            0.5,
            vec!["de".into(), "ru".into()],
            one(),
            0
        )
        .is_ok());
        assert_eq!("translate-test".parse::<Strategy>().unwrap(), Strategy::TranslateTest);
        assert!("nope".parse::<Strategy>().is_err());
    }

    #[test]
    fn switcher_reports_missing_lexicon() {
        let mut set = LexiconSet::new();
        set.add_bilingual("de", lexicon("de", &[]));
        let policy = SwitchPolicy::new(
            Strategy::Bilingual,
            0.5,
            vec!["de".into()],
            vec!["ru".into()],
            1,
        )
        .unwrap();
        assert!(matches!(Switcher::new(policy, &set), Err(Error::MissingLexicon(l)) if l == "ru"));
    }

    #[test]
    fn switch_pair_uses_side_pools() {
        let words = ["what", "is", "an", "affinity", "credit", "card", "program", "use", "your"];
        let mut set = LexiconSet::new();
        set.add_bilingual("de", full_coverage("de", &words));
        set.add_bilingual("ru", full_coverage("ru", &words));
        let policy = SwitchPolicy::new(
            Strategy::Bilingual,
            0.5,
            vec!["de".into()],
            vec!["ru".into()],
            42,
        )
        .unwrap();
        let sw = Switcher::new(policy, &set).unwrap();
        let out = sw.switch_pair(QUERY, "Use your credit card program", "711253");
        assert!(out.query.per_language.keys().all(|l| l == "de"));
        assert!(out.doc.per_language.keys().all(|l| l == "ru"));
        assert_eq!(out, sw.switch_pair(QUERY, "Use your credit card program", "711253"));
    }
}
