//! Distributional checks on the seeded samplers: counts must fall inside
//! central 99.9% intervals of their binomial/multinomial expectations.

use std::collections::BTreeMap;

use csir_core::corpus::mix_language_corpus;
use csir_core::{BilingualLexicon, Collection, LexiconSet, Side, Strategy, SwitchPolicy, Switcher};
use statrs::distribution::{ContinuousCDF, Normal};

fn z(coverage: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + coverage / 2.0)
}

fn within(count: usize, n: usize, p: f64, coverage: f64) -> bool {
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - mean).abs() <= z(coverage) * sd
}

fn vocab(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

fn lexicons(langs: &[&str], vocab: &[String]) -> LexiconSet {
    let mut set = LexiconSet::new();
    for lang in langs {
        let mut lex = BilingualLexicon::new("en", *lang);
        for w in vocab {
            lex.insert(w, &format!("{w}-{lang}")).unwrap();
        }
        set.add_bilingual(lang, lex);
    }
    set
}

fn texts(vocab: &[String], n_texts: usize, len: usize) -> Vec<String> {
    (0..n_texts)
        .map(|i| {
            (0..len)
                .map(|j| vocab[(i * 31 + j * 17) % vocab.len()].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

#[test]
fn bilingual_switch_count_is_binomial() {
    let v = vocab(200);
    let set = lexicons(&["de"], &v);
    let pool = vec!["de".to_string()];
    let policy = SwitchPolicy::new(Strategy::Bilingual, 0.5, pool.clone(), pool, 99).unwrap();
    let sw = Switcher::new(policy, &set).unwrap();
    let mut switched = 0;
    let mut total = 0;
    for (i, t) in texts(&v, 1000, 10).iter().enumerate() {
        let o = sw.switch(t, &i.to_string(), Side::Document);
        switched += o.tokens_switched;
        total += o.tokens_eligible;
    }
    assert_eq!(total, 10_000);
    assert!(within(switched, total, 0.5, 0.999), "{switched}");
}

#[test]
fn multilingual_languages_are_uniform() {
    let langs = ["de", "fr", "it", "ru", "fi"];
    let v = vocab(500);
    let set = lexicons(&langs, &v);
    let pool: Vec<String> = langs.iter().map(|s| s.to_string()).collect();
    let policy = SwitchPolicy::new(Strategy::Multilingual, 1.0, pool.clone(), pool, 3).unwrap();
    let sw = Switcher::new(policy, &set).unwrap();
    let mut per: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0;
    for (i, t) in texts(&v, 5000, 20).iter().enumerate() {
        let o = sw.switch(t, &format!("r{i}"), Side::Query);
        total += o.tokens_switched;
        for (l, c) in o.per_language {
            *per.entry(l).or_default() += c;
        }
    }
    assert_eq!(total, 100_000);
    // joint 99.9% coverage over five marginals
    let each = 1.0 - 0.001 / langs.len() as f64;
    for lang in langs {
        let c = per[lang];
        assert!(within(c, total, 0.2, each), "{lang}: {c}");
    }
}

#[test]
fn mixed_collection_share_is_binomial() {
    let ids: Vec<String> = (0..10_000).map(|i| format!("p{i}")).collect();
    let coll = |lang: &str| -> Collection {
        ids.iter().map(|id| (id.clone(), format!("{lang} {id}"))).collect()
    };
    let per = BTreeMap::from([("de".to_string(), coll("de")), ("ru".to_string(), coll("ru"))]);
    let mixed = mix_language_corpus(&per, 17).unwrap();
    assert_eq!(mixed.languages.len(), ids.len());
    let de = mixed.languages.values().filter(|l| *l == "de").count();
    assert!(within(de, ids.len(), 0.5, 0.999), "{de}");
    for (id, text) in mixed.collection.iter() {
        assert!(text.starts_with(mixed.languages[id].as_str()));
    }
}

#[test]
fn seed_changes_the_draws() {
    let v = vocab(50);
    let set = lexicons(&["de"], &v);
    let pool = vec!["de".to_string()];
    let run = |seed| {
        let policy = SwitchPolicy::new(Strategy::Bilingual, 0.5, pool.clone(), pool.clone(), seed).unwrap();
        let sw = Switcher::new(policy, &set).unwrap();
        texts(&v, 20, 10)
            .iter()
            .map(|t| sw.switch(t, t, Side::Query).text)
            .collect::<Vec<_>>()
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));
}
