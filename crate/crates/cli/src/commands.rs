use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use csir_core::corpus::{
    read_collection, read_qrels, read_queries, read_run, read_text_triples, transform_id_records,
    transform_text_triples, write_collection, RecordKind, TransformReport,
};
use csir_core::embedspace::{induce_pairs, write_pairs};
use csir_core::ireval::{bucket_queries, mrr_at_k, overlap_reduction, paired_t_test};
use csir_core::lexicon::{parse_wiki_titles, Lookup};
use csir_core::toyrank::{run_overfitting_experiment, ExperimentConfig, TrainConfig};
use csir_core::{
    tokenize, BilingualLexicon, EmbeddingSpace, KvBlock, LexiconSet, Strategy, SwitchPolicy,
    Switcher,
};

use crate::args::{
    CodeSwitchArgs, EvalArgs, InduceArgs, InputKind, LexiconStatsArgs, MixArgs, OverlapArgs,
    StrategyArg, ToyArgs,
};

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn split_pair(pair_arg: &str, flag: &str) -> Result<(String, String)> {
    match pair_arg.split_once('=') {
        Some((lang, path)) if !lang.is_empty() && !path.is_empty() => {
            Ok((lang.to_string(), path.to_string()))
        }
        _ => bail!("{flag} expects LANG=PATH, got {pair_arg:?}"),
    }
}

fn require_seed(seed: Option<u64>, command: &str) -> Result<u64> {
    seed.with_context(|| format!("{command} is randomized; pass --seed"))
}

pub fn induce_lexicon(a: &InduceArgs, out: &mut dyn Write) -> Result<()> {
    let src = EmbeddingSpace::load(&a.src, &a.src_lang, a.limit)?;
    let tgt = EmbeddingSpace::load(&a.tgt, &a.tgt_lang, a.limit)?;
    log::info!("loaded {} source and {} target vectors", src.len(), tgt.len());
    let pairs = induce_pairs(&src, &tgt)?;
    let mut w = create(&a.out)?;
    write_pairs(&src, &tgt, &pairs, &mut w)?;
    w.flush()?;
    let lex = BilingualLexicon::read_tsv(&a.out, &a.src_lang, &a.tgt_lang)?;
    let mut kv = KvBlock::new();
    kv.push("source_terms", src.len())
        .push("target_terms", tgt.len())
        .push("dim", src.dim())
        .push("pairs", pairs.len());
    kv.extend("lexicon.", &lex.stats().to_kv());
    write!(out, "{kv}")?;
    Ok(())
}

fn strategy(s: StrategyArg) -> Strategy {
    match s {
        StrategyArg::Bl => Strategy::Bilingual,
        StrategyArg::Ml => Strategy::Multilingual,
        StrategyArg::Wiki => Strategy::Wiki,
        StrategyArg::TranslateTest => Strategy::TranslateTest,
    }
}

fn load_lexicons(a: &CodeSwitchArgs) -> Result<LexiconSet> {
    let mut set = LexiconSet::new();
    for pair_arg in &a.lexicons {
        let (lang, path) = split_pair(pair_arg, "--lexicon")?;
        if a.strategy == StrategyArg::Wiki {
            let (lex, report) = parse_wiki_titles(&path, &a.source_lang, &lang, a.max_n)?;
            for (k, v) in report.to_kv().iter() {
                eprintln!("# lexicon.{lang}.{k}={v}");
            }
            set.add_ngram(&lang, lex);
        } else {
            let lex = BilingualLexicon::read_tsv(&path, &a.source_lang, &lang)?;
            eprintln!("# lexicon.{lang}.size={}", lex.len());
            set.add_bilingual(&lang, lex);
        }
    }
    Ok(set)
}

fn run_switch(
    a: &CodeSwitchArgs,
    sw: &Switcher<'_>,
    writer: &mut dyn Write,
) -> Result<TransformReport> {
    let origin = a.input.display().to_string();
    let reader = open(&a.input)?;
    let report = match a.input_kind {
        InputKind::Triples => transform_text_triples(reader, writer, &origin, sw, None, a.chunk)?,
        InputKind::IdTriples => {
            let (Some(q), Some(c)) = (&a.queries, &a.collection) else {
                bail!("--input-kind id-triples needs --queries and --collection");
            };
            let queries = read_queries(q)?;
            let collection = read_collection(c)?;
            transform_text_triples(
                reader,
                writer,
                &origin,
                sw,
                Some((&queries, &collection)),
                a.chunk,
            )?
        }
        InputKind::Queries => {
            transform_id_records(reader, writer, &origin, sw, RecordKind::Queries, a.chunk)?
        }
        InputKind::Collection => {
            transform_id_records(reader, writer, &origin, sw, RecordKind::Passages, a.chunk)?
        }
    };
    Ok(report)
}

pub fn code_switch(a: &CodeSwitchArgs, out: &mut dyn Write) -> Result<()> {
    let strat = strategy(a.strategy);
    let seed = if strat == Strategy::TranslateTest {
        a.seed.unwrap_or(0)
    } else {
        require_seed(a.seed, "code-switch")?
    };
    if a.chunk == 0 {
        bail!("--chunk must be positive");
    }
    let lexicons = load_lexicons(a)?;
    let policy = |p: f64| {
        SwitchPolicy::new(strat, p, a.query_langs.clone(), a.doc_langs.clone(), seed)
    };

    if !a.sweep.is_empty() {
        writeln!(out, "p\tswitch_rate\tcoverage\ttext_switch_fraction")?;
        for &p in &a.sweep {
            let sw = Switcher::new(policy(p)?, &lexicons)?;
            let total = run_switch(a, &sw, &mut io::sink())?.total();
            writeln!(
                out,
                "{p}\t{:.6}\t{:.6}\t{:.6}",
                total.switch_rate(),
                total.coverage(),
                total.text_switch_fraction()
            )?;
        }
        return Ok(());
    }

    let Some(output) = &a.output else {
        bail!("--output is required unless --sweep is given");
    };
    let sw = Switcher::new(policy(a.p)?, &lexicons)?;
    let mut w = create(output)?;
    let report = run_switch(a, &sw, &mut w)?;
    w.flush()?;
    let mut kv = KvBlock::new();
    kv.extend("policy.", &sw.policy().to_kv());
    kv.extend("", &report.to_kv());
    write!(out, "{kv}")?;
    Ok(())
}

pub fn mix(a: &MixArgs, out: &mut dyn Write) -> Result<()> {
    let seed = require_seed(a.seed, "mix")?;
    let mut per_lang = BTreeMap::new();
    for pair_arg in &a.inputs {
        let (lang, path) = split_pair(pair_arg, "--input")?;
        let coll = read_collection(&path)?;
        if per_lang.insert(lang.clone(), coll).is_some() {
            bail!("language {lang} given twice");
        }
    }
    let mixed = csir_core::corpus::mix_language_corpus(&per_lang, seed)?;
    let mut w = create(&a.output)?;
    write_collection(&mut w, &mixed.collection)?;
    w.flush()?;
    let mut side = create(&a.sidecar)?;
    let mut counts: BTreeMap<&str, usize> = per_lang.keys().map(|k| (k.as_str(), 0)).collect();
    for (id, lang) in &mixed.languages {
        writeln!(side, "{id}\t{lang}")?;
        *counts.get_mut(lang.as_str()).expect("known language") += 1;
    }
    side.flush()?;
    let n = mixed.collection.len();
    let mut kv = KvBlock::new();
    kv.push("records", n);
    for (lang, c) in counts {
        kv.push(format!("share.{lang}"), format!("{:.6}", c as f64 / n.max(1) as f64));
    }
    write!(out, "{kv}")?;
    Ok(())
}

pub fn eval(a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let run = read_run(&a.run)?;
    let qrels = read_qrels(&a.qrels)?;
    let disagreements = run.score_rank_disagreements();
    if disagreements > 0 {
        log::warn!("{disagreements} run entries have scores out of rank order; ranking by rank");
    }
    let report = mrr_at_k(&run, &qrels, a.k)?;
    if let Some(path) = &a.per_query {
        let mut w = create(path)?;
        report.write_per_query(&mut w)?;
        w.flush()?;
    }
    let mut kv = report.to_kv();
    if let Some(base) = &a.baseline {
        let base_report = mrr_at_k(&read_run(base)?, &qrels, a.k)?;
        let xs: Vec<f64> = report.per_query.values().copied().collect();
        let ys: Vec<f64> = report
            .per_query
            .keys()
            .map(|q| base_report.per_query[q.as_str()])
            .collect();
        let sig = paired_t_test(&xs, &ys, a.alpha, a.comparisons)?;
        kv.push("baseline.mrr", format!("{:.6}", base_report.mrr));
        kv.extend("test.", &sig.to_kv());
    }
    write!(out, "{kv}")?;
    Ok(())
}

pub fn analyze_overlap(a: &OverlapArgs, out: &mut dyn Write) -> Result<()> {
    let mut did = false;
    match (&a.queries, &a.collection, &a.qrels, &a.run) {
        (Some(q), Some(c), Some(r), Some(run)) => {
            let buckets = bucket_queries(
                &read_queries(q)?,
                &read_collection(c)?,
                &read_qrels(r)?,
                &read_run(run)?,
            )?;
            write!(out, "{buckets}")?;
            did = true;
        }
        (None, None, None, None) => {}
        _ => bail!("bucketing needs all of --queries, --collection, --qrels and --run"),
    }
    match (&a.before, &a.after) {
        (Some(b), Some(af)) => {
            let r = overlap_reduction(&read_text_triples(b)?, &read_text_triples(af)?)?;
            let mut kv = KvBlock::new();
            kv.extend("overlap.", &r.to_kv());
            write!(out, "{kv}")?;
            did = true;
        }
        (None, None) => {}
        _ => bail!("overlap reduction needs both --before and --after"),
    }
    if !did {
        bail!("nothing to do: pass --queries/--collection/--qrels/--run or --before/--after");
    }
    Ok(())
}

pub fn toy_experiment(a: &ToyArgs, out: &mut dyn Write) -> Result<()> {
    let seed = require_seed(a.seed, "toy-experiment")?;
    let config = ExperimentConfig {
        seed,
        concepts: a.concepts,
        topics: a.topics,
        languages: a.languages.clone(),
        train_queries: a.train_queries,
        test_queries: a.test_queries,
        candidates: a.candidates,
        p: a.p,
        train: TrainConfig {
            learning_rate: a.learning_rate,
            epochs: a.epochs,
            seed,
            negatives_per_positive: a.negatives,
            l2: 0.0,
        },
        ..ExperimentConfig::default()
    };
    let report = run_overfitting_experiment(&config)?;
    if let Some(dir) = &a.weights_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, ranker) in [
            ("monolingual", &report.monolingual),
            ("code_switched", &report.code_switched),
        ] {
            let path = dir.join(format!("{name}.weights"));
            std::fs::write(&path, ranker.to_kv().to_string())
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    write!(out, "{report}")?;
    Ok(())
}

pub fn lexicon_stats(a: &LexiconStatsArgs, out: &mut dyn Write) -> Result<()> {
    let (stats, coverage) = if a.wiki {
        let (lex, ingest) = parse_wiki_titles(&a.lexicon, &a.src_lang, &a.tgt_lang, a.max_n)?;
        let mut kv = KvBlock::new();
        kv.extend("ingest.", &ingest.to_kv());
        write!(out, "{kv}")?;
        let cov = vocab_coverage(a, &lex)?;
        (lex.stats(), cov)
    } else {
        let lex = BilingualLexicon::read_tsv(&a.lexicon, &a.src_lang, &a.tgt_lang)?;
        let cov = vocab_coverage(a, &lex)?;
        (lex.stats(), cov)
    };
    write!(out, "{}", stats.to_kv())?;
    if let Some(c) = coverage {
        writeln!(out, "coverage={c:.6}")?;
    }
    Ok(())
}

fn vocab_coverage<L: Lookup>(a: &LexiconStatsArgs, lex: &L) -> Result<Option<f64>> {
    let Some(path) = &a.vocab else {
        return Ok(None);
    };
    let mut words = Vec::new();
    for line in open(path)?.lines() {
        words.extend(tokenize::folded_words(&line?));
    }
    Ok(Some(lex.coverage(words.iter().map(String::as_str))))
}
