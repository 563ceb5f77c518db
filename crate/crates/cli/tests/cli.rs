use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn csir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csir"))
        .args(args)
        .output()
        .expect("spawn csir")
}

fn ok(args: &[&str]) -> String {
    let out = csir(args);
    assert!(
        out.status.success(),
        "csir {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn kv(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from:\n{stdout}"))
        .to_string()
}

fn fixtures(dir: &Path) -> (PathBuf, PathBuf) {
    let lex = write(dir, "de.tsv", "the\tdie\ncat\tkatze\nsat\tsaß\non\tauf\nmat\tmatte\n");
    let triples = write(
        dir,
        "triples.tsv",
        "the cat sat\tthe cat sat on the mat.\ta dog ran\ncat on mat\tthe mat\tthe cat\n",
    );
    (lex, triples)
}

#[test]
fn p_zero_copies_input_exactly() {
    let dir = TempDir::new().unwrap();
    let (lex, triples) = fixtures(dir.path());
    let out = dir.path().join("out.tsv");
    let stdout = ok(&[
        "code-switch", "--strategy", "bl", "--p", "0", "--query-langs", "de", "--doc-langs", "de",
        "--lexicon", &format!("de={}", s(&lex)), "--seed", "1", "--input", s(&triples),
        "--output", s(&out),
    ]);
    assert_eq!(fs::read(&triples).unwrap(), fs::read(&out).unwrap());
    assert_eq!(kv(&stdout, "all.tokens_switched"), "0");
}

#[test]
fn resolved_config_is_echoed_to_stdout_and_stderr() {
    let dir = TempDir::new().unwrap();
    let (lex, triples) = fixtures(dir.path());
    let out = dir.path().join("out.tsv");
    let cfg = write(dir.path(), "run.toml", "p = 1.0\nseed = 4\nstrategy = \"bl\"\n");
    let output = csir(&[
        "--config", s(&cfg), "code-switch", "--query-langs", "de", "--doc-langs", "de",
        "--lexicon", &format!("de={}", s(&lex)), "--input", s(&triples), "--output", s(&out),
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let stderr = String::from_utf8(output.stderr).unwrap();
    for line in ["# command.p=1.0", "# command.seed=4", "# command.chunk=4096", "# jobs=1"] {
        assert!(stdout.contains(line), "{line} missing from stdout");
        assert!(stderr.contains(line), "{line} missing from stderr");
    }
    assert_eq!(kv(&stdout, "query.switch_rate"), "1.000000");
}

#[test]
fn command_line_overrides_config() {
    let dir = TempDir::new().unwrap();
    let (lex, triples) = fixtures(dir.path());
    let out = dir.path().join("out.tsv");
    let cfg = write(dir.path(), "run.toml", "p = 1.0\nseed = 4\n");
    let stdout = ok(&[
        "--config", s(&cfg), "code-switch", "--strategy", "bl", "--p", "0", "--query-langs",
        "de", "--doc-langs", "de", "--lexicon", &format!("de={}", s(&lex)), "--input",
        s(&triples), "--output", s(&out),
    ]);
    assert!(stdout.contains("# command.p=0.0"));
    assert_eq!(fs::read(&triples).unwrap(), fs::read(&out).unwrap());
}

#[test]
fn randomized_commands_require_a_seed() {
    let dir = TempDir::new().unwrap();
    let (lex, triples) = fixtures(dir.path());
    let out = csir(&[
        "code-switch", "--strategy", "ml", "--query-langs", "de", "--doc-langs", "de",
        "--lexicon", &format!("de={}", s(&lex)), "--input", s(&triples), "--output",
        s(&dir.path().join("o.tsv")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    let out = csir(&["toy-experiment", "--concepts", "10"]);
    assert!(!out.status.success());
}

#[test]
fn translate_test_needs_no_seed() {
    let dir = TempDir::new().unwrap();
    let (lex, triples) = fixtures(dir.path());
    let out = dir.path().join("o.tsv");
    ok(&[
        "code-switch", "--strategy", "translate-test", "--query-langs", "de", "--doc-langs",
        "de", "--lexicon", &format!("de={}", s(&lex)), "--input", s(&triples), "--output",
        s(&out),
    ]);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("die katze saß\tdie katze saß auf die matte.\t"));
}

#[test]
fn missing_lexicon_is_a_startup_error() {
    let dir = TempDir::new().unwrap();
    let (lex, triples) = fixtures(dir.path());
    let out = dir.path().join("o.tsv");
    let r = csir(&[
        "code-switch", "--strategy", "ml", "--query-langs", "de,ru", "--doc-langs", "de",
        "--lexicon", &format!("de={}", s(&lex)), "--seed", "1", "--input", s(&triples),
        "--output", s(&out),
    ]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("ru"));
    assert!(!out.exists());
}

#[test]
fn jobs_do_not_change_output() {
    let dir = TempDir::new().unwrap();
    let (lex, _) = fixtures(dir.path());
    let words = ["the", "cat", "sat", "on", "mat", "dog"];
    let mut body = String::new();
    for i in 0..2000 {
        let w = |k: usize| words[(i * 7 + k * 3) % words.len()];
        body.push_str(&format!("{} {} {i}\t{} {} {} {}\t{} {}\n", w(0), w(1), w(2), w(3), w(4), w(5), w(6), w(7)));
    }
    let input = write(dir.path(), "big.tsv", &body);
    let mut outputs = Vec::new();
    for jobs in ["1", "8"] {
        let out = dir.path().join(format!("o{jobs}.tsv"));
        ok(&[
            "--jobs", jobs, "code-switch", "--strategy", "bl", "--query-langs", "de",
            "--doc-langs", "de", "--lexicon", &format!("de={}", s(&lex)), "--seed", "11",
            "--chunk", "100", "--input", s(&input), "--output", s(&out),
        ]);
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sweep_reports_a_rate_table() {
    let dir = TempDir::new().unwrap();
    let (lex, triples) = fixtures(dir.path());
    let stdout = ok(&[
        "code-switch", "--strategy", "bl", "--query-langs", "de", "--doc-langs", "de",
        "--lexicon", &format!("de={}", s(&lex)), "--seed", "2", "--input", s(&triples),
        "--sweep", "0,1",
    ]);
    let rows: Vec<&str> = stdout.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "p\tswitch_rate\tcoverage\ttext_switch_fraction");
    assert!(rows[1].starts_with("0\t0.000000\t"));
    let cov = rows[2].split('\t').nth(2).unwrap();
    assert_eq!(rows[2].split('\t').nth(1).unwrap(), cov);
}

#[test]
fn id_triples_are_joined_before_switching() {
    let dir = TempDir::new().unwrap();
    let (lex, _) = fixtures(dir.path());
    let q = write(dir.path(), "q.tsv", "q1\tthe cat\n");
    let c = write(dir.path(), "c.tsv", "p1\tthe mat\np2\ta dog\n");
    let ids = write(dir.path(), "ids.tsv", "q1\tp1\tp2\n");
    let out = dir.path().join("o.tsv");
    ok(&[
        "code-switch", "--strategy", "bl", "--p", "0", "--query-langs", "de", "--doc-langs",
        "de", "--lexicon", &format!("de={}", s(&lex)), "--seed", "1", "--input", s(&ids),
        "--input-kind", "id-triples", "--queries", s(&q), "--collection", s(&c), "--output",
        s(&out),
    ]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "the cat\tthe mat\ta dog\n");
}

#[test]
fn wiki_prefers_the_longest_title() {
    let dir = TempDir::new().unwrap();
    let titles = write(dir.path(), "it.tsv", "credit card\tcarta di credito\ncard\tcarta\ncredit\tcredito\n");
    let q = write(dir.path(), "q.tsv", "q1\tlost credit card fees\n");
    let out = dir.path().join("o.tsv");
    let stdout = ok(&[
        "code-switch", "--strategy", "wiki", "--query-langs", "it", "--doc-langs", "it",
        "--lexicon", &format!("it={}", s(&titles)), "--seed", "5", "--input", s(&q),
        "--input-kind", "queries", "--output", s(&out),
    ]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "q1\tlost carta di credito fees\n");
    assert_eq!(kv(&stdout, "query.text_switch_fraction"), "1.000000");
}

fn eval_fixture(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let qrels = write(dir, "qrels", "q1 0 d2 1\nq2 0 d5 1\n");
    let mut run = String::new();
    for q in ["q1", "q2"] {
        for r in 1..=6 {
            run.push_str(&format!("{q} Q0 d{r} {r} {} sys\n", 10 - r));
        }
    }
    let run = write(dir, "run", &run);
    let base = write(
        dir,
        "base",
        "q1 Q0 d2 1 3 base\nq2 Q0 d9 1 3 base\nq2 Q0 d5 2 2 base\n",
    );
    (qrels, run, base)
}

#[test]
fn eval_fixture_scores_point_three_five() {
    let dir = TempDir::new().unwrap();
    let (qrels, run, _) = eval_fixture(dir.path());
    let per_query = dir.path().join("pq.tsv");
    let stdout = ok(&[
        "eval", "--run", s(&run), "--qrels", s(&qrels), "--per-query", s(&per_query),
    ]);
    assert_eq!(kv(&stdout, "value"), "0.350000");
    let pq = fs::read_to_string(&per_query).unwrap();
    assert!(pq.contains("q1\t0.5"), "{pq}");
}

#[test]
fn eval_against_itself_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let (qrels, run, _) = eval_fixture(dir.path());
    let out = csir(&["eval", "--run", s(&run), "--qrels", s(&qrels), "--baseline", s(&run)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("variance"));
}

#[test]
fn eval_with_baseline_reports_a_test() {
    let dir = TempDir::new().unwrap();
    let (qrels, run, base) = eval_fixture(dir.path());
    let stdout = ok(&["eval", "--run", s(&run), "--qrels", s(&qrels), "--baseline", s(&base)]);
    // diffs: -0.5, -0.3; mean -0.4, sd 0.1414..., t = -0.4 / 0.1 = -4
    let t: f64 = kv(&stdout, "test.t").parse().unwrap();
    assert!((t + 4.0).abs() < 1e-9, "{t}");
}

#[test]
fn mix_single_language_is_a_copy() {
    let dir = TempDir::new().unwrap();
    let de = write(dir.path(), "de.tsv", "a\teins\nb\tzwei\nc\tdrei\n");
    let out = dir.path().join("mixed.tsv");
    let side = dir.path().join("side.tsv");
    ok(&[
        "mix", "--input", &format!("de={}", s(&de)), "--seed", "3", "--output", s(&out),
        "--sidecar", s(&side),
    ]);
    assert_eq!(fs::read(&de).unwrap(), fs::read(&out).unwrap());
    assert_eq!(fs::read_to_string(&side).unwrap(), "a\tde\nb\tde\nc\tde\n");
}

#[test]
fn mix_rejects_mismatched_ids() {
    let dir = TempDir::new().unwrap();
    let de = write(dir.path(), "de.tsv", "a\teins\nb\tzwei\n");
    let fr = write(dir.path(), "fr.tsv", "a\tun\nc\ttrois\n");
    let out = csir(&[
        "mix", "--input", &format!("de={}", s(&de)), "--input", &format!("fr={}", s(&fr)),
        "--seed", "3", "--output", s(&dir.path().join("m")), "--sidecar",
        s(&dir.path().join("s")),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('b') && err.contains('c'), "{err}");
}

#[test]
fn induce_lexicon_on_identity_spaces() {
    let dir = TempDir::new().unwrap();
    let src = write(dir.path(), "en.vec", "3 3\ncat 1 0 0\ndog 0 1 0\nfish 0 0 2\n");
    let tgt = write(dir.path(), "de.vec", "fisch 0 0 1\nkatze 1 0.1 0\nhund 0 1 0\n");
    let out = dir.path().join("lex.tsv");
    let stdout = ok(&[
        "induce-lexicon", "--src", s(&src), "--tgt", s(&tgt), "--tgt-lang", "de", "--out",
        s(&out),
    ]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "cat\tkatze\ndog\thund\nfish\tfisch\n");
    assert_eq!(kv(&stdout, "pairs"), "3");
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let qrels = write(dir.path(), "qrels", "q1 0 d1 1\nbroken\n");
    let run = write(dir.path(), "run", "q1 Q0 d1 1 1 x\n");
    let out = csir(&["eval", "--run", s(&run), "--qrels", s(&qrels)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn analyze_overlap_identity_reduction_is_zero() {
    let dir = TempDir::new().unwrap();
    let (_, triples) = fixtures(dir.path());
    let stdout = ok(&["analyze-overlap", "--before", s(&triples), "--after", s(&triples)]);
    assert_eq!(kv(&stdout, "overlap.reduction"), "0.000000");
}

#[test]
fn toy_experiment_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = [
        "toy-experiment", "--seed", "1", "--concepts", "200", "--train-queries", "60",
        "--test-queries", "30", "--epochs", "50",
    ];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    let w = dir.path().join("w");
    let mut with_dir = args.to_vec();
    with_dir.extend(["--weights-dir", s(&w)]);
    ok(&with_dir);
    assert!(w.join("monolingual.weights").exists());
    assert!(w.join("code_switched.weights").exists());
}
