use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_compoundkit"));
    c.env("RUST_LOG", "warn");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn compoundkit")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_exits_zero() {
    let out = run(&["align", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
}

#[test]
fn unknown_subcommand_and_flag_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["align", "--nope"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let gold = fixture("gold.jsonl");
    let args = ["eval", "--gold", s(&gold), "--pred", s(&gold), "--mode", "bogus", "--report", s(&out)];
    assert_eq!(run(&args).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn data_errors_exit_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"word\":\"ab\",\"lang\":\"en\",\"constituents\":[\"a\",\"b\"]}\n{\"word\":\"a\",\"lang\":\"en\",\"constituents\":[\"a\",\"b\"]}\n").unwrap();
    let out = run(&["align", "--in", s(&bad), "--out", s(&dir.path().join("o.jsonl"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2"));
    let missing = run(&["align", "--in", s(&dir.path().join("nope.jsonl")), "--out", s(&dir.path().join("o.jsonl"))]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn eval_fixture_report_parses() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let table = dir.path().join("report.txt");
    let out = ok(&[
        "eval",
        "--gold",
        s(&fixture("gold.jsonl")),
        "--pred",
        s(&fixture("pred_errors.jsonl")),
        "--report",
        s(&report),
        "--table",
        s(&table),
    ]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["languages"]["en"]["p"], 25.0);
    assert_eq!(json["languages"]["en"]["n"], 50.0);
    assert_eq!(json["missing"], 1);
    let text = std::fs::read_to_string(&table).unwrap();
    assert_eq!(text, String::from_utf8(out.stdout).unwrap());
    assert!(text.lines().nth(3).unwrap().starts_with("All"));
}

/// mine → freq table → split-predict → align → eval, then tokenizer
/// training and analysis on the predictions. Every output is regenerated
/// and compared byte for byte.
#[test]
fn end_to_end_pipeline_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let corpus = fixture("corpus.txt");
    let gold = fixture("gold.jsonl");
    let predictions = format!("predictions:{}", s(&p("pred.jsonl")));
    let en_corpus = format!("en={}", s(&corpus));
    let en_mono = format!("en={}", s(&p("ws.json")));

    let steps: Vec<Vec<String>> = vec![
        vec!["mine", "--corpus", s(&corpus), "--lang", "en", "--out", s(&p("pairs.jsonl")), "--freq-out", s(&p("freq.tsv"))],
        vec!["split-predict", "--freq-table", s(&p("freq.tsv")), "--in", s(&gold), "--out", s(&p("pred.jsonl"))],
        vec!["align", "--in", s(&p("pred.jsonl")), "--out", s(&p("aligned.jsonl"))],
        vec!["eval", "--gold", s(&gold), "--pred", s(&p("pred.jsonl")), "--report", s(&p("report.json"))],
        vec!["train-tokenizer", "--corpus", &en_corpus, "--vocab-size", "60", "--out", s(&p("ws.json"))],
        vec![
            "train-tokenizer",
            "--corpus",
            &en_corpus,
            "--vocab-size",
            "60",
            "--mode",
            "compound",
            "--segmenter",
            &predictions,
            "--out",
            s(&p("cp.json")),
        ],
        vec!["encode", "--model", s(&p("cp.json")), "--in", s(&corpus), "--out", s(&p("encoded.txt"))],
        vec!["hardness", "--model", s(&p("cp.json")), "--gold", s(&gold), "--out", s(&p("hard.json")), "--details", s(&p("hard.jsonl"))],
        vec!["token-origins", "--multi", s(&p("cp.json")), "--mono", &en_mono, "--out", s(&p("origins.tsv"))],
        vec!["eval", "--gold", s(&gold), "--pred", s(&p("pred.jsonl")), "--model", s(&p("ws.json")), "--report", s(&p("report2.json"))],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    let outputs = [
        "pairs.jsonl", "freq.tsv", "pred.jsonl", "aligned.jsonl", "report.json", "ws.json", "cp.json", "encoded.txt",
        "hard.json", "hard.jsonl", "origins.tsv", "report2.json",
    ];

    let run_all = || {
        for step in &steps {
            let args: Vec<&str> = step.iter().map(String::as_str).collect();
            ok(&args);
        }
        outputs.map(|f| std::fs::read(p(f)).unwrap())
    };
    let first = run_all();
    let second = run_all();
    for (name, (a, b)) in outputs.iter().zip(first.iter().zip(&second)) {
        assert_eq!(a, b, "{name} differs between runs");
    }

    let report: serde_json::Value = serde_json::from_slice(&first[4]).unwrap();
    assert_eq!(report["macro_all"], 100.0);
    let breakdown: serde_json::Value = serde_json::from_slice(&first[11]).unwrap();
    assert_eq!(breakdown["breakdown"]["all"]["total"], 6);
    let aligned = String::from_utf8(first[3].clone()).unwrap();
    assert!(aligned.contains("\"boundaries\":[0,4,8]"));
    let pairs = String::from_utf8(first[0].clone()).unwrap();
    assert!(pairs.contains("\"target\":\"door-bell\""));
}

#[test]
fn compound_mode_without_segmenter_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "train-tokenizer",
        "--corpus",
        s(&fixture("corpus.txt")),
        "--mode",
        "compound",
        "--out",
        s(&dir.path().join("m.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn threads_flag_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("corpus.txt");
    let one = dir.path().join("one.json");
    let four = dir.path().join("four.json");
    ok(&["--threads", "1", "train-tokenizer", "--corpus", s(&corpus), "--vocab-size", "50", "--out", s(&one)]);
    ok(&["train-tokenizer", "--threads", "4", "--corpus", s(&corpus), "--vocab-size", "50", "--out", s(&four)]);
    assert_eq!(std::fs::read(one).unwrap(), std::fs::read(four).unwrap());
}
