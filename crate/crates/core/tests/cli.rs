mod common;

use std::path::Path;
use std::process::{Command, Output};

use anyhow::Result;
use proc2bpmn::bpmn::parse_dot;
use proc2bpmn::corpus::write_jsonl;
use proc2bpmn::synth::{synthetic_corpus, SynthConfig};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proc2bpmn"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn corpus_file(dir: &Path) -> Result<()> {
    let c = synthetic_corpus(&SynthConfig {
        documents: 12,
        seed: 5,
        ..Default::default()
    })?;
    write_jsonl(&c, dir.join("corpus.jsonl"))?;
    Ok(())
}

#[test]
fn stats_reports_every_type() -> Result<()> {
    let dir = tempfile::tempdir()?;
    corpus_file(dir.path())?;
    let text = ok(dir.path(), &["stats", "--corpus", "corpus.jsonl"]);
    for t in ["Actor", "Activity", "XOR", "AND"] {
        assert!(text.contains(t), "{text}");
    }
    let json: serde_json::Value = serde_json::from_str(&ok(dir.path(), &["stats", "--corpus", "corpus.jsonl", "--json"]))?;
    assert_eq!(json["documents"], 12);
    Ok(())
}

#[test]
fn cross_validation_is_repeatable() -> Result<()> {
    let dir = tempfile::tempdir()?;
    corpus_file(dir.path())?;
    let args = ["--set", "ner.max_iter=15", "--seed", "3", "cv-ner", "--corpus", "corpus.jsonl", "--k", "3", "--json"];
    let a = ok(dir.path(), &args);
    let b = ok(dir.path(), &args);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a)?;
    assert_eq!(v["folds"].as_array().map(Vec::len), Some(3));
    Ok(())
}

#[test]
fn extract_emits_parseable_dot() -> Result<()> {
    let dir = tempfile::tempdir()?;
    corpus_file(dir.path())?;
    let p = dir.path();
    ok(p, &["--set", "ner.max_iter=40", "train-ner", "--corpus", "corpus.jsonl", "--out", "ner.json"]);
    ok(p, &["--set", "relex.epochs=5", "train-re", "--corpus", "corpus.jsonl", "--out", "re.json", "--sampling", "ros"]);
    std::fs::write(p.join("library.txt"), common::LIBRARY)?;
    let dot = ok(p, &["extract", "--text", "library.txt", "--ner", "ner.json", "--re", "re.json", "--json", "out.json"]);
    let parsed = parse_dot(&dot)?;
    assert!(!parsed.nodes.is_empty());
    let rendered = ok(p, &["render", "--graph", "out.json"]);
    assert_eq!(rendered, dot);
    Ok(())
}

#[test]
fn pipeline_counts_and_errors() -> Result<()> {
    let dir = tempfile::tempdir()?;
    std::fs::write(dir.path().join("counts.csv"), common::pipeline_counts::COUNTS)?;
    let out = ok(dir.path(), &["eval-pipeline", "--counts", "counts.csv"]);
    assert!(out.contains("90.1") && out.contains("73.7"), "{out}");

    assert_eq!(run(dir.path(), &["stats", "--corpus", "missing.jsonl"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["--set", "ner.nope=1", "stats"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(1));
    Ok(())
}
