//! Command-line behavior: exit codes, artifacts, config-file overrides.

use std::path::Path;
use std::process::{Command, Output};

use crease_core::corpus::SAMPLE_CORPUS_JSONL;

fn crease(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crease"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_sample_corpus(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("sample.jsonl");
    std::fs::write(&path, SAMPLE_CORPUS_JSONL).unwrap();
    path
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = crease(&["--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let corpus = write_sample_corpus(dir.path());
    let out = crease(
        &[
            "similar",
            "--polarity",
            "bogus",
            "--corpus",
            corpus.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error[USAGE]"), "stderr: {stderr}");
}

#[test]
fn missing_corpus_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = crease(
        &[
            "ingest",
            "--corpus",
            "does-not-exist.jsonl",
            "--out-dir",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.lines().count() == 1,
        "stderr should be one line: {stderr}"
    );
    assert!(stderr.contains("error[DATA]"));
}

#[test]
fn high_reject_rate_exits_3_and_empty_corpus_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    let mut lines = String::from("not json at all\ndefinitely { not json\n");
    lines.push_str(SAMPLE_CORPUS_JSONL.lines().next().unwrap());
    lines.push('\n');
    std::fs::write(&bad, &lines).unwrap();
    let out = crease(
        &[
            "ingest",
            "--corpus",
            bad.to_str().unwrap(),
            "--out-dir",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reject rate"));

    // Raising the threshold lets the same file through.
    let out = crease(
        &[
            "ingest",
            "--corpus",
            bad.to_str().unwrap(),
            "--out-dir",
            "o",
            "--reject-threshold",
            "0.9",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "\n\n").unwrap();
    let out = crease(
        &[
            "ingest",
            "--corpus",
            empty.to_str().unwrap(),
            "--out-dir",
            "o2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("EmptyCorpus"));
}

#[test]
fn degenerate_matrix_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    // Every delivery matches exactly one bowling feature: after dropping
    // empty columns only one remains, so CA is degenerate.
    let mut lines = String::new();
    for i in 0..10 {
        lines.push_str(&format!(
            r#"{{"match_id":"M1","series_id":"S1","innings":1,"over":{i},"ball":1,"date":"2018-01-0{}","bowler":"A","batsman":"B","outcome":"no run","text":"good length, blocks it"}}"#,
            i % 9 + 1
        ));
        lines.push('\n');
    }
    let corpus = dir.path().join("narrow.jsonl");
    std::fs::write(&corpus, lines).unwrap();
    let out = crease(
        &[
            "rules",
            "--player",
            "B",
            "--corpus",
            corpus.to_str().unwrap(),
            "--out-dir",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[DEGENERATE]"));
}

#[test]
fn ingest_writes_reports_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("mixed.jsonl");
    let mut lines = String::new();
    for (i, line) in SAMPLE_CORPUS_JSONL.lines().enumerate() {
        lines.push_str(line);
        lines.push('\n');
        if i == 1 {
            lines.push_str("broken line\n");
        }
    }
    std::fs::write(&corpus, &lines).unwrap();
    let out = crease(
        &[
            "ingest",
            "--corpus",
            corpus.to_str().unwrap(),
            "--out-dir",
            "out",
            "--reject-threshold",
            "0.5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/ingest_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["records_ingested"], 5);
    assert_eq!(report["rejects"][0]["line"], 3);

    let text = std::fs::read_to_string(dir.path().join("out/ingest_report.txt")).unwrap();
    assert!(text.contains("line 3"));

    // The persisted store round-trips through ingestion.
    let normalized =
        std::fs::read_to_string(dir.path().join("out/corpus_normalized.jsonl")).unwrap();
    assert_eq!(normalized.lines().count(), 5);
}

#[test]
fn unknown_player_warns_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_sample_corpus(dir.path());
    let out = crease(
        &[
            "matrix",
            "--player",
            "Nobody",
            "--corpus",
            corpus.to_str().unwrap(),
            "--out-dir",
            "o",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning"), "stderr: {stderr}");
}

#[test]
fn config_file_fields_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_sample_corpus(dir.path());
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"corpus": {:?}, "player": "Root", "out_dir": "from-config", "top_k": 2}}"#,
            corpus.to_str().unwrap()
        ),
    )
    .unwrap();

    // Config alone: analyzes Root into from-config/.
    let out = crease(
        &["matrix", "--config", config.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("from-config/matrix.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("Root"));

    // Flag overrides the player from the file.
    let out = crease(
        &[
            "matrix",
            "--config",
            config.to_str().unwrap(),
            "--player",
            "Smith",
            "--out-dir",
            "flag-wins",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Smith"));
    assert!(dir.path().join("flag-wins/matrix.csv").exists());

    // Unknown config fields are a usage error.
    std::fs::write(&config, r#"{"playr": "typo"}"#).unwrap();
    let out = crease(
        &["matrix", "--config", config.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wordfreq_writes_both_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_sample_corpus(dir.path());
    let out = crease(
        &[
            "wordfreq",
            "--player",
            "Smith",
            "--corpus",
            corpus.to_str().unwrap(),
            "--out-dir",
            "wf",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let attacked = std::fs::read_to_string(dir.path().join("wf/wordfreq_attacked.csv")).unwrap();
    let beaten = std::fs::read_to_string(dir.path().join("wf/wordfreq_beaten.csv")).unwrap();
    assert!(attacked.starts_with("bigram,count\n"));
    // The first sample line is a beaten record; its bigrams are counted.
    assert!(beaten.contains("outside edge,1"));
}

#[test]
fn matrix_csv_is_byte_stable_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_sample_corpus(dir.path());
    for out_dir in ["a", "b"] {
        let out = crease(
            &[
                "matrix",
                "--player",
                "Smith",
                "--corpus",
                corpus.to_str().unwrap(),
                "--out-dir",
                out_dir,
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a/matrix.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/matrix.csv")).unwrap();
    assert_eq!(a, b);
    // No stray temp files left behind by the atomic writes.
    for entry in std::fs::read_dir(dir.path().join("a")).unwrap() {
        let name = entry.unwrap().file_name();
        assert!(
            !name.to_string_lossy().ends_with(".tmp"),
            "leftover {name:?}"
        );
    }
}

#[test]
fn help_documents_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = crease(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let help = String::from_utf8_lossy(&out.stdout);
    for flag in [
        "--config",
        "--corpus",
        "--lexicon",
        "--out-dir",
        "--player",
        "--opponents",
        "--window",
        "--type",
        "--from",
        "--to",
        "--dims",
        "--top-k",
        "--perplexity",
        "--iterations",
        "--seed",
        "--mode",
        "--window-days",
        "--reject-threshold",
        "--players-file",
    ] {
        assert!(help.contains(flag), "--help does not document {flag}");
    }
    for command in [
        "ingest", "matrix", "rules", "biplot", "similar", "validate", "wordfreq", "demo",
    ] {
        assert!(help.contains(command), "--help does not list {command}");
    }
}

#[test]
fn players_file_limits_the_roster() {
    let dir = tempfile::tempdir().unwrap();
    // Demo corpus gives a real multi-player store.
    let out = crease(
        &["demo", "--out-dir", "demo", "--records", "7200"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let roster = dir.path().join("roster.txt");
    std::fs::write(&roster, "Abel\nBrook\nCalder\nDalton\nEnnis\nFarley\n").unwrap();
    let out = crease(
        &[
            "validate",
            "--corpus",
            "demo/corpus.jsonl",
            "--players-file",
            roster.to_str().unwrap(),
            "--out-dir",
            "val",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("val/validate.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7); // header + six players
    assert!(csv.lines().nth(1).unwrap().starts_with("Abel,"));
}
