//! Binary-level tests: the exit-code contract, JSON round-trips through
//! the executable, row filtering, and thread-count determinism via
//! REPFILT_THREADS.

use std::process::{Command, Output};

fn repfilt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repfilt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repfilt_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repfilt"))
        .args(args)
        .env("REPFILT_THREADS", threads)
        .output()
        .expect("binary runs")
}

#[test]
fn rank_command_prints_the_free_rank() {
    let out = repfilt(&[
        "rank",
        "--system",
        "paper:S3/C",
        "--group",
        "S3",
        "--n",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("free rank 5"), "got:\n{text}");
}

#[test]
fn rank_stage_zero_is_trivial() {
    let out = repfilt(&[
        "rank",
        "--system",
        "paper:S3/C",
        "--group",
        "S3",
        "--n",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("free rank 0"));
}

#[test]
fn burnside_rank_is_reported() {
    let out = repfilt(&["rank", "--system", "burnside", "--group", "S3", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("free rank 4"));
}

#[test]
fn complexity_commands_match_examples() {
    let out = repfilt(&[
        "complexity",
        "--system",
        "paper:A5/Q",
        "--group",
        "A5",
        "--n",
        "2",
    ]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("free rank 2"));
    let out = repfilt(&[
        "complexity",
        "--system",
        "burnside",
        "--group",
        "C2",
        "--n",
        "2",
    ]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("free rank 1"));
    let out = repfilt(&[
        "complexity",
        "--system",
        "paper:S3/R",
        "--group",
        "S3",
        "--n",
        "1",
    ]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("free rank 2"));
}

#[test]
fn json_output_parses_and_omits_timing() {
    let out = repfilt(&[
        "rank",
        "--system",
        "paper:S3/C",
        "--group",
        "S3",
        "--n",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["stage"]["free_rank"], 3);
    assert!(doc.get("timing").is_none());
}

#[test]
fn exit_code_contract() {
    // 0: success.
    assert_eq!(
        repfilt(&["poset", "--partitions", "3"]).status.code(),
        Some(0)
    );
    // 1: comparison failure (forced counterexample run).
    assert_eq!(
        repfilt(&["check-lemma", "--q", "2", "--n", "2", "--force"])
            .status
            .code(),
        Some(1)
    );
    // 2: input validation.
    assert_eq!(
        repfilt(&["rank", "--system", "nonsense", "--group", "S3", "--n", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        repfilt(&["check-lemma", "--q", "2", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
    // 3: resource bounds.
    assert_eq!(
        repfilt(&["poset", "--partitions", "11"]).status.code(),
        Some(3)
    );
    assert_eq!(
        repfilt(&["rank", "--system", "burnside", "--group", "A5", "--n", "60"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn poset_reports_match_examples() {
    let out = repfilt(&["poset", "--partitions", "3", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["poset"]["element_count"], 4);
    let out = repfilt(&["poset", "--q", "3", "--n", "2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["poset"]["element_count"], 6);
}

#[test]
fn check_lemma_passes_for_odd_q() {
    let out = repfilt(&["check-lemma", "--q", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("pass"));
}

#[test]
fn validate_command() {
    let out = repfilt(&["validate", "--system", "builtin:burnside", "--group", "S3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("all identities verified"));
}

#[test]
fn paper_tables_filter_runs_subset() {
    let out = repfilt(&["paper-tables", "--filter", "A5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 8);
    assert!(!text.contains("S3/C"));
    // A filter matching nothing is an input error.
    assert_eq!(
        repfilt(&["paper-tables", "--filter", "zzz"]).status.code(),
        Some(2)
    );
}

#[test]
fn thread_counts_give_byte_identical_json() {
    let args = ["paper-tables", "--filter", "C3", "--format", "json"];
    let one = repfilt_with_threads(&args, "1");
    let four = repfilt_with_threads(&args, "4");
    let again = repfilt_with_threads(&args, "1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, again.stdout);
}
