//! End-to-end tests of the command-line surface: exit codes, report
//! determinism, traces, translation, query answering, stats, and the
//! corpus aggregation against the checked-in verdict matrix.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chasecheck"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data/golden")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_exit_codes_encode_verdicts() {
    let rules = data("round_trip.rules");
    let rules = rules.to_str().unwrap();
    let acyclic = run(&["check", "--notion", "msa", rules]);
    assert_eq!(acyclic.status.code(), Some(0), "{}", stdout(&acyclic));
    assert!(stdout(&acyclic).contains("verdict: acyclic"));

    let rejected = run(&["check", "--notion", "ja", rules]);
    assert_eq!(rejected.status.code(), Some(1));
    assert!(stdout(&rejected).contains("witness:"));

    // resource limits surface as unknown
    let unknown = run(&[
        "check",
        "--notion",
        "mfa",
        "--mfa-via-c",
        "--max-facts",
        "6",
        rules,
    ]);
    assert_eq!(unknown.status.code(), Some(2), "{}", stdout(&unknown));
}

#[test]
fn usage_and_parse_errors_have_their_own_codes() {
    let usage = run(&[
        "check",
        "--notion",
        "nonsense",
        data("round_trip.rules").to_str().unwrap(),
    ]);
    assert_eq!(usage.status.code(), Some(64));

    let missing_sub = run(&["frobnicate"]);
    assert_eq!(missing_sub.status.code(), Some(64));

    let dir = tempdir();
    let bad = dir.join("bad.rules");
    std::fs::write(&bad, "A(?x -> B(?x) .").unwrap();
    let parse = run(&["check", "--notion", "wa", bad.to_str().unwrap()]);
    assert_eq!(parse.status.code(), Some(65));
    let err = String::from_utf8_lossy(&parse.stderr);
    assert!(err.contains("bad.rules:1:"), "span missing: {err}");

    let noent = run(&[
        "check",
        "--notion",
        "wa",
        dir.join("absent.rules").to_str().unwrap(),
    ]);
    assert_eq!(noent.status.code(), Some(65));
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let rules = data("round_trip.rules");
    let args = [
        "check",
        "--notion",
        "msa",
        "--json",
        rules.to_str().unwrap(),
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let parsed: serde_json::Value = serde_json::from_str(stdout(&first).trim()).unwrap();
    assert_eq!(parsed["verdict"], "acyclic");
    assert_eq!(parsed["notion"], "msa");
    assert!(parsed["stats"].get("elapsedMs").is_none());
    // timings are opt-in precisely because they break stability
    let timed = run(&[
        "check",
        "--notion",
        "msa",
        "--json",
        "--timings",
        rules.to_str().unwrap(),
    ]);
    let parsed: serde_json::Value = serde_json::from_str(stdout(&timed).trim()).unwrap();
    assert!(parsed["stats"]["elapsedMs"].is_number());
}

#[test]
fn taxonomy_lists_every_notion() {
    let out = run(&[
        "taxonomy",
        data("round_trip.rules").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let verdicts = parsed["verdicts"].as_object().unwrap();
    assert_eq!(verdicts["msa"]["verdict"], "acyclic");
    assert_eq!(verdicts["ja"]["verdict"], "not-acyclic");
    assert_eq!(verdicts["mfa+dep"]["verdict"], "acyclic");
    assert!(parsed["violations"].as_array().unwrap().is_empty());
}

#[test]
fn chase_prints_facts_and_traces() {
    let out = run(&[
        "chase",
        data("round_trip.rules").to_str().unwrap(),
        "--trace",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("A(*) ."));
    assert!(text.contains("rule=r1"), "trace lines present");
    assert!(text.contains("status=Fixpoint"));

    // a chase from explicit facts
    let dir = tempdir();
    let facts = dir.join("f.facts");
    std::fs::write(&facts, "A(a).").unwrap();
    let out = run(&[
        "chase",
        data("round_trip.rules").to_str().unwrap(),
        facts.to_str().unwrap(),
    ]);
    assert!(stdout(&out).contains("B(__f_r1_1(a)) ."));
}

#[test]
fn translate_chains_into_check() {
    let out = run(&["translate", data("ontology.dlx").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rendered = stdout(&out);
    assert!(rendered.contains("Person(?x) -> exists ?y . hasParent(?x,?y), Ancestor(?y) ."));
    assert!(rendered.contains("?x1 = ?x2 ."));

    let checked = run(&[
        "translate",
        data("ontology.dlx").to_str().unwrap(),
        "--check",
        "--notion",
        "msa",
        "--equality",
        "axiomatize",
    ]);
    assert_eq!(checked.status.code(), Some(0), "{}", stdout(&checked));
    assert!(stdout(&checked).contains("verdict: acyclic"));
}

#[test]
fn query_command_answers_over_the_materialisation() {
    let dir = tempdir();
    let rules = dir.join("q.rules");
    let facts = dir.join("q.facts");
    let query = dir.join("q.query");
    std::fs::write(
        &rules,
        "A(?x) -> exists ?y . R(?x,?y) .\nR(?z,?x) -> ?x = c .\n",
    )
    .unwrap();
    std::fs::write(&facts, "A(a).").unwrap();
    std::fs::write(&query, "ask R(a,?x) .").unwrap();
    let out = run(&[
        "query",
        rules.to_str().unwrap(),
        facts.to_str().unwrap(),
        query.to_str().unwrap(),
        "--equality",
        "sing-some",
        "--json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(parsed["answers"][0]["x"], "c");

    // boolean query, human output
    let bq = dir.join("b.query");
    std::fs::write(&bq, "ask exists ?y . R(a,?y) .").unwrap();
    let out = run(&[
        "query",
        rules.to_str().unwrap(),
        facts.to_str().unwrap(),
        bq.to_str().unwrap(),
        "--equality",
        "axiomatize",
    ]);
    assert_eq!(stdout(&out).trim(), "true");
}

#[test]
fn stats_reports_depth_and_sizes() {
    let out = run(&[
        "stats",
        data("round_trip.rules").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(parsed["depth"], 2);
    let mat = parsed["materialisationSize"].as_f64().unwrap();
    assert!((mat - 13.0 / 5.0).abs() < 1e-9, "13 facts from 5");
}

#[test]
fn corpus_matches_the_checked_in_matrix() {
    let out = bin()
        .args([
            "corpus",
            data(".").parent().unwrap().join("golden").to_str().unwrap(),
            "--equality",
            "axiomatize",
            "--json",
            "--keep-going",
        ])
        .env("CHASECHECK_THREADS", "2")
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let files = parsed["files"].as_array().unwrap();
    assert_eq!(files.len(), 14, "all goldens analysed");

    let matrix: serde_json::Value =
        serde_json::from_str(include_str!("data/golden_matrix.json")).unwrap();
    for entry in files {
        let name = entry["file"].as_str().unwrap();
        assert!(entry["error"].is_null(), "{name}: {}", entry["error"]);
        let expected = matrix[name]
            .as_object()
            .unwrap_or_else(|| panic!("{name} missing from matrix"));
        for (notion, want) in expected {
            let got = &entry["verdicts"][notion];
            assert_eq!(got, want, "{name}: {notion} expected {want}, got {got}");
        }
    }
    // the bucketed aggregate counts every file once
    let buckets = parsed["byGeneratingRules"].as_object().unwrap();
    let total: u64 = buckets
        .values()
        .map(|b| b["total"].as_u64().unwrap_or(0))
        .sum();
    assert_eq!(total, 14);
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "chasecheck-test-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
