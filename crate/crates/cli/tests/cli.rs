use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pps_core::{format, zoo};
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn pps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pps"))
        .args(args)
        .env("PPS_FIXTURE_DIR", fixtures())
        .output()
        .expect("run pps")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(o)))
}

#[test]
fn shipped_fixtures_match_builtin_models() {
    for model in zoo::all_models() {
        let path = fixtures().join(format!("{}.json", model.name));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format::export(&model), "{} is stale", path.display());
        let (back, report) = format::import(&text).unwrap();
        assert!(report.is_valid());
        assert_eq!(back.stats(None).unwrap(), model.stats(None).unwrap());
    }
}

#[test]
fn validate_fixture_ok() {
    let o = pps(&["validate", "mr3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("no violations"));
}

#[test]
fn validate_reports_bad_row_sum() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixtures().join("cheating.json")).unwrap();
    let broken = text.replacen("\"1\": \"1\"", "\"1\": \"1/2\"", 1);
    assert_ne!(text, broken);
    let path = dir.path().join("broken.json");
    std::fs::write(&path, broken).unwrap();
    let o = pps(&["--json", "validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["kind"], "row_sum");
}

#[test]
fn malformed_input_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&pps(&["validate", path.to_str().unwrap()])), 2);
    assert_eq!(code(&pps(&["stats", "no_such_model"])), 2);
    assert_eq!(code(&pps(&["stats", "mr3", "--seq", "M9"])), 2);
    assert_eq!(code(&pps(&["stats", "mr3", "--prep", "nowhere"])), 2);
}

#[test]
fn stats_quantum_and_mr3_agree() {
    let q = stdout(&pps(&["stats", "quantum_three_box", "--seq", "M1,MA"]));
    for line in ["(1,A)     0.111111111111", "(¬1,A)    0.000000000000", "(1,¬A)    0.222222222222", "(¬1,¬A)   0.666666666667"] {
        assert!(q.contains(line), "{q}");
    }
    let o = pps(&["--json", "stats", "mr3", "--seq", "M1,MA"]);
    let rows = json(&o)["distribution"].as_array().unwrap().clone();
    let get = |a: &str, b: &str| {
        rows.iter()
            .find(|r| r["outcomes"] == serde_json::json!([a, b]))
            .map(|r| r["p"].clone())
            .unwrap()
    };
    assert_eq!(get("1", "A"), "1/9");
    assert_eq!(get("¬1", "A"), "0");
    assert_eq!(get("1", "¬A"), "2/9");
    assert_eq!(get("¬1", "¬A"), "2/3");
}

#[test]
fn empty_sequence_is_certain() {
    let o = pps(&["--json", "stats", "kirkpatrick", "--seq", ""]);
    let rows = json(&o)["distribution"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["p"], "1");
}

#[test]
fn check_quantum_violates() {
    let o = pps(&["check", "quantum_three_box"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("-13/9  VIOLATED"), "{text}");
    let v = json(&pps(&["--json", "check", "quantum_three_box"]));
    assert_eq!(v["lgi_value"], "-13/9");
    assert_eq!(v["lgi_verdict"], "violated");
}

#[test]
fn check_leifer_spekkens() {
    let o = pps(&["check", "leifer_spekkens"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("MR1"));
    assert!(text.contains("M_L: 1/4"));
    assert!(text.contains("NOT a true PPS paradox"));
}

#[test]
fn check_cheating_flags_two_balls() {
    let text = stdout(&pps(&["check", "cheating"]));
    assert!(text.contains("double occupancy      1/9"), "{text}");
    assert!(text.contains("TWO BALLS"));
}

#[test]
fn quantum_game_alice_wins_every_bet() {
    let o = pps(&["--json", "--seed", "7", "game", "quantum_three_box", "--rounds", "90000"]);
    assert_eq!(code(&o), 0);
    let ledger = &json(&o)["ledger"];
    assert!(ledger["bets_placed"].as_u64().unwrap() > 0);
    assert_eq!(ledger["bob_wins"], 0);
    assert_eq!(ledger["alice_wins"], ledger["bets_placed"]);
}

#[test]
fn cheating_game_bob_sees_two_balls() {
    let n: f64 = 90_000.0;
    let o = pps(&["--json", "game", "cheating", "--strategy", "cheat-check", "--q", "1", "--rounds", "90000"]);
    let bob = json(&o)["ledger"]["immediate_bob"].as_f64().unwrap();
    let p: f64 = 1.0 / 9.0;
    let sigma = (p * (1.0 - p) / n).sqrt();
    assert!((bob / n - p).abs() < 4.0 * sigma, "{bob}");
}

#[test]
fn zero_rounds_is_usage_error() {
    assert_eq!(code(&pps(&["game", "mr3", "--rounds", "0"])), 2);
    assert_eq!(code(&pps(&["game", "mr3", "--odds", "1/2"])), 2);
    assert_eq!(code(&pps(&["game", "mr3", "--strategy", "fixed"])), 2);
}

#[test]
fn transcripts_follow_schema_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let csv = dir.path().join("c.csv");
    for path in [&a, &b] {
        let o = pps(&["--seed", "11", "--out", path.to_str().unwrap(), "game", "mr2", "--rounds", "300", "--p-control", "0.3"]);
        assert_eq!(code(&o), 0);
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    assert_eq!(ta, std::fs::read_to_string(&b).unwrap());
    let v: Value = serde_json::from_str(&ta).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rounds"].as_array().unwrap().len(), 300);
    assert_eq!(v["post_selection"], "A");

    pps(&["--seed", "11", "--out", csv.to_str().unwrap(), "game", "mr2", "--rounds", "300", "--p-control", "0.3"]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("index,choice,bob_outcomes,alice_outcome,bet_placed,alice_won,immediate_win")
    );
    assert_eq!(lines.count(), 300);
}

#[test]
fn interactive_game_reads_choices() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_pps"))
        .args(["game", "quantum_three_box", "--interactive"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"M1\nN\nnonsense\nM1,M2\nq\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("unknown choice"));
    assert!(text.contains("rounds                3"), "{text}");
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ls.json");
    let o = pps(&["--out", path.to_str().unwrap(), "export", "leifer_spekkens"]);
    assert_eq!(code(&o), 0);
    let from_file = stdout(&pps(&["stats", path.to_str().unwrap(), "--seq", "M_L,M_T"]));
    let builtin = stdout(&pps(&["stats", "leifer_spekkens", "--seq", "M_L,M_T"]));
    assert_eq!(from_file, builtin);
    assert_eq!(code(&pps(&["export", "all"])), 2);
}

#[test]
fn fixture_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixtures().join("mr3.json")).unwrap();
    std::fs::write(dir.path().join("renamed.json"), text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pps"))
        .args(["validate", "renamed"])
        .env("PPS_FIXTURE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(code(&pps(&["validate", "renamed"])), 2);
}
