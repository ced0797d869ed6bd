//! End-to-end tests of the `disco` binary: exit codes, output shape and
//! the environment-variable override.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(file: &str) -> String {
    disco::default_corpus_dir().join(file).display().to_string()
}

fn disco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disco"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn validate_reports_sizes() {
    let out = disco(&["validate", &corpus("fig1.game")]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "ok: 4 states, 16 transitions\n");
}

#[test]
fn validate_missing_file_is_a_usage_error() {
    let out = disco(&["validate", "/nonexistent/file.game"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn check_exit_codes_mirror_the_verdict() {
    let game = corpus("fig1.game");
    let base = [
        "check",
        game.as_str(),
        "--state",
        "w",
        "--gamma",
        "1/2",
        "--formula",
    ];
    let run = |formula: &str| disco(&[&base[..], &[formula]].concat());

    let out = run("[a:2] p");
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "TRUE\n");

    let out = run("[a:199/100] p");
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "FALSE\n");

    let out = disco(&[&base[..], &["[a:2] p", "--max-depth", "1"]].concat());
    assert_eq!(
        code(&out),
        2,
        "depth 1 cannot certify the loop: {}",
        stdout(&out)
    );
    assert!(stdout(&out).starts_with("UNKNOWN"));
}

#[test]
fn check_rejects_bad_inputs() {
    let game = corpus("fig1.game");
    for args in [
        vec![
            "check",
            game.as_str(),
            "--state",
            "w",
            "--gamma",
            "3/2",
            "--formula",
            "p",
        ],
        vec![
            "check",
            game.as_str(),
            "--state",
            "w",
            "--gamma",
            "0",
            "--formula",
            "p",
        ],
        vec![
            "check",
            game.as_str(),
            "--state",
            "w",
            "--gamma",
            "1/2",
            "--formula",
            "[a:",
        ],
        vec!["check", game.as_str(), "--state", "w", "--gamma", "1/2"],
    ] {
        let out = disco(&args);
        assert_eq!(code(&out), 3, "{args:?}");
    }
}

#[test]
fn goal_cap_override_comes_from_the_environment() {
    let args = [
        "check",
        &corpus("fig1.game"),
        "--state",
        "w",
        "--gamma",
        "1/2",
        "--formula",
        "[a:2] p",
    ];
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_disco"))
            .args(args)
            .env("DISCO_MAX_GOALS", value)
            .output()
            .expect("binary runs")
    };
    let out = run("1");
    assert_eq!(code(&out), 2, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("UNKNOWN"));
    let out = run("not-a-number");
    assert_eq!(code(&out), 3);
}

#[test]
fn oracle_mode_uses_the_bounded_horizon() {
    let out = disco(&[
        "check",
        &corpus("fig1.game"),
        "--state",
        "w",
        "--gamma",
        "1/2",
        "--formula",
        "[a:4] p",
        "--oracle",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "TRUE\n");
}

#[test]
fn witness_round_trips_through_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let witness: PathBuf = dir.path().join("fig2.strategy");
    let out = disco(&[
        "check",
        &corpus("fig2.game"),
        "--state",
        "w",
        "--gamma",
        "1/2",
        "--formula",
        "[a:4/3, b:2/3] p",
        "--witness",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(witness.is_file());
    let out = disco(&[
        "simulate",
        &corpus("fig2.game"),
        witness.to_str().unwrap(),
        "--start",
        "w",
        "--depth",
        "8",
        "--gamma",
        "1/2",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("cost: a: "));
}

#[test]
fn simulate_prints_the_discounted_cost_in_lowest_terms() {
    let out = disco(&[
        "simulate",
        &corpus("fig2.game"),
        &corpus("fig2_alt.strategy"),
        "--start",
        "w",
        "--depth",
        "4",
        "--gamma",
        "1/2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("play: w -> u -> w -> u -> w\n"), "{text}");
    assert!(text.ends_with("cost: a: 5/4, b: 5/8\n"), "{text}");
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn prove_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let valid = write(
        dir.path(),
        "ok.proof",
        "1: [a:1] p -> p ; axiom Refl\n2: [a:1] p -> [a:1] [a:1] p ; axiom Trans\n",
    );
    let out = disco(&["prove", valid.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "VALID\n");

    let nec_scope = write(
        dir.path(),
        "nec.proof",
        "hyp: p\n1: p ; hyp 1\n2: [a:1] p ; nec [a:1] 1\n",
    );
    let out = disco(&["prove", nec_scope.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(
        stdout(&out).starts_with("line 2: E-NEC-SCOPE"),
        "{}",
        stdout(&out)
    );

    let empty = write(dir.path(), "empty.proof", "");
    assert_eq!(code(&disco(&["prove", empty.to_str().unwrap()])), 3);
    assert_eq!(code(&disco(&["prove", "/nonexistent.proof"])), 3);
}

#[test]
fn reproduce_passes_and_detects_tampering() {
    let out = disco(&["reproduce"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).matches(" PASS").count(), 11);

    // A corpus with a broken fig1 valuation must produce FAIL lines.
    let dir = tempfile::tempdir().unwrap();
    for file in ["fig1.game", "fig2.game", "fig3.game"] {
        let text = std::fs::read_to_string(disco::default_corpus_dir().join(file)).unwrap();
        let text = if file == "fig1.game" {
            text.replace("\"p\": [\"w\", \"u\", \"v\"]", "\"p\": [\"w\", \"u\"]")
        } else {
            text
        };
        write(dir.path(), file, &text);
    }
    let out = disco(&["reproduce", "--corpus", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains(" FAIL"));

    // A corrupt game file is a usage error.
    write(dir.path(), "fig1.game", "{ not json");
    let out = disco(&["reproduce", "--corpus", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn reproduce_accepts_a_gamma_override() {
    let out = disco(&["reproduce", "--gamma", "2/3"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(code(&disco(&["reproduce", "--gamma", "5/3"])), 3);
}

#[test]
fn bad_usage_is_exit_three() {
    assert_eq!(code(&disco(&[])), 3);
    assert_eq!(code(&disco(&["frobnicate"])), 3);
}
