use std::process::{Command, Output};

use serde_json::Value;
use simplex_angles::PiExpr;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplex-angles"))
        .args(args)
        .env_remove("SIMPLEX_ANGLES_DIGITS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn pe(s: &str) -> PiExpr {
    s.parse().unwrap()
}

#[test]
fn j_example() {
    assert_eq!(stdout(&["J", "--n", "5", "--k", "2", "--beta", "0"]), "1692197/282240 * pi^-2\n");
}

#[test]
fn i_example() {
    assert_eq!(stdout(&["I", "--n", "7", "--k", "5", "--alpha", "4"]), "7 - 2144238917/190270080 * pi^-2\n");
}

#[test]
fn j_row_on_every_path() {
    let base = stdout(&["J", "--n", "4", "--beta", "0"]);
    assert_eq!(base, "k=1: 401/2560\nk=2: 2961/2560\nk=3: 2\nk=4: 1\n");
    for path in ["recursion-full", "direct", "direct-parity"] {
        assert_eq!(stdout(&["J", "--n", "4", "--beta", "0", "--path", path]), base, "{path}");
    }
}

#[test]
fn voronoi_plane_json() {
    let doc = json(&["voronoi", "--dim", "2", "--json"]);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        assert_eq!(PiExpr::from_json(&e.to_string()).unwrap(), PiExpr::int(6));
    }
}

#[test]
fn json_round_trip() {
    for args in [
        vec!["J", "--n", "7", "--k", "2", "--beta", "-1"],
        vec!["I", "--n", "7", "--k", "3", "--alpha", "4"],
        vec!["J-tilde", "--n", "5", "--k", "2", "--beta", "7/2"],
    ] {
        let text = stdout(&args);
        let mut with_json = args.clone();
        with_json.push("--json");
        let doc = json(&with_json);
        let value = PiExpr::from_json(&doc["value"].to_string()).unwrap();
        assert_eq!(value, pe(text.trim()), "{args:?}");
        assert_eq!(doc["value"]["exact"], text.trim());
    }
    assert_eq!(
        PiExpr::from_json(&json(&["J", "--n", "7", "--k", "2", "--beta", "-1", "--json"])["value"].to_string()).unwrap(),
        pe("113537407/16128000 * pi^-4")
    );
}

#[test]
fn ball_and_sphere() {
    let ball = stdout(&["reitzner", "ball", "--dim", "3"]);
    assert_eq!(ball, "prefactor: 35/12 * pi^(1/2) * 3^(1/2)\nk=0: 1/2\nk=1: 3/2\nk=2: 1\n");
    assert_eq!(stdout(&["reitzner", "sphere", "--dim", "3"]), "k=0: 1\nk=1: 3\nk=2: 2\n");
    let doc = json(&["reitzner", "ball", "--dim", "2", "--json", "--digits", "10"]);
    assert_eq!(doc["constants_decimal"].as_array().unwrap().len(), 2);
}

#[test]
fn decimal_digits_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_simplex-angles"))
        .args(["J", "--n", "4", "--k", "1", "--beta", "0", "--output", "decimal"])
        .env("SIMPLEX_ANGLES_DIGITS", "5")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0.15664\n");
    let both = stdout(&["J", "--n", "4", "--k", "1", "--beta", "0", "--output", "both", "--digits", "3"]);
    assert_eq!(both, "401/2560 ~ 0.157\n");
}

#[test]
fn verify_passes_with_zero_residuals() {
    let out = stdout(&["verify", "--n", "6", "--beta", "-1"]);
    let residuals: Vec<&str> = out.lines().filter(|l| !l.starts_with("structure") && l.contains(": ")).collect();
    assert!(!residuals.is_empty());
    assert!(residuals.iter().all(|l| l.ends_with(": 0")), "{out}");
    assert!(out.ends_with("all checks passed\n"));
    let doc = json(&["verify", "--n", "5", "--beta", "3", "--family", "beta-prime", "--json"]);
    assert_eq!(doc["passed"], true);
}

#[test]
fn conjectures_report() {
    let out = stdout(&["conjectures", "--max-n", "5"]);
    assert!(out.lines().last().unwrap().starts_with("holds on"));
    assert!(!out.contains("FAILS"));
}

#[test]
fn cache_is_neutral() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("tables.json");
    let cache = cache.to_str().unwrap();
    for args in [
        vec!["J", "--n", "8", "--beta", "1/2"],
        vec!["voronoi", "--dim", "4", "--json"],
        vec!["reitzner", "sphere", "--dim", "5", "--output", "both"],
    ] {
        let plain = stdout(&args);
        let mut cached = args.clone();
        cached.extend(["--cache", cache]);
        assert_eq!(stdout(&cached), plain, "cold cache {args:?}");
        assert_eq!(stdout(&cached), plain, "warm cache {args:?}");
    }
    let text = std::fs::read_to_string(cache).unwrap();
    assert!(text.contains("simplex-angles-cache/v1"));
}

#[test]
fn unknown_cache_schema_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("old.json");
    std::fs::write(&cache, r#"{"schema":"something-else/v9","entries":[]}"#).unwrap();
    let args = ["J", "--n", "5", "--k", "2", "--beta", "0"];
    let out = run(&[&args[..], &["--cache", cache.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), stdout(&args));
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
}

#[test]
fn oracle_runs_are_deterministic() {
    let mc = ["oracle", "mc", "--n", "4", "--beta", "0", "--simplices", "64", "--directions", "500", "--seed", "7"];
    assert_eq!(stdout(&mc), stdout(&mc));
    let quad = ["oracle", "quad-i", "--n", "4", "--k", "2", "--alpha", "2", "--json"];
    let doc = json(&quad);
    assert!(doc["relative_difference"].as_f64().unwrap() < 1e-10);
    assert_eq!(stdout(&quad), stdout(&quad));
}

#[test]
fn exit_codes() {
    // decimal parameters are rejected
    assert_eq!(run(&["J", "--n", "4", "--k", "1", "--beta", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["oracle", "mc", "--n", "4", "--beta", "0.5"]).status.code(), Some(1));
    // domain errors
    assert_eq!(run(&["J", "--n", "3", "--k", "4", "--beta", "0"]).status.code(), Some(1));
    assert_eq!(run(&["I-tilde", "--n", "3", "--k", "1", "--alpha", "0"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--n", "6", "--beta", "2", "--family", "beta-prime"]).status.code(), Some(1));
    // usage errors
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["voronoi", "--dim", "13"]).status.code(), Some(1));
    assert_eq!(run(&["J", "--n", "3", "--k", "1", "--beta", "0", "--digits", "0"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
