use std::process::Command;

use kraus_cli::{dispatch, execute, CommandReport, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn run(args: &[&str]) -> (CommandReport, String) {
    let ex = execute(std::iter::once("kraus").chain(args.iter().copied()));
    (ex.report, ex.text)
}

fn round_trips(r: &CommandReport) {
    let text = serde_json::to_string_pretty(r).unwrap();
    let back: CommandReport = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, r);
}

fn failures(r: &CommandReport) -> Vec<String> {
    r.outcome["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn cyclotomic_r4() {
    let (r, text) = run(&["field", "cyclotomic", "--r", "4"]);
    assert_eq!(r.exit_code, EXIT_OK);
    assert_eq!(r.command, "field cyclotomic");
    assert_eq!(r.outcome["defining_poly"], "x^4 - 4*x^2 + 2");
    assert_eq!(r.outcome["sturm_real_roots"], 4);
    assert_eq!(r.outcome["primes_above_2"][0]["e"], 4);
    assert!(text.contains("e=4 at 2"), "{text}");
    assert!(text.contains("Eisenstein at 2: true"), "{text}");
}

#[test]
fn search_over_q_finds_nothing_of_conductor_2() {
    let (r, text) = run(&["scout", "search", "--field", "Q", "--target", "2", "--height", "200", "--jobs", "2"]);
    assert_eq!(r.exit_code, EXIT_OK, "{text}");
    assert!(text.lines().any(|l| l == "0 hits"), "{text}");
    assert_eq!(r.outcome["search"]["totals"]["enumerated"], 401 * 401);
    assert_eq!(r.inputs["jobs"], 2);
}

#[test]
fn conductor_24_hit() {
    let (r, text) = run(&["scout", "search", "--conductor", "24", "--height", "3", "--torsion", "full"]);
    assert_eq!(r.exit_code, EXIT_OK, "{text}");
    let hits = r.outcome["search"]["hits"].as_array().unwrap();
    assert!(hits.iter().any(|h| h["point"]["a"] == serde_json::json!([2]) && h["point"]["b"] == serde_json::json!([-3])));
}

#[test]
fn degenerate_triple_fails_normalization() {
    let (r, text) = run(&["kraus", "normalize", "--triple", "[1,1,-2]"]);
    assert_eq!(r.exit_code, EXIT_FAILURE);
    assert!(failures(&r).iter().any(|f| f.contains("PotentiallyMultiplicativeAtP") || f.contains("potentially multiplicative")), "{:?}", failures(&r));
    assert!(!text.is_empty());
}

#[test]
fn lambda_certificate_is_local_only() {
    let (r, _) = run(&["kraus", "normalize", "--field", "Qsqrt2", "--lam", "[0,16]"]);
    assert_eq!(r.exit_code, EXIT_OK);
    assert_eq!(r.outcome["certificate"]["t"], 9);
}

#[test]
fn audits() {
    let (ok, _) = run(&["field", "audit", "--field", "Qsqrt2"]);
    assert_eq!(ok.exit_code, EXIT_OK);
    let (bad, _) = run(&["field", "audit", "--field", "Qsqrt3"]);
    assert_eq!(bad.exit_code, EXIT_FAILURE);
    assert!(!failures(&bad).is_empty());
    let (odd, _) = run(&["field", "audit", "--field", "[1,1,1]", "--l", "3"]);
    assert_eq!(odd.exit_code, EXIT_FAILURE);
    assert_eq!(odd.outcome["error"]["kind"], "MissingWitness");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["field", "audit", "--field", "Qsqrt4x"],
        vec!["scout", "search", "--height", "3"],
        vec!["kraus", "normalize"],
        vec!["curve", "invariants", "--ainvs", "[1,2]"],
        vec!["curve", "reduce", "--ainvs", "[0,0,1,-1,0]", "--prime", "9"],
        vec!["curve", "reduce", "--ainvs", "[0,0,1,-1,0]", "--prime", "37", "--index", "1"],
        vec!["frobnicate"],
    ] {
        let (r, text) = run(&args);
        assert_eq!(r.exit_code, EXIT_USAGE, "{args:?}: {text}");
        round_trips(&r);
    }
    let (help, text) = run(&["--help"]);
    assert_eq!(help.exit_code, EXIT_OK);
    assert!(text.contains("scout"));
}

#[test]
fn every_subcommand_round_trips() {
    let cases: &[&[&str]] = &[
        &["field", "audit", "--field", "Zeta16plus"],
        &["field", "cyclotomic", "--r", "3"],
        &["curve", "invariants", "--ainvs", "[0,-1,1,-10,-20]"],
        &["curve", "reduce", "--ainvs", "[0,-1,1,-10,-20]", "--prime", "11"],
        &["curve", "conductor", "--ainvs", "[0,-1,1,-10,-20]"],
        &["kraus", "normalize", "--triple", "[3,5,-8]"],
        &["frey", "check", "--witness", "{\"a\":1,\"b\":-1,\"c\":0,\"p\":5}"],
        &["scout", "search", "--target", "2", "--height", "4"],
        &["scout", "congruence", "--ainvs", "[0,-1,1,-10,-20]", "--l", "5", "--q-bound", "100"],
        &["flt-pipeline", "--field", "[-2,0,0,1]", "--witness", "{\"a\":1,\"b\":1,\"c\":[0,-1,0],\"p\":3}"],
    ];
    for args in cases {
        let r = dispatch(std::iter::once("kraus").chain(args.iter().copied()));
        assert_ne!(r.exit_code, EXIT_USAGE, "{args:?}: {:?}", r.outcome);
        assert!(r.outcome["failures"].is_array() && r.outcome["unresolved"].is_array());
        let clean = failures(&r).is_empty() && r.outcome["unresolved"].as_array().unwrap().is_empty();
        assert_eq!(r.exit_code == EXIT_OK, clean, "{args:?}");
        round_trips(&r);
    }
}

#[test]
fn eleven_a1() {
    let (r, _) = run(&["curve", "conductor", "--ainvs", "[0,-1,1,-10,-20]"]);
    assert_eq!(r.exit_code, EXIT_OK);
    let (c, _) = run(&["scout", "congruence", "--ainvs", "[0,-1,1,-10,-20]", "--l", "5", "--q-bound", "500"]);
    assert_eq!(c.exit_code, EXIT_OK);
    assert_eq!(c.outcome["scan"]["global_n_max"], 1);
}

#[test]
fn binary_writes_json_and_sets_exit_code() {
    let dir = std::env::temp_dir().join(format!("kraus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_kraus"))
        .args(["kraus", "normalize", "--triple", "[1,1,-2]", "--json"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_FAILURE));
    let r: CommandReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.exit_code, EXIT_FAILURE);
    assert_eq!(r.command, "kraus normalize");
    assert!(matches!(r.inputs["command"]["kraus"]["normalize"]["triple"], Value::String(_)));

    let output = Command::new(env!("CARGO_BIN_EXE_kraus"))
        .args(["field", "cyclotomic", "--r", "5", "--json", "-"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_OK));
    let r: CommandReport = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(r.outcome["degree"], 8);

    let bad = Command::new(env!("CARGO_BIN_EXE_kraus")).args(["curve", "reduce"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    std::fs::remove_dir_all(&dir).ok();
}
