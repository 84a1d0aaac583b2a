use std::process::{Command, Output};

use serde_json::Value;

fn qbracket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbracket")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn verify_prints_a_passing_report() {
    let o = qbracket(&["verify", "npoint", "--points", "2,3", "--order", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["identity"], "npoint");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["order_checked"], 8);
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn timing_is_opt_in() {
    let v = json(&qbracket(&["verify", "lemma22", "--n", "3", "--timing"]));
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn numeric_reports_carry_tolerance() {
    let o = qbracket(&["verify", "diffeq-f", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["tolerance_info"]["mode"], "numeric");
}

#[test]
fn series_outputs_match_known_coefficients() {
    let v = json(&qbracket(&["series", "eta", "--order", "5"]));
    assert_eq!(v["offset"], "1/24");
    assert_eq!(v["coeffs"], serde_json::json!(["1", "-1", "-1", "0", "0", "1"]));

    let v = json(&qbracket(&["series", "bracket", "--ks", "1", "--order", "3"]));
    assert_eq!(v["coeffs"], serde_json::json!(["-1/24", "1", "3", "4"]));
}

#[test]
fn character_series_round_trip_their_own_schema() {
    let v = json(&qbracket(&["series", "omega", "--K", "2", "--order", "2"]));
    assert_eq!(v["K"], 2);
    assert!(!v["terms"].as_array().unwrap().is_empty());
}

#[test]
fn list_names_every_check() {
    let v = json(&qbracket(&["list"]));
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    for id in ["npoint", "thm21", "skew-npoint", "counts", "cyclic-identity"] {
        assert!(ids.contains(&id), "{id} missing");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qbracket(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(qbracket(&["series", "theta", "--points", "2,3"]).status.code(), Some(2));
    assert_eq!(qbracket(&["verify", "lemma84", "--m", "4", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_qbracket")).arg("list").env("QBRACKET_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
