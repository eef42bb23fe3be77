use std::process::{Command, Output};

use serde_json::Value;

fn hwmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwmt")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn polar_dual_of_weighted_simplex() {
    let out = hwmt(&["polytope", "dual", "--vertices", "1,0,0;0,1,0;0,0,1;-3,-1,-1"]);
    assert!(out.status.success());
    let v = &json_lines(&out)[0]["vertices"];
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert!(v.as_array().unwrap().contains(&serde_json::json!([-1, 5, -1])));
}

#[test]
fn pair_check_exit_codes() {
    let ok = hwmt(&["pair", "check", "--pair", "0,4311"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_lines(&ok)[0]["mirror_kernel_pair"], true);
    let bad = hwmt(&["pair", "check", "--pair", "0,2"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn bad_prime_is_a_usage_error() {
    let out = hwmt(&["hw", "--family", "quartic", "--psi", "2", "--primes", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_reports_congruence() {
    let out = hwmt(&["count", "--family", "sextic", "--psi", "1,2", "--primes", "5,7"]);
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["congruence_ok"] == true));
}

#[test]
fn group_ii_values_at_thirteen() {
    let out = hwmt(&["hw", "--family", "group-ii", "--psi", "1,5,8,12", "--primes", "13"]);
    assert!(out.status.success());
    assert!(json_lines(&out).iter().all(|r| r["hw"] == 7));
}

#[test]
fn key_lemma_verification() {
    let out = hwmt(&["verify", "key-lemma", "--pair", "2,4317", "--psi", "1,2,3", "--primes", "5,7,11"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let last = json_lines(&out).pop().unwrap();
    assert_eq!(last["failed"], 0);
}

#[test]
fn census_counts() {
    let out = hwmt(&["census", "--report", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["counts"]["pairs"], 32);
    assert_eq!(v["counts"]["self_dual"], 6);
    assert_eq!(v["counts"]["types"], 16);
}

#[test]
fn picard_fuchs_result() {
    let out = hwmt(&["pf", "analyze", "--family", "sextic"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("3F2(1/6,1/2,5/6;1,1 | 1728/psi^6)"));
}

#[test]
fn output_is_deterministic() {
    let args = ["hw", "--family", "group-i", "--psi", "1,2,3", "--primes", "5,7,11,13"];
    assert_eq!(hwmt(&args).stdout, hwmt(&args).stdout);
}

#[test]
fn verify_skips_psi_divisible_by_p() {
    let out = hwmt(&["verify", "congruence", "--family", "sextic", "--psi", "5", "--primes", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let last = json_lines(&out).pop().unwrap();
    assert_eq!(last["skipped"], 1);
}
