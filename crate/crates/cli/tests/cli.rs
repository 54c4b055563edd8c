use std::io::Write;
use std::process::{Command, Output};

use proptest::prelude::*;
use ratdyn_cli::{parse_family, serialize_family};
use serde_json::Value;

fn family_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn ratdyn(args: &[&str], text: &str) -> (Output, tempfile::NamedTempFile) {
    let file = family_file(text);
    let out = Command::new(env!("CARGO_BIN_EXE_ratdyn"))
        .args(args)
        .arg(file.path())
        .env_remove("RATDYN_MAX_PROBES")
        .output()
        .unwrap();
    (out, file)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const MOBIUS_BOUNDARY: &str = "degree=1; num=[1, -t]; den=[1/t, 1]";
const Z2_T: &str = "degree=2; num=[1,0,t]; den=[0,0,1]";
const Z2_INV_T: &str = "degree=2; num=[1,0,1/t]; den=[0,0,1]";

#[test]
fn classify_mobius_family() {
    let (out, _f) = ratdyn(&["classify"], MOBIUS_BOUNDARY);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classification"], "boundary_pgr");
    assert_eq!(v["ord_res"], "2");
    assert_eq!(v["pgr"], "pgr");
    assert_eq!(v["witness"], "M = [[t^(1/2),0],[0,t^(-1/2)]]");
    assert_eq!(v["witness_recheck"], true);
    assert_eq!(v["min_ord_res"], "0");
    assert_eq!(v["ramification"], 2);
}

#[test]
fn classify_interior() {
    let (out, _f) = ratdyn(&["classify"], Z2_T);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classification"], "interior");
    assert_eq!(v["ord_res"], "0");
}

#[test]
fn schema_keys_are_stable() {
    for cmd in ["limit", "pgr", "classify", "verify", "iterate"] {
        let (out, _f) = ratdyn(&[cmd], MOBIUS_BOUNDARY);
        let v = json(&out);
        for key in ["classification", "ord_res", "pgr", "witness", "min_ord_res", "ramification", "probes", "convergence"] {
            assert!(v.get(key).is_some(), "{cmd} lacks {key}");
        }
    }
}

#[test]
fn tiny_budget_is_inconclusive() {
    let (out, _f) = ratdyn(&["pgr", "--max-probes", "3"], Z2_INV_T);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["pgr"], "inconclusive");
    let (out, _f) = ratdyn(&["classify", "--max-probes", "3"], Z2_INV_T);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn environment_overrides_flags() {
    let file = family_file(Z2_INV_T);
    let out = Command::new(env!("CARGO_BIN_EXE_ratdyn"))
        .arg("pgr")
        .arg(file.path())
        .env("RATDYN_MAX_PROBES", "3")
        .env("RATDYN_FORMAT", "text")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("inconclusive"));
}

#[test]
fn input_errors_exit_one() {
    let (out, _f) = ratdyn(&["classify"], "num=[1,(]");
    assert_eq!(out.status.code(), Some(1));
    let err = json(&out)["error"].as_str().unwrap().to_string();
    assert!(err.contains("column 9"), "{err}");
    let (out, _f) = ratdyn(&["classify"], "degree=2; num=[1,0]; den=[0,0,1]");
    assert_eq!(out.status.code(), Some(1));
    let (out, _f) = ratdyn(&["limit"], "degree=1; num=[1,t]; den=[1,t]");
    assert_eq!(out.status.code(), Some(1));
    let (out, _f) = ratdyn(&["verify", "--t0", "2"], MOBIUS_BOUNDARY);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    for cmd in ["classify", "verify", "iterate"] {
        for text in [MOBIUS_BOUNDARY, Z2_INV_T] {
            let (a, _f) = ratdyn(&[cmd], text);
            let (b, _g) = ratdyn(&[cmd], text);
            assert_eq!(a.stdout, b.stdout, "{cmd}");
        }
    }
}

#[test]
fn conjugated_limit_from_witness() {
    let text = format!("{MOBIUS_BOUNDARY}\nM = [[t^(1/2),0],[0,t^(-1/2)]]");
    let (out, _f) = ratdyn(&["limit"], &text);
    let v = json(&out);
    assert_eq!(v["conjugated"]["beth_landing"], true);
    assert_eq!(v["conjugated"]["ord_res"], "0");
    assert_eq!(v["conjugated"]["orders_agree"], true);
}

#[test]
fn verify_table() {
    let (out, _f) = ratdyn(&["verify", "--samples", "10", "--t0", "1/3"], MOBIUS_BOUNDARY);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let table = v["convergence"].as_array().unwrap();
    assert_eq!(table[0]["polynomial"], "a0*b1 - a1*b0");
    assert_eq!(table[0]["samples"].as_array().unwrap().len(), 10);
    assert_eq!(table[1]["tail_max_deviation"], 0.0);
}

#[test]
fn iterate_reports_power() {
    let (out, _f) = ratdyn(&["iterate", "--iterate-power", "3"], Z2_T);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["iterate"]["power"], 3);
    assert_eq!(v["iterate"]["good_reduction"], true);
    assert_eq!(v["pgr"], "pgr");
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..20).prop_map(|n| n.to_string()),
        Just("t".to_string()),
        (-3i64..4).prop_map(|k| format!("t^({k})")),
        (1i64..4, 2i64..4).prop_map(|(p, q)| format!("t^({p}/{q})")),
    ]
}

fn expr() -> impl Strategy<Value = String> {
    atom().prop_recursive(3, 12, 2, |inner| {
        (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]), inner)
            .prop_map(|(a, op, b)| format!("({a}) {op} ({b})"))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn parse_serialize_parse(entries in prop::collection::vec(expr(), 4)) {
        let text = format!("num=[{}, {}]; den=[{}, {}]", entries[0], entries[1], entries[2], entries[3]);
        if let Ok(f) = parse_family(&text) {
            let again = parse_family(&serialize_family(&f)).unwrap();
            prop_assert_eq!(again, f);
        }
    }
}
