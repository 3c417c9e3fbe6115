use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn analyze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_analyze")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (Value, String) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = analyze(&a);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).unwrap(), text)
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("analyze-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

const LAMPLIGHTER: &str = r#"{"name": "lamplighter", "alphabet": 2, "generators": [
 {"name": "a", "table": [{"image": 1, "restriction": ["a"]}, {"image": 0, "restriction": ["b"]}]},
 {"name": "b", "table": [{"image": 0, "restriction": ["a"]}, {"image": 1, "restriction": ["b"]}]}]}"#;

#[test]
fn grigorchuk_is_not_hausdorff() {
    let (v, _) = json(&["--system", "grigorchuk", "hausdorff"]);
    assert_eq!(v["schema"], "ssg-report/1");
    assert_eq!(v["result"]["verdict"], "NonHausdorff");
    assert_eq!(v["result"]["element"], "b");
    assert_eq!(v["result"]["family"][0], "110");
    assert_eq!(v["result"]["family"][1], "111110");
}

#[test]
fn odometer_is_hausdorff() {
    let (v, _) = json(&["--system", "odometer2", "hausdorff"]);
    assert_eq!(v["result"]["verdict"], "Hausdorff");
}

#[test]
fn gf2_nucleus_element_is_singular() {
    let (v, _) = json(&["--system", "grigorchuk", "singular", "--field", "GF2", "--element", "nucleus:1,1,1,1"]);
    assert_eq!(v["result"]["verdict"], "Singular");
    let pts: Vec<&str> = v["result"]["points"].as_array().unwrap().iter().map(|p| p.as_str().unwrap()).collect();
    assert_eq!(pts, ["[(1, e, 1); (1)]", "[(1, b, 1); (1)]", "[(1, c, 1); (1)]", "[(1, d, 1); (1)]"]);
    let (v, _) = json(&["singular", "--element", "nucleus:1,1,1,1"]);
    assert_eq!(v["result"]["verdict"], "NonsingularCertificate");
}

#[test]
fn regular_open_and_msfw() {
    let (v, _) = json(&["regular-open", "--set", ",b,", "--set", ",c,", "--set", ",d,"]);
    assert_eq!(v["result"]["verdict"], "NotRegularOpen");
    assert_eq!(v["result"]["witness"], "[(∅, e, ∅); (1)]");
    let (v, _) = json(&["regular-open", "--set", "0,b,1"]);
    assert_eq!(v["result"]["verdict"], "RegularOpen");
    let (v, _) = json(&["msfw", "--element", "d", "--depth", "7"]);
    assert_eq!(v["result"]["words"], serde_json::json!(["0", "1110", "1111110"]));
    let (v, _) = json(&["nucleus"]);
    assert_eq!(v["result"]["size"], 5);
}

#[test]
fn convolution_of_inline_elements() {
    let f = r#"[{"alpha": "0", "g": "a", "beta": "1", "coefficient": "2"}]"#;
    let (v, _) = json(&["convolve", "--element", f, "--other", f]);
    let prod = v["result"]["product"].as_array().unwrap();
    assert!(prod.is_empty(), "{prod:?}");
    let g = r#"[{"alpha": "1", "g": "b", "beta": "0", "coefficient": "1/2"}]"#;
    let (v, _) = json(&["convolve", "--element", f, "--other", g]);
    assert_eq!(v["result"]["product"][0]["coefficient"], "1");
    assert_eq!(v["result"]["product"][0]["alpha"], "0");
    assert_eq!(v["result"]["product"][0]["beta"], "0");
}

#[test]
fn katsura_report_small_and_reducible() {
    let (v, _) = json(&["katsura-report", "--max-ell", "2", "--max-size", "2", "--samples", "10"]);
    assert_eq!(v["minimal"], true);
    assert_eq!(v["hausdorff"]["hausdorff"], false);
    assert_eq!(v["condition_s"]["satisfied"], true);
    let spec = temp_file("diag.json", r#"{"A": [[2, 0], [0, 2]], "B": [[1, 0], [0, 1]]}"#);
    let (v, _) = json(&["--spec", spec.to_str().unwrap(), "katsura-report", "--max-ell", "2", "--max-size", "1"]);
    assert_eq!(v["minimal"], false);
}

#[test]
fn json_round_trips_byte_identically_and_is_deterministic() {
    let cases: [&[&str]; 4] = [
        &["hausdorff"],
        &["singular", "--field", "GF2", "--element", "nucleus:1,1,1,1"],
        &["katsura-report", "--max-ell", "2", "--max-size", "2", "--samples", "10"],
        &["grig-report", "--samples", "10", "--depth", "8"],
    ];
    for args in cases {
        let (v, text) = json(args);
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, text, "{args:?}");
        assert_eq!(json(args).1, text, "{args:?} differs between runs");
    }
}

#[test]
fn grig_report_passes() {
    let (v, _) = json(&["grig-report", "--samples", "20", "--depth", "10"]);
    assert_eq!(v["all_checks_pass"], true);
    assert_eq!(v["note"], "char 0: no nucleus-family singular elements; char 2: singular element exists");
}

#[test]
fn input_errors_exit_2() {
    let out = analyze(&["--system", "nope", "hausdorff"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown built-in system"));

    let bad = temp_file("bad.json", r#"{"bad": 1}"#);
    let out = analyze(&["--spec", bad.to_str().unwrap(), "nucleus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed spec file"));

    let out = analyze(&["--field", "GF4", "singular", "--element", "nucleus:1,1,1,1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = analyze(&["msfw", "--element", "z"]);
    assert_eq!(out.status.code(), Some(2));

    let out = analyze(&["grig-report", "--system", "odometer2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = analyze(&["bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn undecided_exits_1_only_when_strict() {
    let spec = temp_file("lamp.json", LAMPLIGHTER);
    let p = spec.to_str().unwrap();
    let out = analyze(&["--spec", p, "--bound", "200", "--strict", "hausdorff"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Undecided"));
    let out = analyze(&["--spec", p, "--bound", "200", "hausdorff"]);
    assert_eq!(out.status.code(), Some(0));
    let out = analyze(&["--strict", "hausdorff"]);
    assert_eq!(out.status.code(), Some(0));
}
