use std::path::PathBuf;
use std::process::Command;

use sharpembed::certify::EnvelopeFixture;
use sharpembed::cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE, THREADS_ENV};
use sharpembed::exactmath::{int, Poly};

fn run_capture(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("sharpembed").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sharpembed-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn amplitude_examples() {
    let (code, out, _) = run_capture(&["amplitude", "--r", "5", "--k", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("(9 - 36t + 294t^2 - 644t^3 + 441t^4)/128"), "{out}");
    assert!(out.contains("m = 1"));

    let (_, out, _) = run_capture(&["amplitude", "--r", "1", "--k", "0", "--x", "0"]);
    assert!(out.contains("= 1/2"), "{out}");

    let (code, out, _) = run_capture(&["amplitude", "--r", "2", "--k", "1", "--x", "0.5", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["values"][0]["amplitude_squared"], "21/128");
    assert_eq!(json["exponent"], 1);
}

#[test]
fn lambda_examples() {
    let (code, out, _) = run_capture(&["lambda", "--r", "5", "--k", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("lambda^2 = 128/9"));
    assert!(out.contains("0.33365869"));
    assert!(out.contains("disagrees"));

    let (_, out, _) = run_capture(&["lambda", "--r", "2", "--k", "1"]);
    assert!(out.contains("2.44948974") && out.contains("0.57735026") && out.contains("not certified"), "{out}");

    let (_, out, _) = run_capture(&["lambda", "--r", "1", "--k", "0"]);
    assert!(out.contains("1.41421356"), "{out}");
}

#[test]
fn scan_examples() {
    let (code, out, _) = run_capture(&["scan", "--r", "2", "--k", "1", "--points", "5"]);
    assert_eq!(code, EXIT_OK);
    let exact: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(exact, ["0/1", "21/128", "1/8", "21/128", "0/1"]);

    let (_, out, _) = run_capture(&["scan", "--r", "1", "--k", "0", "--points", "3"]);
    let exact: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(exact, ["0/1", "1/2", "0/1"]);

    let (_, out, _) = run_capture(&["scan", "--r", "5", "--k", "4", "--points", "3"]);
    assert!(out.lines().nth(2).unwrap().starts_with("0/1,9/128,"), "{out}");
}

#[test]
fn usage_errors() {
    for args in [
        &["amplitude", "--r", "3", "--k", "3"][..],
        &["amplitude", "--r", "3", "--k", "1", "--x", "3/2"],
        &["scan", "--r", "3", "--k", "1", "--points", "1"],
        &["lambda", "--r", "3", "--k", "1", "--points", "10"],
        &["certify", "--k", "5"],
        &["certify", "--k", "4", "--mesh-multiplier", "0"],
        &["scan", "--r", "3", "--k", "1", "--precision", "0"],
        &["bogus"],
    ] {
        assert_eq!(run_capture(args).0, EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn certify_without_fixture_exits_two() {
    let (code, _, err) = run_capture(&["certify", "--k", "8"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(err.contains("fixture"), "{err}");
}

#[test]
fn certify_amended_k4_passes_and_published_k4_fails() {
    let (code, out, _) = run_capture(&["certify", "--k", "4", "--fixture", "k4-amended", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["verdict"], "proven");
    assert_eq!(json["covered_r"], "all r >= 5");
    assert_eq!(json["lambda_table"][0]["lambda_squared"], "128/9");

    let (code, out, _) = run_capture(&["certify", "--k", "4", "--format", "json"]);
    assert_eq!(code, EXIT_FAILED);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let failed: Vec<&str> = json["stages"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["status"] != "proven")
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["large_r_mesh"]);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["amplitude", "--r", "7", "--k", "6", "--x", "1/3", "--format", "json"][..],
        &["scan", "--r", "6", "--k", "3", "--points", "41"],
        &["lambda", "--r", "9", "--k", "4", "--format", "json"],
        &["certify", "--k", "4", "--fixture", "k4-amended", "--quick", "--format", "json"],
    ] {
        let first = run_capture(args);
        assert_eq!(first.0, EXIT_OK, "{args:?}");
        assert_eq!(first.1, run_capture(args).1, "{args:?}");
    }
}

#[test]
fn out_flag_writes_the_file() {
    let path = scratch("scan.csv");
    let path_str = path.to_str().unwrap();
    let (code, stdout, _) = run_capture(&["scan", "--r", "2", "--k", "1", "--points", "3", "--out", path_str]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("x,amplitude_squared,amplitude"));
    assert_eq!(written.lines().count(), 4);
}

#[test]
fn precision_controls_decimals() {
    let (_, out, _) = run_capture(&["scan", "--r", "1", "--k", "0", "--points", "3", "--precision", "30"]);
    let middle = out.lines().nth(2).unwrap().split(',').nth(2).unwrap().to_string();
    assert_eq!(middle.trim_start_matches("0.").len(), 30, "{middle}");
}

#[test]
fn selftest_passes_and_flags_a_corrupted_fixture() {
    let (code, out, _) = run_capture(&["selftest"]);
    assert_eq!(code, EXIT_OK, "{out}");

    let mut fixture = EnvelopeFixture::builtin(4).unwrap();
    fixture.qtilde_plus = &fixture.qtilde_plus + &Poly::monomial(int(5), 3);
    let path = scratch("corrupt.toml");
    std::fs::write(&path, fixture.to_toml()).unwrap();
    let (code, out, _) = run_capture(&["selftest", "--fixture", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.lines().any(|l| l.starts_with("FAIL") && l.contains("fixture_invariants")), "{out}");

    std::fs::write(&path, "not = [a fixture").unwrap();
    let (code, out, _) = run_capture(&["selftest", "--fixture", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("fixture_load"), "{out}");
}

#[test]
fn binary_exit_codes_and_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_sharpembed");
    let status = |args: &[&str]| Command::new(bin).args(args).env(THREADS_ENV, "2").output().unwrap();
    let ok = status(&["lambda", "--r", "5", "--k", "4", "--format", "json"]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(json["result"]["lambda_squared"], "128/9");
    assert_eq!(status(&["certify", "--k", "8"]).status.code(), Some(EXIT_FAILED));
    assert_eq!(status(&["amplitude", "--r", "2"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(status(&["--help"]).status.code(), Some(EXIT_OK));
}
