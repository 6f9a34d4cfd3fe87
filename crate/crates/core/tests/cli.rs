use std::path::PathBuf;
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn sdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(name: &str) -> String {
    golden(name).to_string_lossy().into_owned()
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn verify_inner_derivation_passes() {
    let out = sdlab(&[
        "verify",
        "--sigma",
        &path("sigma_identity.json"),
        "--d",
        &path("d_ad_e01.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["residuals"]["leibniz"], 0.0);
    assert_eq!(r["inputs"]["sigma"].as_str().unwrap().len(), 64);
}

#[test]
fn suite_specs_cover_every_exit_status() {
    let pass = sdlab(&["run", &path("verify_pass.json")]);
    assert_eq!(pass.status.code(), Some(0));
    let fail = sdlab(&["run", &path("verify_fail.json")]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(report(&fail)["residuals"]["leibniz"], 1.0);
    let bad = sdlab(&["run", &path("malformed.json")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    let msg = String::from_utf8(bad.stderr).unwrap();
    assert!(msg.contains("line 4"), "{msg}");
}

#[test]
fn missing_file_and_bad_flags_are_invalid_input() {
    let out = sdlab(&["verify", "--sigma", "/nonexistent.json", "--d", &path("d_ad_e01.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = sdlab(&["example26", "--n", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sdlab(&["construct", "--method", "thm99", "--sigma", "a", "--d", "b"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_failures_exit_with_two() {
    // ad_{E01} is not *-preserving, which the range construction requires
    let out = sdlab(&[
        "construct",
        "--method",
        "thm32",
        "--sigma",
        &path("sigma_identity.json"),
        "--d",
        &path("d_ad_e01.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("precondition"));
    let ok = sdlab(&["run", &path("construct_thm33.json")]);
    assert_eq!(ok.status.code(), Some(0));
    let r = report(&ok);
    assert!(r["result"]["P"]["entries"].is_array());
    assert!(r["singular_values"].is_array());
}

#[test]
fn solve_reports_dimension() {
    let out = sdlab(&["solve", "--sigma", &path("sigma_identity.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["dimension"], 3);
    let star = sdlab(&["solve", "--sigma", &path("sigma_identity.json"), "--star"]);
    assert_eq!(report(&star)["result"]["dimension"], 3);
}

#[test]
fn symmetrize_rejects_non_star_derivation() {
    let s = path("sigma_identity.json");
    let out = sdlab(&["symmetrize", "--sigma", &s, "--tau", &s, "--d", &path("d_ad_e01.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["example26", "--n", "9", "--alpha", "random", "--seed", "11"];
    let (a, b) = (sdlab(&args), sdlab(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = path("sigma_identity.json");
    let d = path("d_ad_e01.json");
    let args = [
        "semidirect",
        "--sigma",
        &s,
        "--d",
        &d,
        "--norm-budget",
        "3",
        "--seed",
        "2",
    ];
    let (a, b) = (sdlab(&args), sdlab(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // keys come out sorted
    let text = String::from_utf8(a.stdout).unwrap();
    let order: Vec<usize> = [
        "\"args\"",
        "\"command\"",
        "\"inputs\"",
        "\"passed\"",
        "\"residuals\"",
        "\"result\"",
        "\"tolerances\"",
    ]
    .iter()
    .map(|k| text.find(k).unwrap())
    .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn tolerance_flags_are_echoed() {
    let out = sdlab(&[
        "verify",
        "--sigma",
        &path("sigma_identity.json"),
        "--d",
        &path("sigma_identity.json"),
        "--tol",
        "2",
        "--rank-tol",
        "1e-10",
    ]);
    // with identity_tol = 2 the unit residual passes
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["tolerances"]["identity_tol"], 2.0);
    assert_eq!(r["tolerances"]["rank_tol_factor"], 1e-10);
    assert_eq!(
        sdlab(&["verify", "--sigma", "x", "--d", "y", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
}
