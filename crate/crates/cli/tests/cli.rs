use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symtensor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn verify_exact_families() {
    let out = run(&["verify", "C0", "C1", "C4", "C5", "CI", "--d", "3..8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_c3_ladder() {
    let out = run(&["verify", "C3", "--d", "8,16,32"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("AsymptoticConsistent"));
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = run(&["verify", "BogusName"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown family"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(code(&run(&["verify", "C0", "--d", "8,4"])), 2);
    assert_eq!(code(&run(&["verify", "C0", "--d", "x"])), 2);
    assert_eq!(code(&run(&["verify", "D1", "--kernel", "frobenius"])), 2);
    assert_eq!(code(&run(&["verify", "C0", "--format", "xml"])), 2);
    assert_eq!(code(&run(&["radial", "C5", "--restarts", "0"])), 2);
    assert_eq!(code(&run(&["puiseux", "--pattern", "Nope"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn spectrum_c4_is_exact() {
    let out = run(&["spectrum", "C4", "--d", "4..8"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ExactMatch"));
}

#[test]
fn csv_output() {
    let out = run(&["spectrum", "C4", "--d", "4,5", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert!(!rdr.headers().unwrap().is_empty());
    assert!(rdr.records().count() > 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["radial", "C5", "--d", "4", "--restarts", "4", "--seed", "3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn radial_verdicts() {
    let c5 = json(&run(&["radial", "C5", "--d", "4"]));
    assert!(c5.to_string().contains("SaddleCertified"));
    let ci = run(&["radial", "CI", "--d", "4"]);
    assert_eq!(code(&ci), 0);
    assert!(String::from_utf8_lossy(&ci.stdout).contains("NotASaddle"));
}

#[test]
fn puiseux_diagonal_frobenius() {
    let out = run(&["puiseux", "--pattern", "DiagSd", "--kernel", "frobenius"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("-3/4"), "{text}");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("symtensor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let out_path = dir.join("report.json");
    std::fs::write(
        &cfg,
        format!("# run\nd = 3,4\nout = {}\n", out_path.display()),
    )
    .unwrap();
    let out = run(&["verify", "C0", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    let ds = v.to_string();
    assert!(ds.contains("\"d\":3") && ds.contains("\"d\":4") && !ds.contains("\"d\":5"));

    let flagged = dir.join("flagged.json");
    let out = run(&[
        "verify",
        "C0",
        "--config",
        cfg.to_str().unwrap(),
        "--d",
        "5",
        "--out",
        flagged.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let ds = std::fs::read_to_string(&flagged)
        .unwrap()
        .replace([' ', '\n'], "");
    assert!(ds.contains("\"d\":5") && !ds.contains("\"d\":3"));
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(
        code(&run(&["verify", "C0", "--config", cfg.to_str().unwrap()])),
        2
    );
    std::fs::remove_dir_all(&dir).ok();
}
