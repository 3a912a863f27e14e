use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use handle_forge::cli::parse_matrix;
use handle_forge::profiles::sqrt_quadratic;
use handle_forge::Error;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_handle-forge"))
        .args(args)
        .env("HANDLE_FORGE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn construct_outer(dir: &Path) {
    let out = dir.to_str().unwrap();
    let o = run(&[
        "construct",
        "--out-dir",
        out,
        "--samples",
        "20000",
        "outer",
        "--lambda",
        "2",
        "--a",
        "1",
        "--eps",
        "0.5",
        "--relax",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn construct_then_verify_reproduces_the_margins() {
    let dir = tempfile::tempdir().unwrap();
    construct_outer(dir.path());
    let certify = json(&dir.path().join("certify.json"));
    assert_eq!(certify["passed"], Value::Bool(true));
    let handle = dir.path().join("handle.json");
    for (cond, stored) in [("9", 0), ("8", 1)] {
        let report = dir.path().join(format!("verify{cond}.json"));
        let o = run(&[
            "verify",
            "--profile",
            handle.to_str().unwrap(),
            "--condition",
            cond,
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        let again = json(&report);
        let before = certify["report"]["certificates"][stored]["report"]["min_margin"]
            .as_f64()
            .unwrap();
        let after = again["certificates"][0]["report"]["min_margin"]
            .as_f64()
            .unwrap();
        assert!(
            (before - after).abs() <= 1e-14 * before.abs().max(1.0),
            "{before} {after}"
        );
    }
}

#[test]
fn levi_oracle_agrees_with_the_certificate() {
    let dir = tempfile::tempdir().unwrap();
    construct_outer(dir.path());
    let handle = dir.path().join("handle.json");
    let o = run(&[
        "verify",
        "--profile",
        handle.to_str().unwrap(),
        "--condition",
        "9",
        "--levi-oracle",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 exceptions"));
}

#[test]
fn exit_codes_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // wrong regime and malformed input are usage errors
    assert_eq!(
        code(&run(&[
            "construct",
            "--out-dir",
            out,
            "outer",
            "--lambda",
            "0.5",
            "--eps",
            "0.5"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "construct",
            "--out-dir",
            out,
            "inner",
            "--lambda",
            "1.5",
            "--eps",
            "0.5"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "verify",
            "--profile",
            "/nonexistent.json",
            "--condition",
            "8"
        ])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(
        code(&run(&[
            "verify",
            "--profile",
            junk.to_str().unwrap(),
            "--condition",
            "8"
        ])),
        2
    );
    // a valid profile that fails the requested condition is a verification failure
    let g = dir.path().join("g.json");
    fs::write(&g, sqrt_quadratic(2.0, 1.0).unwrap().to_json().unwrap()).unwrap();
    let gp = g.to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "verify",
            "--profile",
            gp,
            "--condition",
            "8",
            "--lo",
            "0.1",
            "--hi",
            "10"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "verify",
            "--profile",
            gp,
            "--condition",
            "9",
            "--lo",
            "0.1",
            "--hi",
            "10"
        ])),
        0
    );
}

#[test]
fn verify_classifies_model_profiles() {
    let dir = tempfile::tempdir().unwrap();
    for (lambda, cond) in [(2.0, "9"), (0.5, "8"), (0.5, "6")] {
        let g = dir.path().join(format!("g{lambda}.json"));
        fs::write(&g, sqrt_quadratic(lambda, 1.0).unwrap().to_json().unwrap()).unwrap();
        let o = run(&[
            "verify",
            "--profile",
            g.to_str().unwrap(),
            "--condition",
            cond,
            "--lo",
            "0.1",
            "--hi",
            "10",
            "--grid",
            "10000",
            "--levi-oracle",
            "4",
        ]);
        assert_eq!(
            code(&o),
            0,
            "{lambda} {}",
            String::from_utf8_lossy(&o.stdout)
        );
    }
}

#[test]
fn model_region_lies_on_the_hyperbola() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    fs::write(&g, sqrt_quadratic(2.0, 1.0).unwrap().to_json().unwrap()).unwrap();
    let out = dir.path().join("region.csv");
    let o = run(&[
        "export",
        "--profile",
        g.to_str().unwrap(),
        "--what",
        "region",
        "--out",
        out.to_str().unwrap(),
        "--lo",
        "0",
        "--hi",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1000);
    for r in rows {
        let (x, y): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let q = 2.0 * x * x + 1.0;
        assert!((y * y - q).abs() <= 1e-12 * q, "{x} {y}");
    }
}

#[test]
fn outer_fprime_pieces_come_in_order() {
    let dir = tempfile::tempdir().unwrap();
    construct_outer(dir.path());
    let out = dir.path().join("fprime.csv");
    let handle = dir.path().join("handle.json");
    let o = run(&[
        "export",
        "--profile",
        handle.to_str().unwrap(),
        "--what",
        "fprime",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let mut pieces: Vec<String> = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for r in csv_rows(&out) {
        let t: f64 = r[0].parse().unwrap();
        assert!(t > last_t);
        last_t = t;
        if pieces.last() != Some(&r[2]) {
            pieces.push(r[2].clone());
        }
    }
    assert_eq!(
        pieces,
        [
            "inverse_sqrt_derivative_integral",
            "log_derivative_integral",
            "affine_derivative_integral",
            "sqrt_quadratic"
        ]
        .map(String::from)
    );
}

#[test]
fn quadratic_construct_and_region() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "construct",
        "--out-dir",
        out,
        "--samples",
        "20000",
        "quadratic",
        "--A",
        "diag:2",
        "--B",
        "diag:1",
        "--r",
        "1",
        "--eps",
        "0.5",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let handle = json(&dir.path().join("handle.json"));
    let c0 = handle["constants"]["c0"].as_f64().unwrap();
    assert!((c0 - 3.03576).abs() < 1e-4);
    let hp = dir.path().join("handle.json");
    let o = run(&[
        "verify",
        "--profile",
        hp.to_str().unwrap(),
        "--condition",
        "cap",
        "--levi-oracle",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = dir.path().join("kc.csv");
    let o = run(&[
        "export",
        "--profile",
        hp.to_str().unwrap(),
        "--what",
        "region",
        "--out",
        csv.to_str().unwrap(),
        "--n",
        "200",
        "--level",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&csv);
    assert!(rows.len() > 100);
    for r in rows {
        let (x, sq): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let h = json_h_value(&handle, x * x);
        // on the boundary τ = Q − h(|x|²) equals the level
        assert!((sq * sq - h - 1.0).abs() < 1e-8, "{x} {sq}");
    }
}

fn json_h_value(handle: &Value, s: f64) -> f64 {
    let p: handle_forge::profiles::RadialProfile =
        serde_json::from_value(handle["profiles"]["h"].clone()).unwrap();
    p.value(s).unwrap()
}

#[test]
fn matrices_parse_and_must_be_symmetric() {
    let m = parse_matrix("diag:2, 3,4").unwrap();
    assert_eq!(m.nrows(), 3);
    assert_eq!(
        (m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(0, 1)]),
        (2.0, 3.0, 4.0, 0.0)
    );
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("a.txt");
    fs::write(&f, "2 0.5\n0.5 3\n").unwrap();
    assert_eq!(parse_matrix(f.to_str().unwrap()).unwrap()[(0, 1)], 0.5);
    fs::write(&f, "2 0.5\n0.4 3\n").unwrap();
    assert!(parse_matrix(f.to_str().unwrap()).is_err());
    fs::write(&f, "2 0.5 1\n0.5 3\n").unwrap();
    assert!(matches!(
        parse_matrix(f.to_str().unwrap()),
        Err(Error::ShapeError(_))
    ));
    assert!(parse_matrix("diag:2,x").is_err());
}
