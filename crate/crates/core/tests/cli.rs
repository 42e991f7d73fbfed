//! End-to-end runs of the `crosshull` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_crosshull"))
        .args(args)
        .env_remove("CROSSHULL_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let out = run(args, stdin);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn cube_sections_give_the_cuboctahedron() {
    let cube = ok(&["gen", "--kind", "named", "--name", "cube", "--n", "3"], b"");
    let r2 = json(&ok(&["rhull", "--k", "2"], &cube));
    assert_eq!(r2["rep"], "V");
    assert_eq!(r2["data"].as_array().unwrap().len(), 12);
}

#[test]
fn q_hull_of_cross_is_the_square() {
    let cross = ok(&["gen", "--kind", "named", "--name", "cross", "--n", "2"], b"");
    let q1 = json(&ok(&["qhull", "--k", "1"], &cross));
    assert_eq!(q1["rep"], "H");
    assert_eq!(q1["data"].as_array().unwrap().len(), 4);
}

#[test]
fn generate_frame_verify_pipeline() {
    let body = ok(&["--seed", "9", "gen", "--n", "4", "--size", "6"], b"");
    let frame = ok(&["frame"], &body);
    let f = json(&frame);
    assert_eq!(f["vectors"].as_array().unwrap().len(), 4);
    let report = json(&ok(&["verify", "--factor", "3"], &frame));
    assert!(report["records"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    let dual = json(&ok(&["verify-dual", "--factor", "3"], &body));
    assert!(dual["records"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn polar_duality_and_diameter() {
    let body = ok(&["--seed", "4", "gen", "--n", "3"], b"");
    let polar = ok(&["polar"], &body);
    assert_eq!(json(&polar)["rep"], "H");
    let back = ok(&["polar"], &polar);
    assert_eq!(json(&back), json(&body));
    ok(&["duality"], &body);
    let d = json(&ok(&["diam", "--p", "inf"], &body));
    assert!(d["diameter"].as_f64().unwrap() > 0.0);
}

#[test]
fn failed_check_exits_with_one() {
    let square = ok(&["gen", "--kind", "named", "--name", "cube", "--n", "2"], b"");
    let out = run(&["verify", "--factor", "1.5"], &ok(&["frame", "--eta", "0"], &square));
    // The greedy frame of the square is diagonal and reaches factor 1.
    assert_eq!(out.status.code(), Some(0));
    let id = br#"{"n": 2, "vectors": [[1.0, 0.0], [0.0, 1.0]], "rho": [1.0, 1.0]}"#;
    let dir = tempfile::tempdir().unwrap();
    let frame_path = dir.path().join("id.json");
    std::fs::write(&frame_path, id).unwrap();
    let out = run(&["verify", "--factor", "1.5", "--frame", frame_path.to_str().unwrap()], &square);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_with_two() {
    let out = run(&["polar"], br#"{"rep":"V","dim":2,"mode":"exact","data":[["1","x"]]}"#);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let cube = ok(&["gen", "--kind", "named", "--name", "cube", "--n", "2"], b"");
    assert_eq!(run(&["qhull", "--k", "0"], &cube).status.code(), Some(2));
    assert_eq!(run(&["suite", "nonsense"], b"").status.code(), Some(2));
}

#[test]
fn suites_are_deterministic_and_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let args = [
        "--seed",
        "3",
        "suite",
        "factor",
        "--bodies",
        "4",
        "--dims",
        "2,3",
        "--csv",
        csv.to_str().unwrap(),
    ];
    let a = ok(&args, b"");
    let b = ok(&args, b"");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 4);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("body_digest,n,k,c_star,diam_ratio_p1,diam_ratio_p2,diam_ratio_pinf,verdict"));
}

#[test]
fn seed_is_read_from_the_environment() {
    let with_flag = ok(&["--seed", "17", "gen", "--n", "3"], b"");
    let out = Command::new(env!("CARGO_BIN_EXE_crosshull"))
        .args(["gen", "--n", "3"])
        .env("CROSSHULL_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(out.stdout, with_flag);
}
