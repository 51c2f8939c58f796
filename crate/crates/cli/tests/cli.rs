//! End-to-end tests of the dimerlab binary: spec'd outputs, exit codes,
//! reproducibility.

use std::process::{Command, Output};

fn dimerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimerlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_grid2x3_prints_three() {
    let out = dimerlab(&["count", "--builtin", "grid2x3", "--format", "text"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "3");

    let out = dimerlab(&["count", "--builtin", "grid2x3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["cover_count"], 3);
    assert_eq!(v["partition_function"]["rational"], "3");
}

#[test]
fn probs_table_includes_two_thirds() {
    let out = dimerlab(&["probs", "--builtin", "grid2x3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges[4]["probability"]["rational"], "2/3");
}

#[test]
fn density_area_one_prints_both_forms() {
    let out = dimerlab(&["ddimer", "density", "--area", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["computed"], 0.03125);
    assert_eq!(v["closed_form"], 0.03125);
}

#[test]
fn identical_inputs_give_byte_identical_output() {
    for args in [
        vec!["sample", "--builtin", "grid2x3", "--samples", "5", "--seed", "42"],
        vec!["walk", "winding", "--n", "2", "--steps", "10", "--trials", "20", "--seed", "7"],
        vec!["probs", "--builtin", "grid2x4"],
    ] {
        let a = dimerlab(&args);
        let b = dimerlab(&args);
        assert!(a.status.success());
        assert_eq!(stdout(&a), stdout(&b), "{args:?}");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    // usage error: unknown flag
    let out = dimerlab(&["count", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(64));
    // file error: missing graph file
    let out = dimerlab(&["count", "--graph", "/nonexistent/g.dg"]);
    assert_eq!(out.status.code(), Some(66));
    // validation error: torus graphs have no Kasteleyn support
    let dir = std::env::temp_dir().join("dimerlab_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad_target.json");
    std::fs::write(&bad, "{\"0\": \"1/2\", \"1\": \"1/2\", \"2\": \"1/2\", \"3\": \"1/2\"}")
        .unwrap();
    let out = dimerlab(&["psi", "invert", "--builtin", "grid2x3", "--target", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("sums"), "diagnostic names the invariant: {err}");
    // help exits 0
    let out = dimerlab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn graph_file_round_trip() {
    let text = "dimergraph v1\n\
                v 0 b\nv 1 w\nv 2 b\nv 3 w\n\
                e 0 0 1\ne 1 2 1 1/2\ne 2 2 3\ne 3 0 3\n\
                r 0 0 3\nr 1 0 1\nr 2 1 2\nr 3 2 3\n";
    let dir = std::env::temp_dir().join("dimerlab_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("square.dg");
    std::fs::write(&path, text).unwrap();
    let out = dimerlab(&["count", "--graph", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // covers: {e0, e2} weight 1 and {e1, e3} weight 1/2 -> Z = 3/2
    assert_eq!(v["partition_function"]["rational"], "3/2");
}

#[test]
fn selftests_pass() {
    for sub in ["graph", "count", "probs", "sample", "oracle"] {
        let out = dimerlab(&[sub, "--selftest", "--builtin", "k2"]);
        assert!(
            out.status.success(),
            "{sub} selftest: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for sub in ["psi", "ddimer", "web", "walk"] {
        let out = dimerlab(&[sub, "selftest"]);
        assert!(
            out.status.success(),
            "{sub} selftest: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn walk_spectrum_quotient() {
    let out = dimerlab(&["walk", "spectrum", "--builtin", "grid2x3", "--quotient-columns"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["group_order"], 6);
    let eig = v["eigenvalues"].as_array().unwrap();
    assert!((eig[0].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((eig[1].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-10);
    assert!((eig[5].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-10);
}

#[test]
fn web_det_with_connection_file() {
    let dir = std::env::temp_dir().join("dimerlab_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let conn = dir.join("conn.json");
    std::fs::write(
        &conn,
        r#"{"n": 2, "edges": {"0": [["1","1"],["0","1"]], "2": [["1","0"],["1/2","1"]]}}"#,
    )
    .unwrap();
    let out = dimerlab(&["web", "det", "--builtin", "c4", "--connection", conn.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["identity_holds"], true);
}
