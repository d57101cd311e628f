//! End-to-end tests of the binary: exit-code contract, file round-trips,
//! and report shape.

use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_pluriminimal");

fn run(args: &[&str], dir: &std::path::Path) -> (Option<i32>, String, String) {
    let out = Command::new(BIN).args(args).current_dir(dir).output().unwrap();
    (
        out.status.code(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn family_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["family", "--f", "exp(z1)", "--g", "sin(z1)", "--out", "t.json"], dir.path());
    assert_eq!(code, Some(0));
    let (code, stdout, _) = run(&["verify", "t.json"], dir.path());
    assert_eq!(code, Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["pass"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["closed", "conformality", "rank", "kahler", "circularity", "line_minimality"]
    );
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&["family", "--f", "z1^", "--g", "0", "--out", "t.json"], dir.path());
    assert_eq!(code, Some(2));
    assert!(stderr.contains("position"), "stderr was: {stderr}");

    std::fs::write(dir.path().join("garbage.json"), "not json").unwrap();
    let (code, _, _) = run(&["verify", "garbage.json"], dir.path());
    assert_eq!(code, Some(2));

    let (code, _, _) = run(&["verify", "no-such-file.json"], dir.path());
    assert_eq!(code, Some(2));
}

#[test]
fn geometric_failure_exits_one_and_names_the_site() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"arity":2,"basepoint":[[0.0,0.0],[0.0,0.0]],"constant":[0.0,0.0,0.0,0.0],
        "forms":[{"coeffs":["z2","0"]},{"coeffs":["0","1"]},{"coeffs":["1i*z2","0"]},{"coeffs":["0","1i"]}],
        "primitives":null}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let (code, stdout, _) = run(&["verify", "bad.json"], dir.path());
    assert_eq!(code, Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let closed = &report["checks"][0];
    assert_eq!(closed["pass"], false);
    assert!(closed["detail"].as_str().unwrap().contains("form 1"));
}

#[test]
fn size_guard_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) =
        run(&["relations", "--m", "2", "--n", "8", "--out", "k.json", "--cap", "50"], dir.path());
    assert_eq!(code, Some(3));
    assert!(stderr.contains("size guard"));
}

#[test]
fn relations_csv_and_emit() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(
        &["relations", "--m", "2", "--n", "3", "--out", "k.json", "--csv", "dims.csv",
          "--emit", "0", "--ensure-immersion", "--emit-out", "em.json"],
        dir.path(),
    );
    assert_eq!(code, Some(0));
    let csv = std::fs::read_to_string(dir.path().join("dims.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,dimV,dimSym2V,dimTarget,rank,kernel");
    assert_eq!(lines[1], "1,2,3,3,3,0");
    assert_eq!(lines[3], "3,9,45,45,40,5");
    // The emitted data file verifies clean at a slightly relaxed
    // conformality tolerance (its pivot square roots are floating).
    let (code, _, _) = run(&["verify", "em.json", "--tol-conf", "1e-10"], dir.path());
    assert_eq!(code, Some(0));

    let (code, _, _) = run(
        &["relations", "--m", "2", "--n", "1", "--out", "k.json", "--emit", "0"],
        dir.path(),
    );
    assert_eq!(code, Some(2), "emit index beyond the kernel dimension is an input error");
}

#[test]
fn mesh_minimal_resolution() {
    let dir = tempfile::tempdir().unwrap();
    run(&["family", "--f", "0", "--g", "0", "--out", "t.json"], dir.path());
    let (code, _, _) = run(
        &["mesh", "t.json", "--curve", "z1", "--curve", "0", "--resolution", "2",
          "--project", "2,3,0", "--out", "m.obj"],
        dir.path(),
    );
    assert_eq!(code, Some(0));
    let mesh = std::fs::read_to_string(dir.path().join("m.obj")).unwrap();
    assert_eq!(mesh.lines().filter(|l| l.starts_with("v ")).count(), 4);
    assert_eq!(mesh.lines().filter(|l| l.starts_with("f ")).count(), 1);

    let (code, _, _) = run(
        &["mesh", "t.json", "--curve", "z1", "--curve", "0", "--project", "0,0,1", "--out", "m.obj"],
        dir.path(),
    );
    assert_eq!(code, Some(2));
}

#[test]
fn selfintersect_reports_none_on_graph() {
    let dir = tempfile::tempdir().unwrap();
    run(&["family", "--f", "0", "--g", "0", "--out", "t.json"], dir.path());
    let (code, stdout, _) =
        run(&["selfintersect", "t.json", "--budget", "8", "--seed", "3"], dir.path());
    assert_eq!(code, Some(0));
    assert!(stdout.contains("none found within 8 starts"));
}
