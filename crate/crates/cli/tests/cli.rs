use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use parrondo_core::geodesic::geo_bounds;
use parrondo_core::hidden::hidden_bounds;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_parrondo"));
    c.env_remove("PARRONDO_THREADS");
    c
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header plus rows, each split on commas.
fn table(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let s = stdout(o);
    assert!(!s.contains('\r'), "CRLF in output");
    let mut lines = s.lines().map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = lines.next().expect("header");
    (header, lines.collect())
}

fn col(header: &[String], row: &[String], name: &str) -> f64 {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    row[i].parse().unwrap()
}

fn write_spec(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("spec.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn run_classical_limit() {
    let o = run(&["run", example("classical_s.json").to_str().unwrap(), "--limit"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&o);
    assert_eq!(rows.len(), 1);
    assert!((col(&h, &rows[0], "P_A_limit") - 0.6).abs() < 1e-9);
    assert!((col(&h, &rows[0], "P_A") - 0.6).abs() < 1e-9);
}

#[test]
fn run_exact_walk() {
    let o = run(&["run", example("walk_exact.json").to_str().unwrap(), "--n", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&o);
    assert_eq!(h, ["model", "n", "P_A", "P_Aprime", "P_geo"]);
    assert!((col(&h, &rows[0], "P_A") - 2.0 / 3.0).abs() < 1e-12);
    assert!((col(&h, &rows[0], "P_Aprime") - 2.0 / 3.0).abs() < 1e-12);
    assert!((col(&h, &rows[0], "P_geo") - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn run_quantum_matches_classical_embedding() {
    let o = run(&["run", example("quantum.json").to_str().unwrap(), "--limit"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&o);
    assert!((col(&h, &rows[0], "P_A_limit") - 3.0 / 7.0).abs() < 1e-9);
}

#[test]
fn every_example_runs() {
    for e in std::fs::read_dir(example("")).unwrap() {
        let p = e.unwrap().path();
        let o = run(&["run", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", p.display(), stderr(&o));
    }
}

#[test]
fn malformed_json_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(&dir, "{\"model\": \"classical\",\n  \"game\": {\"transition\": [[1, 0],\n");
    let o = run(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn schema_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(&dir, "{\"model\": \"hidden\",\n \"game\": {\"branch_a\": [[0.5]], \"branch_atilde\": [[0.5]]},\n \"colour\": 1}");
    let o = run(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
    let p = write_spec(&dir, "{\"model\": \"classical\",\n \"game\": {\n \"transition\": [[0.5, 0.5], [0.4, 0.5]]}}");
    let o = run(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3: game.transition"), "{}", stderr(&o));
    let o = run(&["run", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn limit_without_unique_fixed_point_exits_3() {
    // Dephasing: every diagonal state is fixed.
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(
        &dir,
        r#"{"model": "quantum", "game": {
            "kraus_a": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]],
            "kraus_atilde": [[[[0, 0], [0, 0]], [[0, 0], [1, 0]]]]}}"#,
    );
    let o = run(&["run", p.to_str().unwrap(), "--limit"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = run(&["run", p.to_str().unwrap(), "--n", "4"]);
    assert!(o.status.success());
}

#[test]
fn geodesic_region_is_geo_bounds() {
    let o = run(&["region", "geodesic", "--grid", "6", "--p", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&o);
    assert_eq!(h.join(","), "P_A,P_Aprime,min_Pcomb,max_Pcomb,converged");
    assert_eq!(rows.len(), 36);
    for r in &rows {
        let (a, b) = (col(&h, r, "P_A"), col(&h, r, "P_Aprime"));
        let (lo, hi) = geo_bounds(a, b);
        assert!((col(&h, r, "min_Pcomb") - lo).abs() < 1e-12);
        assert!((col(&h, r, "max_Pcomb") - hi).abs() < 1e-12);
        assert_eq!(r[4], "true");
    }
}

#[test]
fn hidden_region_within_bounds() {
    let o = run(&["region", "hidden", "--grid", "5", "--p", "0.3", "--samples", "3000", "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = table(&o);
    assert_eq!(rows.len(), 25);
    for r in &rows {
        let (lo, hi) = hidden_bounds(0.3, col(&h, r, "P_A"), col(&h, r, "P_Aprime"));
        assert!(col(&h, r, "min_Pcomb") >= lo - 1e-9 && col(&h, r, "max_Pcomb") <= hi + 1e-9);
    }
}

#[test]
fn quantum_region_leaves_hidden_region() {
    // Grid 4 is {0.2, 0.4, 0.6, 0.8}, so it contains (0.6, 0.6).
    let o = run(&["region", "quantum", "--grid", "4", "--restarts", "8", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed 3"));
    let (h, rows) = table(&o);
    let cell = rows
        .iter()
        .find(|r| (col(&h, r, "P_A") - 0.6).abs() < 1e-12 && (col(&h, r, "P_Aprime") - 0.6).abs() < 1e-12)
        .expect("cell (0.6, 0.6)");
    assert!(col(&h, cell, "min_Pcomb") < 0.3);
}

#[test]
fn region_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<PathBuf> = (0..3).map(|i| dir.path().join(format!("r{i}.csv"))).collect();
    for (f, threads) in files.iter().zip(["1", "1", "2"]) {
        let o = bin()
            .args(["region", "hidden", "--grid", "4", "--samples", "500", "--seed", "11", "--out"])
            .arg(f)
            .env("PARRONDO_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    let bytes: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[0], bytes[2]);
    assert!(!bytes[0].contains(&b'\r'));
}

#[test]
fn all_cells_failing_exits_4() {
    // The optimizer needs p strictly inside (0, 1).
    let o = run(&["region", "quantum", "--grid", "2", "--p", "0", "--restarts", "1"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn region_input_errors_exit_2() {
    assert_eq!(run(&["region", "hidden", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["region", "classical"]).status.code(), Some(2));
    let o = bin().args(["region", "geodesic", "--grid", "2"]).env("PARRONDO_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exact_walk_prints_triple() {
    let o = run(&["verify", "--suite", "ex933"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.starts_with("suite ex933 seed 0"));
    assert!(s.contains("PASS") && s.contains("0.666666666667") && s.contains("0.333333333333"), "{s}");
}

#[test]
fn verify_geodesic_containment() {
    let o = run(&["verify", "--suite", "thm832", "--samples", "10000", "--seed", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn verify_oracle() {
    let o = run(&["verify", "--suite", "oracle", "--samples", "200"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn verify_is_deterministic_across_thread_counts() {
    let outs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|t| {
            bin()
                .args(["verify", "--suite", "dilation", "--samples", "20", "--seed", "9"])
                .env("PARRONDO_THREADS", t)
                .output()
                .unwrap()
                .stdout
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn unknown_suite_is_an_input_error() {
    assert_eq!(run(&["verify", "--suite", "thm999"]).status.code(), Some(2));
}
