use std::path::Path;
use std::process::{Command, Output};

const TRIANGLES: &str = r#"{
    "regime": "plane",
    "nodes": [[0, 0], [1, 0], [1, 1], [0, 1]],
    "elements": [
        {"kind": "Cst3", "nodes": [0, 1, 2], "E": 1000, "nu": 0.3, "thickness": 0.1, "frame": "polar"},
        {"kind": "Cst3", "nodes": [0, 2, 3], "E": 1000, "nu": 0.3, "thickness": 0.1, "frame": "polar"}
    ],
    "fixed": [{"node": 0, "dofs": ["ux", "uy"]}, {"node": 3, "dofs": ["ux"]}],
    "loads": [{"edge": [1, 2], "traction": [5, 0]}],
    "monitors": [{"node": 2, "dof": "ux"}, {"node": 2, "dof": "uy"}]
}"#;

fn corot(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corot")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", TRIANGLES);
    let out = corot(&["run", &model, "--method", "sc1", "--steps", "20", "--tol", "1e-5", "--out", "h.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,load_factor,n2_ux,n2_uy");
    assert_eq!(lines.len(), 21);
    assert!(lines[20].starts_with("20,1,"));
}

#[test]
fn malformed_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", &TRIANGLES.replace("\"Cst3\", \"nodes\": [0, 2, 3]", "\"Tri9\", \"nodes\": [0, 2, 3]"));
    let out = corot(&["run", &model], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("elements[1].kind"));
}

#[test]
fn non_convergence_writes_partial_history() {
    let dir = tempfile::tempdir().unwrap();
    let out = corot(&["run", "bar-sanity", "--max-iter", "3", "--tol", "1e-12", "--out", "h.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let csv = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    assert!(rows < 10, "{csv}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("no convergence"));
}

#[test]
fn bench_writes_one_csv_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = corot(
        &["bench", "plane-angle-frame", "--frames", "side,lsq,polar", "--methods", "s,sp,sc1", "--steps", "2", "--out", "r"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path().join("r")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    let cells: Vec<&String> = names.iter().filter(|n| !n.contains("diagnostics") && !n.contains("summary")).collect();
    assert_eq!(cells.len(), 9);
    assert!(names.contains(&"plane-angle-frame_polar_sc1.csv".to_string()));
    assert!(names.contains(&"plane-angle-frame_summary.csv".to_string()));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("max_relative_deviation"));
}

#[test]
fn unknown_benchmark_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = corot(&["bench", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_is_reproducible_and_filterable() {
    let dir = tempfile::tempdir().unwrap();
    let a = corot(&["verify", "--seed", "7"], dir.path());
    let b = corot(&["verify", "--seed", "7"], dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let only = corot(&["verify", "--only", "correction"], dir.path());
    assert_eq!(only.status.code(), Some(0));
    let text = String::from_utf8_lossy(&only.stdout);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).all(|l| l.contains("correction::")));
    assert_eq!(corot(&["verify", "--only", "nothing"], dir.path()).status.code(), Some(1));
}

#[test]
fn exported_benchmark_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(corot(&["export", "spatial-angle-frame", "m.json"], dir.path()).status.code(), Some(0));
    let direct = corot(&["run", "spatial-angle-frame", "--steps", "4", "--out", "a.csv"], dir.path());
    let from_file = corot(&["run", "m.json", "--steps", "4", "--out", "b.csv"], dir.path());
    assert_eq!(direct.status.code(), Some(0));
    assert_eq!(from_file.status.code(), Some(0));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}
