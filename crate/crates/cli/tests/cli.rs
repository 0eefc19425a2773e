use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn oic(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oic"));
    cmd.args(args).env_remove("OIC_BUDGET");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("oic-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bundled_fixtures_all_pass() {
    let out = oic(&["fixtures", "--run-all"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 8);
}

#[test]
fn exported_fixture_reports_its_capacity() {
    let dir = scratch("export");
    let out = oic(&["fixtures", "--export", path(&dir)], &[]);
    assert_eq!(out.status.code(), Some(0));
    let graph = dir.join("oic-multiparent10.graph.json");
    let structure = dir.join("oic-multiparent10.structure.json");
    let out = oic(&["capacity", path(&graph), path(&structure)], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().next(), Some("1/4"));

    let out = oic(&["--json", "simulate", path(&graph), path(&structure)], &[]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["failure_count"], 0);
    assert_eq!(report["exhaustive"], true);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn non_inner_cycle_fails_verification() {
    let dir = scratch("cycle");
    let graph = dir.join("g.json");
    let structure = dir.join("s.json");
    fs::write(&graph, r#"{"K":4,"edges":[[0,1],[1,0],[0,2],[2,3],[3,2],[3,1]],"t":1}"#).unwrap();
    fs::write(&structure, r#"{"nodes":[{"i":0,"j":1,"vertices":[0,1]}],"edges":[]}"#).unwrap();
    let out = oic(&["verify", path(&graph), path(&structure)], &[]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let c3 = text.lines().find(|l| l.starts_with("C3")).unwrap();
    assert!(c3.contains("FAIL") && c3.contains("x3 -> x4 -> x3"), "{c3}");

    // Encoding an unverified structure is refused with the same status.
    let out = oic(&["encode", path(&graph), path(&structure)], &[]);
    assert_eq!(out.status.code(), Some(1));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn malformed_input_exits_with_parse_status() {
    let dir = scratch("parse");
    let graph = dir.join("broken.json");
    fs::write(&graph, r#"{"K":3,"edges":[[0,1],[1,"#).unwrap();
    let out = oic(&["mais", path(&graph)], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.json"));

    let out = oic(&["mais", path(&dir.join("missing.json"))], &[]);
    assert_eq!(out.status.code(), Some(2));

    let out = oic(&["gen", "--profile", "w=1,2;size=2"], &[]);
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exhausted_budget_exits_with_refusal_status() {
    let dir = scratch("budget");
    oic(&["fixtures", "--export", path(&dir)], &[]);
    let graph = dir.join("oic-pair12.graph.json");
    let out = oic(&["oracle", path(&graph)], &[("OIC_BUDGET", "search=1")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn generated_instance_round_trips_through_files() {
    let dir = scratch("gen");
    let out = oic(
        &["gen", "--profile", "w=1,2;size=2-4;ni=2", "--seed", "7", "--out", path(&dir)],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let graph = dir.join("graph.json");
    let structure = dir.join("structure.json");
    let out = oic(&["verify", path(&graph), path(&structure)], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = oic(&["oracle", path(&graph), path(&structure)], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("optimal"));
    fs::remove_dir_all(dir).unwrap();
}
