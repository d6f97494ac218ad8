//! End-to-end checks of the `bic` binary: exit codes, determinism, and the
//! plotdata pipeline.

use std::path::Path;
use std::process::Command;

fn bic() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bic"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn dist_scenario_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("dist.json");
    write(
        &scenario,
        r#"{"command":"dist","levels":5,"probes":[[[-0.2,0.0],[0.2,0.0]]]}"#,
    );
    let out = dir.path().join("results.csv");
    let status = bic()
        .args(["run", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let last = csv.lines().last().unwrap();
    let est: f64 = last.split(',').nth(7).unwrap().parse().unwrap();
    assert!((est - 0.4).abs() < 1e-9, "{est}");
    let summary = std::fs::read_to_string(dir.path().join("results.summary.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(parsed["verdicts"]["fail"], 0);
    // config echo re-parses to the same scenario
    let echo = parsed["config"].to_string();
    let again = bic_core::scenario::Scenario::from_json(&echo).unwrap();
    assert_eq!(again.levels, Some(5));
}

#[test]
fn malformed_json_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("bad.json");
    write(&scenario, "{definitely not json");
    let out = dir.path().join("results.csv");
    let status = bic()
        .args(["run", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn determinism_and_seed_flag() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("sweep.json");
    write(
        &scenario,
        r#"{"command":"validate","seed":7,"validate":{"suite":"segment_bound","count":30}}"#,
    );
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let status = bic()
            .args(["run", "--scenario"])
            .arg(&scenario)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "identical scenario+seed must be byte-identical");

    // different seed changes the rows
    let out3 = dir.path().join("c.csv");
    let status = bic()
        .args(["run", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&out3)
        .args(["--seed", "8"])
        .status()
        .unwrap();
    assert!(status.success());
    let c = std::fs::read(&out3).unwrap();
    assert_ne!(a, c);
}

#[test]
fn plotdata_extracts_series() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("dist.json");
    write(
        &scenario,
        r#"{"command":"dist","levels":5,"probes":[[[-0.2,0.0],[0.2,0.0]],[[0.0,-0.1],[0.0,0.3]]]}"#,
    );
    let out = dir.path().join("results.csv");
    assert!(bic()
        .args(["run", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let series_dir = dir.path().join("series");
    let status = bic()
        .args(["plotdata", "--results"])
        .arg(&out)
        .arg("--out-dir")
        .arg(&series_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let s0 = std::fs::read_to_string(series_dir.join("series_pair0.csv")).unwrap();
    assert!(s0.starts_with("x,y\n"));
    assert!(s0.lines().count() >= 3);
    assert!(series_dir.join("series_pair1.csv").exists());

    // empty results: exit 0, nothing written
    let empty = dir.path().join("empty.csv");
    write(&empty, "pair,ax,ay,bx,by,level,graph_value,estimate,extrapolated\n");
    let status = bic()
        .args(["plotdata", "--results"])
        .arg(&empty)
        .arg("--out-dir")
        .arg(dir.path().join("series2"))
        .status()
        .unwrap();
    assert!(status.success());
}
