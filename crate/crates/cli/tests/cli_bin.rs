//! End-to-end checks of the `opinet` binary: subcommands, file layout and
//! exit codes.

use std::fs;
use std::path::Path;
use std::process::Command;

fn opinet() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opinet"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

#[test]
fn run_and_summarize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{"nodes":20,"K":3,"type_dist":[0.5,0.25,0.25],"saturation":0.2,"steps":10,"seed":7}"#,
    );
    let out = dir.path().join("results");

    let status = opinet()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--replicas", "3", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    for replica in 0..3 {
        let run_dir = out.join(format!("run/base/{replica}"));
        for file in ["metrics.csv", "trajectory.csv", "final.dot", "summary.json"] {
            assert!(
                run_dir.join(file).is_file(),
                "missing {file} in replica {replica}"
            );
        }
    }

    let output = opinet()
        .args(["summarize", "--manifest"])
        .arg(out.join("manifest.json"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(summary["sweep_points"]["base"]["replicas"], 3);
}

#[test]
fn suite_layout_matches_sweep_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("density");
    // Smallest useful check: density suite with one replica still creates
    // all five sweep points.
    let status = opinet()
        .args([
            "suite",
            "--name",
            "density",
            "--replicas",
            "1",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for sat in ["sat-0.05", "sat-0.10", "sat-0.15", "sat-0.20", "sat-0.25"] {
        assert!(
            out.join("density")
                .join(sat)
                .join("0/metrics.csv")
                .is_file(),
            "{sat}"
        );
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["runs"].as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes_distinguish_validation_from_io() {
    let dir = tempfile::tempdir().unwrap();

    // Unreadable config file: I/O, exit 2.
    let status = opinet()
        .args(["run", "--config"])
        .arg(dir.path().join("missing.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Invalid field values: validation, exit 1.
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"nodes":20,"K":3,"type_dist":[0.5,0.2,0.2],"saturation":0.2,"steps":10,"seed":7}"#,
    );
    let status = opinet()
        .args(["run", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // Unknown suite name: validation via clap, nonzero.
    let status = opinet()
        .args(["suite", "--name", "bogus"])
        .status()
        .unwrap();
    assert_ne!(status.code(), Some(0));

    // Missing manifest: I/O, exit 2.
    let status = opinet()
        .args(["summarize", "--manifest"])
        .arg(dir.path().join("nope/manifest.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn oracle_check_passes() {
    let output = opinet().arg("oracle-check").output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert_eq!(text.matches("PASS").count(), 3, "{text}");
}
