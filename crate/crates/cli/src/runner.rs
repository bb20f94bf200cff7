//! Run execution: simulate, write per-run files, emit the manifest.

use std::fs;
use std::path::Path;

use opinet_core::engine::run;
use opinet_core::export::{dot_string, metrics_csv, trajectory_csv};

use crate::manifest::{RunEntry, RunManifest, RunSummary, RUN_FILES};
use crate::suites::ExperimentSpec;
use crate::CliError;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Execute every run of the experiment under `out_dir` and write the
/// manifest.
///
/// Layout: `<out>/<suite>/<sweep-point>/<replica>/{metrics.csv,
/// trajectory.csv, final.dot, summary.json}` plus `<out>/manifest.json`.
/// All directories are created up front so an unwritable output location
/// fails before any simulation starts.
pub fn execute(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunManifest, CliError> {
    let planned = spec.resolved_runs()?;

    for run in &planned {
        let dir = out_dir.join(&run.dir);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    }

    let mut entries = Vec::with_capacity(planned.len());
    for planned_run in &planned {
        let result =
            run::<f64>(&planned_run.config).map_err(|e| CliError::Validation(e.to_string()))?;
        let dir = out_dir.join(&planned_run.dir);

        write_file(&dir.join("metrics.csv"), &metrics_csv(&result.frames))?;
        write_file(&dir.join("trajectory.csv"), &trajectory_csv(&result))?;
        write_file(&dir.join("final.dot"), &dot_string(&result.final_state))?;
        let summary = RunSummary::from_result(
            &result,
            &planned_run.suite,
            &planned_run.sweep_point,
            planned_run.replica,
        );
        let summary_json = serde_json::to_string_pretty(&summary)
            .map_err(|e| CliError::Validation(format!("summary serialization: {e}")))?;
        write_file(&dir.join("summary.json"), &summary_json)?;

        entries.push(RunEntry {
            suite: planned_run.suite.clone(),
            sweep_point: planned_run.sweep_point.clone(),
            replica: planned_run.replica,
            seed: planned_run.seed,
            dir: planned_run.dir.clone(),
            config: planned_run.config.clone(),
        });
    }

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        suite: spec.suite_label.clone(),
        replicas: spec.replicas,
        seed_base: spec.seed_base,
        betweenness_normalization: crate::manifest::BETWEENNESS_NORMALIZATION.to_string(),
        files_per_run: RUN_FILES.iter().map(|s| s.to_string()).collect(),
        runs: entries,
    };
    let manifest_path = out_dir.join("manifest.json");
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Validation(format!("manifest serialization: {e}")))?;
    write_file(&manifest_path, &manifest_json)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suites::experiment_base;
    use opinet_core::SimConfig;

    fn tiny_config() -> SimConfig {
        SimConfig {
            nodes: 12,
            type_dist: [0.4, 0.3, 0.3],
            steps: 6,
            ..experiment_base()
        }
    }

    #[test]
    fn execute_writes_all_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ExperimentSpec::single(tiny_config(), 2, 11);
        let manifest = execute(&spec, dir.path()).unwrap();
        assert_eq!(manifest.runs.len(), 2);
        for entry in &manifest.runs {
            for file in RUN_FILES {
                let path = dir.path().join(&entry.dir).join(file);
                assert!(path.is_file(), "missing {}", path.display());
            }
        }
        assert!(dir.path().join("manifest.json").is_file());

        // Summary carries flags and counts.
        let summary: RunSummary = serde_json::from_str(
            &fs::read_to_string(dir.path().join(&manifest.runs[0].dir).join("summary.json"))
                .unwrap(),
        )
        .unwrap();
        assert_eq!(summary.seed, 11);
        assert_eq!(
            summary.agent_counts.hom + summary.agent_counts.het + summary.agent_counts.adv,
            12
        );
    }

    #[test]
    fn repeated_execution_is_byte_identical() {
        let spec = ExperimentSpec::single(tiny_config(), 1, 5);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        execute(&spec, a.path()).unwrap();
        execute(&spec, b.path()).unwrap();
        for file in ["metrics.csv", "trajectory.csv", "final.dot", "summary.json"] {
            let fa = fs::read(a.path().join("run/base/0").join(file)).unwrap();
            let fb = fs::read(b.path().join("run/base/0").join(file)).unwrap();
            assert_eq!(fa, fb, "{file} differs");
        }
    }

    #[test]
    fn unwritable_output_fails_before_simulating() {
        let spec = ExperimentSpec::single(tiny_config(), 1, 5);
        let err = execute(&spec, Path::new("/proc/no-such-place")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
