//! Cross-replica aggregation over a finished manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::manifest::{RunManifest, RunSummary};
use crate::CliError;

/// Aggregate a manifest's runs per sweep point: outcome-flag fractions, mean
/// final density, mean isolate counts by archetype, and mean late HET
/// betweenness. Reads only files named in the manifest; any missing run file
/// is an error listing every absentee.
pub fn summarize(manifest_path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(manifest_path).map_err(|e| CliError::io(manifest_path, e))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", manifest_path.display())))?;
    if manifest.runs.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: manifest lists no runs",
            manifest_path.display()
        )));
    }
    let root = manifest_path.parent().unwrap_or(Path::new("."));

    let mut missing = Vec::new();
    for entry in &manifest.runs {
        for file in &manifest.files_per_run {
            let path = root.join(&entry.dir).join(file);
            if !path.is_file() {
                missing.push(path.display().to_string());
            }
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Validation(format!(
            "missing run files: {}",
            missing.join(", ")
        )));
    }

    let mut groups: BTreeMap<String, Vec<RunSummary>> = BTreeMap::new();
    for entry in &manifest.runs {
        let path = root.join(&entry.dir).join("summary.json");
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let summary: RunSummary = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        groups
            .entry(entry.sweep_point.clone())
            .or_default()
            .push(summary);
    }

    let mut points = serde_json::Map::new();
    for (name, summaries) in groups {
        let n = summaries.len() as f64;
        let frac = |pred: &dyn Fn(&RunSummary) -> bool| {
            summaries.iter().filter(|s| pred(s)).count() as f64 / n
        };
        let mean = |get: &dyn Fn(&RunSummary) -> f64| summaries.iter().map(get).sum::<f64>() / n;
        let het_btw: Vec<f64> = summaries
            .iter()
            .filter_map(|s| s.het_betweenness_late_mean)
            .collect();
        let het_btw_mean = if het_btw.is_empty() {
            Value::Null
        } else {
            json!(het_btw.iter().sum::<f64>() / het_btw.len() as f64)
        };
        points.insert(
            name,
            json!({
                "replicas": summaries.len(),
                "flag_fractions": {
                    "all_components_consensus": frac(&|s| s.all_components_consensus),
                    "oscillation_period2": frac(&|s| s.flags.oscillation_period2),
                    "density_plateaued": frac(&|s| s.flags.density_plateaued),
                    "fully_disconnected": frac(&|s| s.fully_disconnected),
                },
                "mean_final_density": mean(&|s| s.final_density),
                "mean_isolates_by_type": {
                    "hom": mean(&|s| s.isolates_by_type.hom as f64),
                    "het": mean(&|s| s.isolates_by_type.het as f64),
                    "adv": mean(&|s| s.isolates_by_type.adv as f64),
                },
                "mean_het_betweenness_late": het_btw_mean,
            }),
        );
    }

    Ok(json!({
        "tool_version": manifest.tool_version,
        "suite": manifest.suite,
        "replicas": manifest.replicas,
        "seed_base": manifest.seed_base,
        "sweep_points": Value::Object(points),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::execute;
    use crate::suites::{experiment_base, ExperimentSpec};
    use opinet_core::SimConfig;

    fn run_spec(dist: [f64; 3], replicas: usize) -> (tempfile::TempDir, Value) {
        let config = SimConfig {
            nodes: 14,
            type_dist: dist,
            steps: 8,
            ..experiment_base()
        };
        let dir = tempfile::tempdir().unwrap();
        let spec = ExperimentSpec::single(config, replicas, 3);
        execute(&spec, dir.path()).unwrap();
        let summary = summarize(&dir.path().join("manifest.json")).unwrap();
        (dir, summary)
    }

    #[test]
    fn summarize_reports_fractions_per_sweep_point() {
        let (_dir, summary) = run_spec([0.5, 0.25, 0.25], 3);
        let point = &summary["sweep_points"]["base"];
        assert_eq!(point["replicas"], 3);
        let frac = point["flag_fractions"]["fully_disconnected"]
            .as_f64()
            .unwrap();
        assert!((0.0..=1.0).contains(&frac));
        assert!(point["mean_final_density"].as_f64().unwrap() >= 0.0);
        // Fractions of a single run are 0 or 1.
        let (_dir, single) = run_spec([1.0, 0.0, 0.0], 1);
        let f = single["sweep_points"]["base"]["flag_fractions"]["all_components_consensus"]
            .as_f64()
            .unwrap();
        assert!(f == 0.0 || f == 1.0);
    }

    #[test]
    fn missing_files_are_listed() {
        let (dir, _) = run_spec([0.5, 0.25, 0.25], 2);
        fs::remove_file(dir.path().join("run/base/1/metrics.csv")).unwrap();
        fs::remove_file(dir.path().join("run/base/1/final.dot")).unwrap();
        let err = summarize(&dir.path().join("manifest.json")).unwrap_err();
        let text = err.to_string();
        assert!(
            text.contains("metrics.csv") && text.contains("final.dot"),
            "{text}"
        );
    }

    #[test]
    fn empty_manifest_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = RunManifest {
            tool_version: "0".into(),
            suite: "run".into(),
            replicas: 0,
            seed_base: 0,
            betweenness_normalization: String::new(),
            files_per_run: vec![],
            runs: vec![],
        };
        let path = dir.path().join("manifest.json");
        fs::write(&path, serde_json::to_string(&manifest).unwrap()).unwrap();
        let err = summarize(&path).unwrap_err();
        assert!(err.to_string().contains("no runs"));
    }
}
