//! Experiment specifications: the four prebuilt suites and generic sweeps.

use std::str::FromStr;

use opinet_core::SimConfig;
use serde_json::{Map, Value};

use crate::CliError;

/// The prebuilt experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    /// Six compositions: the three pure networks and the three 50/50 pairs.
    Verification,
    /// Four hom/het/adv distributions at fixed saturation.
    Composition,
    /// Five initial saturations at an even composition.
    Density,
    /// Heterophilic resistance levels crossed with two compositions.
    Resistance,
}

impl SuiteName {
    pub fn label(self) -> &'static str {
        match self {
            SuiteName::Verification => "verification",
            SuiteName::Composition => "composition",
            SuiteName::Density => "density",
            SuiteName::Resistance => "resistance",
        }
    }
}

impl FromStr for SuiteName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "verification" => Ok(SuiteName::Verification),
            "composition" => Ok(SuiteName::Composition),
            "density" => Ok(SuiteName::Density),
            "resistance" => Ok(SuiteName::Resistance),
            other => Err(format!(
                "unknown suite '{other}' (expected verification|composition|density|resistance)"
            )),
        }
    }
}

/// One sweep point: a directory-safe name plus config-field overrides.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub name: String,
    pub overrides: Map<String, Value>,
}

impl SweepPoint {
    fn new(name: impl Into<String>, overrides: &[(&str, Value)]) -> Self {
        SweepPoint {
            name: name.into(),
            overrides: overrides
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }
}

/// A full experiment request: base config, sweep points and replica count.
/// Replica `r` of any sweep point runs with seed `seed_base + r`, so each
/// run is re-executable in isolation and paired across sweep points.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub suite_label: String,
    pub base: SimConfig,
    pub replicas: usize,
    pub seed_base: u64,
    pub sweep: Vec<SweepPoint>,
}

/// One fully resolved run.
#[derive(Debug, Clone)]
pub struct PlannedRun {
    pub suite: String,
    pub sweep_point: String,
    pub replica: usize,
    pub seed: u64,
    pub config: SimConfig,
    /// Directory relative to the output root.
    pub dir: String,
}

/// The constant experiment parameters: 75 nodes, 4 topics, 100 steps,
/// small-world seed graphs at saturation 0.15, all masks visible.
pub fn experiment_base() -> SimConfig {
    SimConfig::base(75, 4, 100, 0)
}

impl ExperimentSpec {
    pub fn single(config: SimConfig, replicas: usize, seed_base: u64) -> Self {
        ExperimentSpec {
            suite_label: "run".to_string(),
            base: config,
            replicas,
            seed_base,
            sweep: vec![SweepPoint::new("base", &[])],
        }
    }

    /// Generic one-field sweep; the field must exist in the config schema.
    pub fn field_sweep(
        base: SimConfig,
        field: &str,
        values: Vec<Value>,
        replicas: usize,
        seed_base: u64,
    ) -> Self {
        let sweep = values
            .into_iter()
            .map(|v| SweepPoint::new(format!("{field}-{v}"), &[(field, v)]))
            .collect();
        ExperimentSpec {
            suite_label: format!("sweep-{field}"),
            base,
            replicas,
            seed_base,
            sweep,
        }
    }

    pub fn suite(name: SuiteName, replicas: usize, seed_base: u64) -> Self {
        let base = experiment_base();
        let dist = |h: f64, e: f64, a: f64| Value::Array(vec![h.into(), e.into(), a.into()]);
        let sweep = match name {
            SuiteName::Verification => vec![
                SweepPoint::new("pure-hom", &[("type_dist", dist(1.0, 0.0, 0.0))]),
                SweepPoint::new("pure-het", &[("type_dist", dist(0.0, 1.0, 0.0))]),
                SweepPoint::new("pure-adv", &[("type_dist", dist(0.0, 0.0, 1.0))]),
                SweepPoint::new("hom-het-50-50", &[("type_dist", dist(0.5, 0.5, 0.0))]),
                SweepPoint::new("hom-adv-50-50", &[("type_dist", dist(0.5, 0.0, 0.5))]),
                SweepPoint::new("het-adv-50-50", &[("type_dist", dist(0.0, 0.5, 0.5))]),
            ],
            SuiteName::Composition => vec![
                SweepPoint::new("34-33-33", &[("type_dist", dist(0.34, 0.33, 0.33))]),
                SweepPoint::new("50-25-25", &[("type_dist", dist(0.5, 0.25, 0.25))]),
                SweepPoint::new("60-20-20", &[("type_dist", dist(0.6, 0.2, 0.2))]),
                SweepPoint::new("70-15-15", &[("type_dist", dist(0.7, 0.15, 0.15))]),
            ],
            SuiteName::Density => [0.05, 0.1, 0.15, 0.2, 0.25]
                .iter()
                .map(|&s| {
                    SweepPoint::new(
                        format!("sat-{s:.2}"),
                        &[
                            ("type_dist", dist(0.34, 0.33, 0.33)),
                            ("saturation", s.into()),
                        ],
                    )
                })
                .collect(),
            SuiteName::Resistance => {
                let mut points = Vec::new();
                for (comp_name, comp) in [
                    ("34-33-33", dist(0.34, 0.33, 0.33)),
                    ("50-25-25", dist(0.5, 0.25, 0.25)),
                ] {
                    for res in [0.0, 0.25, 0.5] {
                        let overrides = serde_json::json!({ "het": res });
                        points.push(SweepPoint::new(
                            format!("{comp_name}_res-{res:.2}"),
                            &[("type_dist", comp.clone()), ("res_overrides", overrides)],
                        ));
                    }
                }
                points
            }
        };
        ExperimentSpec {
            suite_label: name.label().to_string(),
            base,
            replicas,
            seed_base,
            sweep,
        }
    }

    /// Expand into fully resolved runs: overrides applied through the config
    /// schema (unknown fields rejected), seeds assigned per replica.
    pub fn resolved_runs(&self) -> Result<Vec<PlannedRun>, CliError> {
        if self.replicas == 0 {
            return Err(CliError::Validation("replicas: must be >= 1".to_string()));
        }
        let mut runs = Vec::with_capacity(self.sweep.len() * self.replicas);
        for point in &self.sweep {
            let config = apply_overrides(&self.base, &point.overrides)?;
            for replica in 0..self.replicas {
                let seed = self.seed_base + replica as u64;
                let mut config = config.clone();
                config.seed = seed;
                config
                    .validate()
                    .map_err(|e| CliError::Validation(format!("{}: {e}", point.name)))?;
                runs.push(PlannedRun {
                    suite: self.suite_label.clone(),
                    sweep_point: point.name.clone(),
                    replica,
                    seed,
                    config,
                    dir: format!("{}/{}/{replica}", self.suite_label, point.name),
                });
            }
        }
        Ok(runs)
    }
}

fn apply_overrides(
    base: &SimConfig,
    overrides: &Map<String, Value>,
) -> Result<SimConfig, CliError> {
    if overrides.is_empty() {
        return Ok(base.clone());
    }
    let mut value = serde_json::to_value(base)
        .map_err(|e| CliError::Validation(format!("config serialization: {e}")))?;
    let object = value
        .as_object_mut()
        .expect("config serializes to an object");
    for (field, v) in overrides {
        object.insert(field.clone(), v.clone());
    }
    serde_json::from_value(value).map_err(|e| CliError::Validation(format!("sweep override: {e}")))
}
