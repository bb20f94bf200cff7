//! Run manifests and per-run summaries.

use opinet_core::metrics::OutcomeFlags;
use opinet_core::opinion::Archetype;
use opinet_core::{NodeId, SimConfig, SimResult64};
use serde::{Deserialize, Serialize};

/// Fixed per-run output file names.
pub const RUN_FILES: [&str; 4] = ["metrics.csv", "trajectory.csv", "final.dot", "summary.json"];

/// Everything needed to re-execute and locate every run of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub suite: String,
    pub replicas: usize,
    pub seed_base: u64,
    /// How the betweenness columns in metrics.csv are normalized.
    pub betweenness_normalization: String,
    /// Files present in every run directory.
    pub files_per_run: Vec<String>,
    pub runs: Vec<RunEntry>,
}

/// Normalization statement recorded in every manifest.
pub const BETWEENNESS_NORMALIZATION: &str =
    "shortest-path betweenness on the unweighted topology, divided by (n-1)(n-2)/2, \
     whole graph including disconnected parts";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunEntry {
    pub suite: String,
    pub sweep_point: String,
    pub replica: usize,
    pub seed: u64,
    /// Run directory relative to the manifest's own directory.
    pub dir: String,
    /// Fully resolved configuration; sufficient to re-execute the run.
    pub config: SimConfig,
}

/// Per-archetype counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct TypeCounts {
    pub hom: usize,
    pub het: usize,
    pub adv: usize,
}

impl TypeCounts {
    pub fn get(&self, archetype: Archetype) -> usize {
        match archetype {
            Archetype::Hom => self.hom,
            Archetype::Het => self.het,
            Archetype::Adv => self.adv,
        }
    }

    fn bump(&mut self, archetype: Archetype) {
        match archetype {
            Archetype::Hom => self.hom += 1,
            Archetype::Het => self.het += 1,
            Archetype::Adv => self.adv += 1,
        }
    }
}

/// Edge counts between archetype pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct CrossTypeEdges {
    pub hom_het: usize,
    pub hom_adv: usize,
    pub het_adv: usize,
}

/// The per-run summary.json payload: outcome flags plus the final-state
/// measurements the suite-level summary aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub suite: String,
    pub sweep_point: String,
    pub replica: usize,
    pub seed: u64,
    pub flags: OutcomeFlags,
    /// Every component (of any size) holds a single opinion vector.
    pub all_components_consensus: bool,
    /// Every agent isolated.
    pub fully_disconnected: bool,
    pub final_density: f64,
    pub component_sizes: Vec<usize>,
    pub largest_component: usize,
    pub isolate_count: usize,
    pub agent_counts: TypeCounts,
    pub isolates_by_type: TypeCounts,
    pub distinct_opinions: usize,
    pub cross_type_edges: CrossTypeEdges,
    /// Mean over steps >= 50 of the HET cohort's mean betweenness; absent
    /// when the run has no HET agents.
    pub het_betweenness_late_mean: Option<f64>,
}

impl RunSummary {
    pub fn from_result(
        result: &SimResult64,
        suite: &str,
        sweep_point: &str,
        replica: usize,
    ) -> Self {
        let flags = OutcomeFlags::standard(result);
        let final_frame = result.frames.last().expect("frame 0 always exists");
        let state = &result.final_state;
        let n = state.graph.node_count();

        let mut agent_counts = TypeCounts::default();
        let mut isolates_by_type = TypeCounts::default();
        for i in 0..n {
            let archetype = state.agents[i].archetype;
            agent_counts.bump(archetype);
            if state.graph.degree(NodeId(i)) == 0 {
                isolates_by_type.bump(archetype);
            }
        }

        let mut cross = CrossTypeEdges::default();
        for (i, j) in state.graph.edges() {
            let mut pair = [
                state.agents[i.index()].archetype,
                state.agents[j.index()].archetype,
            ];
            pair.sort();
            match pair {
                [Archetype::Hom, Archetype::Het] => cross.hom_het += 1,
                [Archetype::Hom, Archetype::Adv] => cross.hom_adv += 1,
                [Archetype::Het, Archetype::Adv] => cross.het_adv += 1,
                _ => {}
            }
        }

        let late: Vec<f64> = result
            .frames
            .iter()
            .filter(|f| f.t >= 50)
            .filter_map(|f| f.per_type_betweenness.het.map(|m| m.mean))
            .collect();
        let het_betweenness_late_mean = if late.is_empty() {
            None
        } else {
            Some(late.iter().sum::<f64>() / late.len() as f64)
        };

        RunSummary {
            suite: suite.to_string(),
            sweep_point: sweep_point.to_string(),
            replica,
            seed: result.config.seed,
            all_components_consensus: flags.consensus_per_component.iter().all(|&c| c),
            fully_disconnected: final_frame.isolate_count == n,
            flags,
            final_density: final_frame.density,
            component_sizes: final_frame.component_sizes.clone(),
            largest_component: final_frame.largest_component(),
            isolate_count: final_frame.isolate_count,
            agent_counts,
            isolates_by_type,
            distinct_opinions: final_frame.distinct_opinions,
            cross_type_edges: cross,
            het_betweenness_late_mean,
        }
    }
}
