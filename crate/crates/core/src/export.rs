//! File-format serialization: DOT topology dumps, edge-list text, and the
//! metrics / trajectory CSV layouts. All writers are deterministic — equal
//! inputs produce byte-identical output.

use std::fmt::Write;

use crate::engine::{SimResult, SimState};
use crate::metrics::MetricFrame;
use crate::opinion::Archetype;
use crate::scalar::Scalar;

/// Undirected DOT dump of the topology: per-node `archetype` and `opinions`
/// attributes, no layout coordinates.
pub fn dot_string<S: Scalar>(state: &SimState<S>) -> String {
    let mut out = String::new();
    out.push_str("graph social_network {\n");
    for i in state.graph.nodes() {
        let opinions = state
            .profile
            .row(i)
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(
            out,
            "  {} [archetype={}, opinions=\"{}\"];",
            i,
            state.agents[i.index()].archetype.label(),
            opinions
        )
        .unwrap();
    }
    for (i, j) in state.graph.edges() {
        writeln!(out, "  {i} -- {j};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Plain-text edge list: one `i j w_ij w_ji` line per edge, ascending.
pub fn edge_list_string<S: Scalar>(state: &SimState<S>) -> String {
    let mut out = String::new();
    for (i, j) in state.graph.edges() {
        let w_ij = state.graph.weight(i, j).unwrap();
        let w_ji = state.graph.weight(j, i).unwrap();
        writeln!(out, "{i} {j} {w_ij} {w_ji}").unwrap();
    }
    out
}

/// CSV header for [`metrics_csv`].
pub fn metrics_csv_header() -> String {
    let mut header =
        String::from("t,density,n_components,largest_component,isolates,distinct_opinions");
    for archetype in Archetype::ALL {
        let label = archetype.label();
        write!(
            header,
            ",btw_mean_{label},btw_std_{label},reward_mean_{label},reward_std_{label}"
        )
        .unwrap();
    }
    header
}

/// One row per metric frame; absent archetypes leave their columns empty.
pub fn metrics_csv<S: Scalar>(frames: &[MetricFrame<S>]) -> String {
    let mut out = metrics_csv_header();
    out.push('\n');
    for frame in frames {
        let mut line = format!(
            "{},{},{},{},{},{}",
            frame.t,
            frame.density,
            frame.component_sizes.len(),
            frame.largest_component(),
            frame.isolate_count,
            frame.distinct_opinions
        );
        for archetype in Archetype::ALL {
            let btw = frame.per_type_betweenness.get(archetype);
            let reward = frame.per_type_reward.get(archetype);
            match (btw, reward) {
                (Some(b), Some(r)) => {
                    write!(line, ",{},{},{},{}", b.mean, b.std, r.mean, r.std).unwrap()
                }
                _ => line.push_str(",,,,"),
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Opinion trajectories: `t,node,archetype,k0..k{K-1}`, one row per node per
/// recorded step.
pub fn trajectory_csv<S: Scalar>(result: &SimResult<S>) -> String {
    let topics = result.config.k;
    let mut out = String::from("t,node,archetype");
    for k in 0..topics {
        write!(out, ",k{k}").unwrap();
    }
    out.push('\n');
    let types = result.final_state.archetypes();
    for (t, snapshot) in result.trajectory.iter().enumerate() {
        for (node, row) in snapshot.iter().enumerate() {
            write!(out, "{t},{node},{}", types[node].label()).unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}
