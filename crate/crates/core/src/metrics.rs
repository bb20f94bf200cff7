//! Per-step graph and opinion-space measurements, plus the outcome detectors
//! used by the experiment suites.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::SimState;
use crate::graph::{NodeId, SocialGraph};
use crate::opinion::{neighborhood_reward, Archetype, OpinionProfile};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("trajectory too short: length {len} < window {window}")]
    TrajectoryTooShort { len: usize, window: usize },
    #[error("oscillation window must be >= 4 (got {0})")]
    WindowTooSmall(usize),
}

/// Shortest-path betweenness centrality on the unweighted undirected
/// topology (Brandes' accumulation), normalized by (n-1)(n-2)/2. Unreachable
/// pairs contribute nothing; influence weights are ignored.
pub fn betweenness<S: Scalar>(graph: &SocialGraph<S>) -> Vec<S> {
    let n = graph.node_count();
    if n <= 2 {
        return vec![S::zero(); n];
    }
    let mut scores = vec![S::zero(); n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut queue: VecDeque<usize> = VecDeque::with_capacity(n);

    for s in 0..n {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![S::zero(); n];
        let mut dist = vec![-1i64; n];
        stack.clear();
        queue.clear();
        sigma[s] = S::one();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in graph.neighbors_unchecked(NodeId(v)) {
                let w = w.index();
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] = sigma[w] + sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![S::zero(); n];
        while let Some(w) = stack.pop() {
            let coeff = (S::one() + delta[w]) / sigma[w];
            for &v in &preds[w] {
                delta[v] = delta[v] + sigma[v] * coeff;
            }
            if w != s {
                scores[w] = scores[w] + delta[w];
            }
        }
    }

    // Undirected accumulation counts each pair twice; fold the halving into
    // the (n-1)(n-2)/2 pair normalization.
    let norm = S::one() / S::from_usize((n - 1) * (n - 2)).unwrap();
    for score in scores.iter_mut() {
        *score = *score * norm;
    }
    scores
}

/// Connected component sizes, descending.
pub fn components<S: Scalar>(graph: &SocialGraph<S>) -> Vec<usize> {
    component_members(graph)
        .into_iter()
        .map(|c| c.len())
        .collect()
}

/// Connected components as member lists, largest first (ties by smallest
/// member id).
pub fn component_members<S: Scalar>(graph: &SocialGraph<S>) -> Vec<Vec<NodeId>> {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    let mut out: Vec<Vec<NodeId>> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            members.push(NodeId(v));
            for &w in graph.neighbors_unchecked(NodeId(v)) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push_back(w.index());
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Edge density `2|E| / (n(n-1))`; reported as 0 for n < 2.
pub fn graph_density<S: Scalar>(graph: &SocialGraph<S>) -> S {
    let n = graph.node_count();
    if n < 2 {
        return S::zero();
    }
    let two = S::one() + S::one();
    two * S::from_usize(graph.edge_count()).unwrap() / S::from_usize(n * (n - 1)).unwrap()
}

fn induced_density<S: Scalar>(graph: &SocialGraph<S>, members: &[NodeId]) -> S {
    let n = members.len();
    if n < 2 {
        return S::zero();
    }
    let set: BTreeSet<NodeId> = members.iter().copied().collect();
    let mut edges = 0usize;
    for &i in members {
        for &j in graph.neighbors_unchecked(i) {
            if j > i && set.contains(&j) {
                edges += 1;
            }
        }
    }
    let two = S::one() + S::one();
    two * S::from_usize(edges).unwrap() / S::from_usize(n * (n - 1)).unwrap()
}

/// A group of agents inside one component holding the same opinion vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct Camp<S: Scalar> {
    pub opinions: Vec<i8>,
    pub size: usize,
    /// Edge density of the camp's induced subgraph.
    pub internal_density: S,
    /// Set on the strictly denser camp when the component splits into
    /// exactly two camps; ties flag nobody.
    pub core: bool,
}

/// Camp statistics for one connected component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct ComponentCamps<S: Scalar> {
    pub component_size: usize,
    pub camps: Vec<Camp<S>>,
}

impl<S: Scalar> ComponentCamps<S> {
    /// Whether the whole component holds a single opinion vector.
    pub fn is_consensus(&self) -> bool {
        self.camps.len() == 1
    }
}

/// Group each component's members by exact opinion vector; camps are listed
/// largest first (ties by opinion vector), components largest first.
pub fn camps<S: Scalar>(
    graph: &SocialGraph<S>,
    profile: &OpinionProfile,
) -> Vec<ComponentCamps<S>> {
    component_members(graph)
        .into_iter()
        .map(|members| {
            let mut groups: BTreeMap<Vec<i8>, Vec<NodeId>> = BTreeMap::new();
            for &i in &members {
                groups.entry(profile.row(i).to_vec()).or_default().push(i);
            }
            let mut camps: Vec<Camp<S>> = groups
                .into_iter()
                .map(|(opinions, group)| Camp {
                    opinions,
                    size: group.len(),
                    internal_density: induced_density(graph, &group),
                    core: false,
                })
                .collect();
            camps.sort_by(|a, b| b.size.cmp(&a.size).then(a.opinions.cmp(&b.opinions)));
            if camps.len() == 2 {
                let (a, b) = (camps[0].internal_density, camps[1].internal_density);
                if a > b {
                    camps[0].core = true;
                } else if b > a {
                    camps[1].core = true;
                }
            }
            ComponentCamps {
                component_size: members.len(),
                camps,
            }
        })
        .collect()
}

/// True iff the final `window` profile snapshots alternate with period 2:
/// every snapshot equals the one two steps later and at least one differs
/// from its successor.
pub fn detect_oscillation(
    trajectory: &[Vec<Vec<i8>>],
    window: usize,
) -> Result<bool, MetricsError> {
    if window < 4 {
        return Err(MetricsError::WindowTooSmall(window));
    }
    if trajectory.len() < window {
        return Err(MetricsError::TrajectoryTooShort {
            len: trajectory.len(),
            window,
        });
    }
    let tail = &trajectory[trajectory.len() - window..];
    let period_two = tail.windows(3).all(|w| w[0] == w[2]);
    let changes = tail.windows(2).any(|w| w[0] != w[1]);
    Ok(period_two && changes)
}

/// True iff the series' range over its trailing `window` entries is at most
/// `eps`. A series shorter than the window has not plateaued.
pub fn detect_plateau<S: Scalar>(series: &[S], window: usize, eps: S) -> bool {
    if series.len() < window || window == 0 {
        return false;
    }
    let tail = &series[series.len() - window..];
    let mut lo = tail[0];
    let mut hi = tail[0];
    for &v in tail {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    hi - lo <= eps
}

/// Population mean and standard deviation of one archetype's values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct MeanStd<S: Scalar> {
    pub mean: S,
    pub std: S,
}

/// Per-archetype statistics; archetypes with no members are absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct TypeStats<S: Scalar> {
    pub hom: Option<MeanStd<S>>,
    pub het: Option<MeanStd<S>>,
    pub adv: Option<MeanStd<S>>,
}

impl<S: Scalar> TypeStats<S> {
    pub fn get(&self, archetype: Archetype) -> Option<MeanStd<S>> {
        match archetype {
            Archetype::Hom => self.hom,
            Archetype::Het => self.het,
            Archetype::Adv => self.adv,
        }
    }
}

/// Group `values` by archetype and report population mean/stddev per group.
pub fn per_type_series<S: Scalar>(values: &[S], types: &[Archetype]) -> TypeStats<S> {
    debug_assert_eq!(values.len(), types.len());
    let mut stats = TypeStats::default();
    for archetype in Archetype::ALL {
        let group: Vec<S> = values
            .iter()
            .zip(types)
            .filter(|(_, &t)| t == archetype)
            .map(|(&v, _)| v)
            .collect();
        if group.is_empty() {
            continue;
        }
        let count = S::from_usize(group.len()).unwrap();
        let mean = group.iter().copied().sum::<S>() / count;
        let var = group.iter().map(|&v| (v - mean) * (v - mean)).sum::<S>() / count;
        let entry = Some(MeanStd {
            mean,
            std: var.sqrt(),
        });
        match archetype {
            Archetype::Hom => stats.hom = entry,
            Archetype::Het => stats.het = entry,
            Archetype::Adv => stats.adv = entry,
        }
    }
    stats
}

/// All measurements collected after each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct MetricFrame<S: Scalar> {
    pub t: usize,
    pub density: S,
    pub component_sizes: Vec<usize>,
    pub isolate_count: usize,
    pub betweenness: Vec<S>,
    pub per_type_betweenness: TypeStats<S>,
    pub per_type_reward: TypeStats<S>,
    pub distinct_opinions: usize,
    pub camps: Vec<ComponentCamps<S>>,
}

impl<S: Scalar> MetricFrame<S> {
    /// Measure a state. Side-effect free: measuring twice yields identical
    /// frames.
    pub fn compute(state: &SimState<S>) -> Self {
        let types = state.archetypes();
        let betweenness = betweenness(&state.graph);
        let rewards: Vec<S> = (0..state.graph.node_count())
            .map(|i| {
                neighborhood_reward(
                    NodeId(i),
                    &state.graph,
                    &state.profile,
                    &state.masks,
                    types[i],
                )
            })
            .collect();
        let component_sizes = components(&state.graph);
        let isolate_count = component_sizes.iter().filter(|&&s| s == 1).count();
        MetricFrame {
            t: state.t,
            density: graph_density(&state.graph),
            isolate_count,
            per_type_betweenness: per_type_series(&betweenness, &types),
            per_type_reward: per_type_series(&rewards, &types),
            distinct_opinions: state.profile.distinct(),
            camps: camps(&state.graph, &state.profile),
            component_sizes,
            betweenness,
        }
    }

    pub fn largest_component(&self) -> usize {
        self.component_sizes.first().copied().unwrap_or(0)
    }
}

/// Outcome detectors over a finished run, computed from recorded series only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeFlags {
    /// Per component (largest first): does it hold a single opinion vector?
    pub consensus_per_component: Vec<bool>,
    pub oscillation_period2: bool,
    pub density_plateaued: bool,
}

/// Default detector windows: oscillation over the last 10 snapshots, plateau
/// over the last 20 densities within 0.01.
pub const OSCILLATION_WINDOW: usize = 10;
pub const PLATEAU_WINDOW: usize = 20;
pub const PLATEAU_EPS: f64 = 0.01;

impl OutcomeFlags {
    pub fn compute<S: Scalar>(
        result: &crate::engine::SimResult<S>,
        oscillation_window: usize,
        plateau_window: usize,
        plateau_eps: S,
    ) -> Self {
        let final_frame = result
            .frames
            .last()
            .expect("a run records at least frame 0");
        let consensus_per_component = final_frame.camps.iter().map(|c| c.is_consensus()).collect();
        let oscillation_period2 =
            detect_oscillation(&result.trajectory, oscillation_window).unwrap_or(false);
        let density = result.density_series();
        let density_plateaued = detect_plateau(&density, plateau_window, plateau_eps);
        OutcomeFlags {
            consensus_per_component,
            oscillation_period2,
            density_plateaued,
        }
    }

    pub fn standard<S: Scalar>(result: &crate::engine::SimResult<S>) -> Self {
        Self::compute(
            result,
            OSCILLATION_WINDOW,
            PLATEAU_WINDOW,
            S::from_config(PLATEAU_EPS),
        )
    }
}
