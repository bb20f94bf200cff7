//! Topology: the social graph, the three seed-graph generators, and
//! triadic-closure growth.
//!
//! The graph is undirected; each edge carries a pair of directed influence
//! weights (one per orientation). Self-edges are never stored — self-influence
//! is handled in opinion aggregation, not topology.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Dense node identifier in `[0, n)`, stable for the lifetime of a run.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self edge on node {0}")]
    SelfEdge(NodeId),
    #[error("node {node} out of range (n = {n})")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

/// Undirected topology plus directed influence weights.
///
/// Invariants maintained by every mutator:
/// - adjacency is symmetric and free of self-edges;
/// - an edge `{i, j}` always carries both `w_ij` and `w_ji`;
/// - removing an edge removes both weight orientations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    bound(serialize = "S: Scalar", deserialize = "S: Scalar"),
    into = "GraphRepr<S>",
    from = "GraphRepr<S>"
)]
pub struct SocialGraph<S: Scalar> {
    adj: Vec<BTreeSet<NodeId>>,
    weights: BTreeMap<(NodeId, NodeId), S>,
    edge_count: usize,
}

/// Edge-list mirror used for (de)serialization; tuple map keys do not
/// survive JSON.
#[derive(Serialize, Deserialize)]
struct GraphRepr<S> {
    n: usize,
    edges: Vec<(usize, usize, S, S)>,
}

impl<S: Scalar> From<SocialGraph<S>> for GraphRepr<S> {
    fn from(g: SocialGraph<S>) -> Self {
        let edges = g
            .edges()
            .map(|(i, j)| {
                (
                    i.index(),
                    j.index(),
                    g.weight(i, j).unwrap(),
                    g.weight(j, i).unwrap(),
                )
            })
            .collect();
        GraphRepr {
            n: g.node_count(),
            edges,
        }
    }
}

impl<S: Scalar> From<GraphRepr<S>> for SocialGraph<S> {
    fn from(r: GraphRepr<S>) -> Self {
        let mut g = SocialGraph::new(r.n);
        for (i, j, wij, wji) in r.edges {
            g.add_edge(NodeId(i), NodeId(j), wij, wji)
                .expect("serialized edge list is well-formed");
        }
        g
    }
}

impl<S: Scalar> SocialGraph<S> {
    pub fn new(n: usize) -> Self {
        SocialGraph {
            adj: vec![BTreeSet::new(); n],
            weights: BTreeMap::new(),
            edge_count: 0,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.adj.len()).map(NodeId)
    }

    fn check_node(&self, i: NodeId) -> Result<(), GraphError> {
        if i.index() >= self.adj.len() {
            Err(GraphError::NodeOutOfRange {
                node: i,
                n: self.adj.len(),
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.adj.get(i.index()).is_some_and(|s| s.contains(&j))
    }

    /// Insert `{i, j}` with the given directed weights. Idempotent: inserting
    /// an existing edge leaves its weights unchanged. Returns whether the
    /// edge is new.
    pub fn add_edge(&mut self, i: NodeId, j: NodeId, w_ij: S, w_ji: S) -> Result<bool, GraphError> {
        if i == j {
            return Err(GraphError::SelfEdge(i));
        }
        self.check_node(i)?;
        self.check_node(j)?;
        if self.has_edge(i, j) {
            return Ok(false);
        }
        self.adj[i.index()].insert(j);
        self.adj[j.index()].insert(i);
        self.weights.insert((i, j), w_ij);
        self.weights.insert((j, i), w_ji);
        self.edge_count += 1;
        Ok(true)
    }

    /// Remove `{i, j}` and both weight orientations. Idempotent; removing an
    /// absent edge is a no-op. Returns whether an edge was removed.
    pub fn remove_edge(&mut self, i: NodeId, j: NodeId) -> bool {
        if !self.has_edge(i, j) {
            return false;
        }
        self.adj[i.index()].remove(&j);
        self.adj[j.index()].remove(&i);
        self.weights.remove(&(i, j));
        self.weights.remove(&(j, i));
        self.edge_count -= 1;
        true
    }

    /// Open neighborhood of `i` (excludes `i` itself).
    pub fn neighbors(&self, i: NodeId) -> Result<&BTreeSet<NodeId>, GraphError> {
        self.check_node(i)?;
        Ok(&self.adj[i.index()])
    }

    /// Open neighborhood without the range check; `i` must be a valid node.
    #[inline]
    pub(crate) fn neighbors_unchecked(&self, i: NodeId) -> &BTreeSet<NodeId> {
        &self.adj[i.index()]
    }

    #[inline]
    pub fn degree(&self, i: NodeId) -> usize {
        self.adj[i.index()].len()
    }

    /// Directed influence weight of the edge from `i` to `j`, if present.
    #[inline]
    pub fn weight(&self, i: NodeId, j: NodeId) -> Option<S> {
        self.weights.get(&(i, j)).copied()
    }

    /// Overwrite the directed weight `i -> j`. No-op when the edge is absent.
    pub fn set_weight(&mut self, i: NodeId, j: NodeId, w: S) -> bool {
        if !self.has_edge(i, j) {
            return false;
        }
        self.weights.insert((i, j), w);
        true
    }

    /// Undirected edges as ordered pairs `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, nbrs)| {
            let i = NodeId(i);
            nbrs.iter()
                .copied()
                .filter(move |&j| i < j)
                .map(move |j| (i, j))
        })
    }

    /// Non-adjacent pairs with at least one common neighbor — exactly the
    /// pairs whose connection would close a triad.
    pub fn triadic_candidates(&self) -> BTreeSet<(NodeId, NodeId)> {
        let mut out = BTreeSet::new();
        for u in self.nodes() {
            let nbrs: Vec<NodeId> = self.adj[u.index()].iter().copied().collect();
            for (a_pos, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[a_pos + 1..] {
                    if !self.has_edge(a, b) {
                        out.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
        out
    }

    /// One independent closure trial per candidate pair: each pair returned
    /// by [`triadic_candidates`](Self::triadic_candidates) is added with
    /// probability `friend_prob`. New edges get weights from `weight_fn`
    /// (drawn from the same stream, in candidate order). Returns the added
    /// pairs in ascending order.
    pub fn grow<F>(
        &mut self,
        friend_prob: f64,
        rng: &mut ChaCha8Rng,
        mut weight_fn: F,
    ) -> Vec<(NodeId, NodeId)>
    where
        F: FnMut(&mut ChaCha8Rng) -> (S, S),
    {
        let candidates = self.triadic_candidates();
        let mut added = Vec::new();
        for (i, j) in candidates {
            if rng.gen_bool(friend_prob) {
                let (w_ij, w_ji) = weight_fn(rng);
                self.add_edge(i, j, w_ij, w_ji)
                    .expect("candidates are valid non-self pairs");
                added.push((i, j));
            }
        }
        added
    }
}

/// Seed-graph generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Random,
    #[default]
    SmallWorld,
    ScaleFree,
}

/// Seed-graph request. `saturation` is the target edge density in `(0, 1]`;
/// each generator derives its own parameter from it (see [`generate`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub saturation: f64,
    pub seed: u64,
}

impl GenSpec {
    fn validate(&self) -> Result<(), GraphError> {
        if self.n < 2 {
            return Err(GraphError::InvalidSpec(format!(
                "n must be >= 2 (got {})",
                self.n
            )));
        }
        if !(self.saturation > 0.0 && self.saturation <= 1.0) {
            return Err(GraphError::InvalidSpec(format!(
                "saturation must lie in (0, 1] (got {})",
                self.saturation
            )));
        }
        Ok(())
    }
}

/// Even ring-lattice degree used by the small-world generator:
/// `k = max(2, 2 * floor(saturation * (n - 1) / 2))`, so the pre-rewiring
/// lattice density tracks `saturation`.
pub fn small_world_base_degree(n: usize, saturation: f64) -> usize {
    let half = (saturation * (n - 1) as f64 / 2.0).floor() as usize;
    (2 * half).max(2)
}

/// Edges attached per new node by the scale-free generator:
/// `m = max(1, round(saturation * (n - 1) / 2))`.
pub fn scale_free_attachment(n: usize, saturation: f64) -> usize {
    let m = (saturation * (n - 1) as f64 / 2.0).round() as usize;
    m.clamp(1, n - 1)
}

/// Generate a seed graph. Deterministic: identical `GenSpec` (including
/// seed) produces an identical edge set. All weights start at 1; callers
/// apply their own weight-initialization policy afterwards.
pub fn generate<S: Scalar>(spec: &GenSpec) -> Result<SocialGraph<S>, GraphError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let one = S::one();
    let mut g = SocialGraph::new(n);

    match spec.kind {
        GenKind::Random => {
            // G(n, p) with p = saturation.
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(spec.saturation) {
                        g.add_edge(NodeId(i), NodeId(j), one, one).unwrap();
                    }
                }
            }
        }
        GenKind::SmallWorld => {
            let k = small_world_base_degree(n, spec.saturation);
            let half = k / 2;
            // Ring lattice: each node joined to its `half` nearest neighbors
            // on each side (duplicate wrap-around pairs deduplicate).
            for d in 1..=half {
                for i in 0..n {
                    let j = (i + d) % n;
                    g.add_edge(NodeId(i), NodeId(j), one, one).unwrap();
                }
            }
            // Rewire each lattice edge with probability beta = saturation,
            // keeping the near endpoint.
            for d in 1..=half {
                for i in 0..n {
                    if !rng.gen_bool(spec.saturation) {
                        continue;
                    }
                    let old = NodeId((i + d) % n);
                    let u = NodeId(i);
                    if g.degree(u) >= n - 1 || !g.has_edge(u, old) {
                        continue;
                    }
                    let mut w = NodeId(rng.gen_range(0..n));
                    while w == u || g.has_edge(u, w) {
                        w = NodeId(rng.gen_range(0..n));
                    }
                    g.remove_edge(u, old);
                    g.add_edge(u, w, one, one).unwrap();
                }
            }
        }
        GenKind::ScaleFree => {
            // Preferential attachment: each arriving node attaches to m
            // distinct targets sampled proportionally to degree.
            let m = scale_free_attachment(n, spec.saturation).min(n - 1);
            let mut repeated: Vec<NodeId> = Vec::new();
            let mut targets: Vec<NodeId> = (0..m.min(n)).map(NodeId).collect();
            for source in m..n {
                let source = NodeId(source);
                for &t in &targets {
                    g.add_edge(source, t, one, one).unwrap();
                }
                repeated.extend(targets.iter().copied());
                repeated.extend(std::iter::repeat_n(source, m));
                let mut next: BTreeSet<NodeId> = BTreeSet::new();
                while next.len() < m {
                    let pick = repeated[rng.gen_range(0..repeated.len())];
                    next.insert(pick);
                }
                targets = next.into_iter().collect();
            }
        }
    }
    Ok(g)
}
