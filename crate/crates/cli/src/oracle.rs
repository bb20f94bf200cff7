//! Brute-force equivalence suites: slow, independent re-derivations of the
//! core algorithms, run pairwise against the fast implementations.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use opinet_core::engine::{init, MaskInit, SimConfig, SimState};
use opinet_core::graph::{generate, GenKind, GenSpec, NodeId, SocialGraph};
use opinet_core::metrics::betweenness;
use opinet_core::opinion::aggregate_opinion;
use opinet_core::WeightInit;

/// Outcome of one equivalence suite.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn line(&self) -> String {
        format!(
            "oracle {:<22} {} ({} cases{})",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", self.detail)
            }
        )
    }
}

fn random_graph(n: usize, p: f64, seed: u64) -> SocialGraph<f64> {
    generate(&GenSpec {
        kind: GenKind::Random,
        n,
        saturation: p.max(1e-9),
        seed,
    })
    .unwrap()
}

/// All shortest `s`-`t` paths, found by BFS layering plus explicit descent.
fn all_shortest_paths(g: &SocialGraph<f64>, s: NodeId, t: NodeId) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    dist[s.index()] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v).unwrap() {
            if dist[w.index()] == usize::MAX {
                dist[w.index()] = dist[v.index()] + 1;
                queue.push_back(w);
            }
        }
    }
    if dist[t.index()] == usize::MAX {
        return Vec::new();
    }
    fn descend(
        g: &SocialGraph<f64>,
        dist: &[usize],
        s: NodeId,
        v: NodeId,
        current: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        if v == s {
            let mut path = current.clone();
            path.reverse();
            out.push(path);
            return;
        }
        for &u in g.neighbors(v).unwrap() {
            if dist[u.index()] + 1 == dist[v.index()] {
                current.push(u);
                descend(g, dist, s, u, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut current = vec![t];
    descend(g, &dist, s, t, &mut current, &mut out);
    out
}

/// Betweenness by explicit all-pairs shortest-path enumeration.
fn betweenness_oracle(g: &SocialGraph<f64>) -> Vec<f64> {
    let n = g.node_count();
    let mut scores = vec![0.0; n];
    if n <= 2 {
        return scores;
    }
    for s in 0..n {
        for t in (s + 1)..n {
            let paths = all_shortest_paths(g, NodeId(s), NodeId(t));
            if paths.is_empty() {
                continue;
            }
            let total = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    scores[v.index()] += 1.0 / total;
                }
            }
        }
    }
    let norm = ((n - 1) * (n - 2)) as f64 / 2.0;
    scores.iter().map(|v| v / norm).collect()
}

/// Brandes vs path enumeration on 100 random graphs with n <= 12.
pub fn check_betweenness() -> OracleReport {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 0..100u64 {
        let n = 3 + (seed as usize * 7) % 10; // 3..=12
        let p = 0.15 + 0.08 * ((seed % 10) as f64); // 0.15..=0.87
        let g = random_graph(n, p, seed);
        cases += 1;
        let fast = betweenness(&g);
        let slow = betweenness_oracle(&g);
        for (a, b) in fast.iter().zip(&slow) {
            let err = (a - b).abs();
            worst = worst.max(err);
            if err > 1e-9 {
                failures += 1;
                break;
            }
        }
    }
    OracleReport {
        name: "betweenness",
        cases,
        failures,
        detail: format!("max |err| {worst:.3e}, tol 1e-9"),
    }
}

/// Fast aggregation vs a direct ratio-of-sums on 1000 random instances with
/// n <= 10: random topology, weights and partial revelations.
pub fn check_aggregate() -> OracleReport {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x5851_f42d));
        let n = rng.gen_range(2..=10usize);
        let topics = rng.gen_range(1..=5usize);
        let config = SimConfig {
            nodes: n,
            k: topics,
            type_dist: [0.4, 0.3, 0.3],
            saturation: rng.gen_range(0.2..=1.0),
            generator: GenKind::Random,
            mask_init: MaskInit::AllHidden,
            weight_init: WeightInit::UniformRandom,
            ..SimConfig::base(n, topics, 1, seed)
        };
        let mut state: SimState<f64> = init(&config).unwrap();
        for (i, j) in state.graph.edges().collect::<Vec<_>>() {
            for k in 0..topics {
                if rng.gen_bool(0.5) {
                    state.masks.reveal(i, j, k, state.profile.get(i, k));
                }
                if rng.gen_bool(0.5) {
                    state.masks.reveal(j, i, k, state.profile.get(j, k));
                }
            }
        }
        cases += 1;
        'instance: for i in state.graph.nodes() {
            let fast = aggregate_opinion(i, &state.graph, &state.profile, &state.masks);
            for (k, &fast_k) in fast.iter().enumerate() {
                let mut num = 0.0;
                let mut den = 0.0;
                for &j in state.graph.neighbors(i).unwrap() {
                    let w = state.graph.weight(j, i).unwrap();
                    num += w * state.masks.entry(j, i, k) as f64;
                    den += w;
                }
                let expected = if den > 0.0 {
                    num / den
                } else {
                    state.profile.get(i, k) as f64
                };
                let err = (fast_k - expected).abs();
                worst = worst.max(err);
                if err > 1e-12 {
                    failures += 1;
                    break 'instance;
                }
            }
        }
    }
    OracleReport {
        name: "aggregate_opinion",
        cases,
        failures,
        detail: format!("max |err| {worst:.3e}, tol 1e-12"),
    }
}

/// Triadic candidates vs an exhaustive all-pairs common-neighbor scan on
/// random graphs with n <= 8.
pub fn check_triadic() -> OracleReport {
    let mut failures = 0;
    let mut cases = 0;
    for seed in 0..200u64 {
        let n = 2 + (seed as usize) % 7; // 2..=8
        let p = 0.1 + 0.1 * ((seed % 9) as f64);
        let g = random_graph(n, p.min(1.0), seed);
        cases += 1;
        let fast = g.triadic_candidates();
        let mut slow = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (i, j) = (NodeId(i), NodeId(j));
                if g.has_edge(i, j) {
                    continue;
                }
                let common = g
                    .neighbors(i)
                    .unwrap()
                    .intersection(g.neighbors(j).unwrap())
                    .count();
                if common >= 1 {
                    slow.insert((i, j));
                }
            }
        }
        if fast != slow {
            failures += 1;
        }
    }
    OracleReport {
        name: "triadic_candidates",
        cases,
        failures,
        detail: String::new(),
    }
}

/// Run all three suites.
pub fn check_all() -> Vec<OracleReport> {
    vec![check_betweenness(), check_aggregate(), check_triadic()]
}
