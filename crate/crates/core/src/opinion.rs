//! Opinion state, revelation masks, influence aggregation, archetype reward
//! functions and the opinion-update rule.
//!
//! Conventions:
//! - a private opinion entry is exactly -1 or +1 (`i8`);
//! - a mask entry is 0 (hidden) or the revealer's current private opinion;
//! - aggregation is the influence-normalized mean of what the neighbors
//!   reveal: a hidden entry contributes 0 to the numerator while its
//!   holder's weight stays in the normalization, and an isolate falls back
//!   to its own opinion.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{NodeId, SocialGraph};
use crate::scalar::Scalar;

/// Agent archetype: the bundle of reward function, update rule and policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Archetype {
    /// Homophilic: rewards agreement, moves toward the neighborhood.
    Hom,
    /// Heterophilic: rewards an even agree/disagree split.
    Het,
    /// Adversarial: rewards disagreement, moves away from the neighborhood.
    Adv,
}

impl Archetype {
    pub const ALL: [Archetype; 3] = [Archetype::Hom, Archetype::Het, Archetype::Adv];

    pub fn label(self) -> &'static str {
        match self {
            Archetype::Hom => "hom",
            Archetype::Het => "het",
            Archetype::Adv => "adv",
        }
    }
}

/// Actions an agent may use; nop is always available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSet {
    pub reveal: bool,
    pub unfriend: bool,
}

impl Default for ActionSet {
    fn default() -> Self {
        ActionSet {
            reveal: true,
            unfriend: true,
        }
    }
}

/// Per-agent behavioral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct AgentSpec<S: Scalar> {
    pub archetype: Archetype,
    /// Resistance to opinion influence, in [0, 0.5]: minimum aggregate
    /// magnitude required before a flip is considered.
    pub res: S,
    /// Probability an eligible flip actually happens.
    pub upd_prob: S,
    /// Probability an eligible unfriend actually happens.
    pub unf_prob: S,
    /// Minimum pairwise reward needed to avoid unfriending.
    pub unf_thresh: S,
    pub actions: ActionSet,
}

/// All agents' private opinion vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpinionProfile {
    topics: usize,
    rows: Vec<Vec<i8>>,
}

impl OpinionProfile {
    /// i.i.d. uniform opinions on {-1, +1}.
    pub fn random(n: usize, topics: usize, rng: &mut ChaCha8Rng) -> Self {
        let rows = (0..n)
            .map(|_| {
                (0..topics)
                    .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
                    .collect()
            })
            .collect();
        OpinionProfile { topics, rows }
    }

    pub fn from_rows(rows: Vec<Vec<i8>>, topics: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == topics));
        OpinionProfile { topics, rows }
    }

    #[inline]
    pub fn topics(&self) -> usize {
        self.topics
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn get(&self, i: NodeId, k: usize) -> i8 {
        self.rows[i.index()][k]
    }

    #[inline]
    pub fn row(&self, i: NodeId) -> &[i8] {
        &self.rows[i.index()]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    pub fn set(&mut self, i: NodeId, k: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        self.rows[i.index()][k] = value;
    }

    /// Number of distinct opinion vectors present.
    pub fn distinct(&self) -> usize {
        self.rows.iter().collect::<BTreeSet<_>>().len()
    }
}

/// Per ordered pair (revealer, observer): which topics the revealer has
/// shown, stored sparsely — an absent pair means nothing revealed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "MaskRepr", from = "MaskRepr")]
pub struct MaskStore {
    topics: usize,
    revealed: BTreeMap<(NodeId, NodeId), Vec<i8>>,
}

#[derive(Serialize, Deserialize)]
struct MaskRepr {
    topics: usize,
    entries: Vec<(usize, usize, Vec<i8>)>,
}

impl From<MaskStore> for MaskRepr {
    fn from(m: MaskStore) -> Self {
        MaskRepr {
            topics: m.topics,
            entries: m
                .revealed
                .into_iter()
                .map(|((i, j), v)| (i.index(), j.index(), v))
                .collect(),
        }
    }
}

impl From<MaskRepr> for MaskStore {
    fn from(r: MaskRepr) -> Self {
        MaskStore {
            topics: r.topics,
            revealed: r
                .entries
                .into_iter()
                .map(|(i, j, v)| ((NodeId(i), NodeId(j)), v))
                .collect(),
        }
    }
}

impl MaskStore {
    pub fn new(topics: usize) -> Self {
        MaskStore {
            topics,
            revealed: BTreeMap::new(),
        }
    }

    #[inline]
    pub fn topics(&self) -> usize {
        self.topics
    }

    /// `m_ijk`: what `i` shows `j` on topic `k`; 0 when hidden.
    #[inline]
    pub fn entry(&self, i: NodeId, j: NodeId, k: usize) -> i8 {
        self.revealed.get(&(i, j)).map_or(0, |v| v[k])
    }

    /// Full masking vector for the ordered pair, materialized.
    pub fn pair(&self, i: NodeId, j: NodeId) -> Vec<i8> {
        self.revealed
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| vec![0; self.topics])
    }

    /// Reveal topic `k` of `i` to `j`. Idempotent; re-revealing rewrites the
    /// entry to the current opinion value.
    pub fn reveal(&mut self, i: NodeId, j: NodeId, k: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        let row = self
            .revealed
            .entry((i, j))
            .or_insert_with(|| vec![0; self.topics]);
        row[k] = value;
    }

    /// Reveal all of `i`'s opinions to `j` at once.
    pub fn reveal_all(&mut self, i: NodeId, j: NodeId, opinions: &[i8]) {
        debug_assert_eq!(opinions.len(), self.topics);
        self.revealed.insert((i, j), opinions.to_vec());
    }

    /// Zero both directions of the pair: the post-unfriend state. Re-friending
    /// later starts from nothing revealed.
    pub fn clear_pair(&mut self, i: NodeId, j: NodeId) {
        self.revealed.remove(&(i, j));
        self.revealed.remove(&(j, i));
    }

    /// Topics `i` has not yet revealed to `j`, ascending.
    pub fn hidden_topics(&self, i: NodeId, j: NodeId) -> Vec<usize> {
        match self.revealed.get(&(i, j)) {
            None => (0..self.topics).collect(),
            Some(row) => row
                .iter()
                .enumerate()
                .filter(|(_, &v)| v == 0)
                .map(|(k, _)| k)
                .collect(),
        }
    }

    /// Whether `i` has revealed anything to `j`.
    pub fn any_revealed(&self, i: NodeId, j: NodeId) -> bool {
        self.revealed
            .get(&(i, j))
            .is_some_and(|row| row.iter().any(|&v| v != 0))
    }

    /// Rewrite every already-revealed entry of `i` on topic `k` to the new
    /// opinion value: revelation persists across flips.
    pub fn sync_flip(&mut self, i: NodeId, k: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        for ((from, _), row) in self
            .revealed
            .range_mut((i, NodeId(0))..=(i, NodeId(usize::MAX)))
        {
            debug_assert_eq!(*from, i);
            if row[k] != 0 {
                row[k] = value;
            }
        }
    }

    /// Ordered pairs with at least one revealed entry.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.revealed.keys().copied()
    }
}

/// Perceived opinion distance over the revealed topics; undefined until the
/// other agent has revealed at least one opinion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct PairDistance<S: Scalar> {
    pub value: Option<S>,
    /// Number of topics the other agent has revealed.
    pub revealed: usize,
}

/// Distance `i` perceives to `j`: the disagreement fraction over the topics
/// `j` has revealed to `i`.
pub fn distance<S: Scalar>(
    i: NodeId,
    j: NodeId,
    profile: &OpinionProfile,
    masks: &MaskStore,
) -> PairDistance<S> {
    let mut revealed = 0usize;
    let mut disagreements = 0usize;
    for k in 0..profile.topics() {
        let shown = masks.entry(j, i, k);
        if shown != 0 {
            revealed += 1;
            if profile.get(i, k) != shown {
                disagreements += 1;
            }
        }
    }
    if revealed == 0 {
        PairDistance {
            value: None,
            revealed: 0,
        }
    } else {
        let value = S::from_usize(disagreements).unwrap() / S::from_usize(revealed).unwrap();
        PairDistance {
            value: Some(value),
            revealed,
        }
    }
}

/// Pairwise reward as a function of perceived distance, per archetype.
pub fn pair_reward<S: Scalar>(archetype: Archetype, d: S) -> S {
    let one = S::one();
    let two = one + one;
    match archetype {
        Archetype::Hom => one - d,
        Archetype::Adv => d,
        Archetype::Het => one - two * (d - S::half()).abs(),
    }
}

/// Mean pairwise reward over neighbors with a defined distance; 0 for an
/// isolate or when no neighbor has revealed anything.
pub fn neighborhood_reward<S: Scalar>(
    i: NodeId,
    graph: &SocialGraph<S>,
    profile: &OpinionProfile,
    masks: &MaskStore,
    archetype: Archetype,
) -> S {
    let mut total = S::zero();
    let mut count = 0usize;
    for &j in graph.neighbors_unchecked(i) {
        if let Some(d) = distance::<S>(i, j, profile, masks).value {
            total = total + pair_reward(archetype, d);
            count += 1;
        }
    }
    if count == 0 {
        S::zero()
    } else {
        total / S::from_usize(count).unwrap()
    }
}

/// Influence-normalized aggregate opinion over `i`'s neighborhood.
///
/// Each component is `sum_j w_ji * m_jik / sum_j w_ji` with `j` ranging over
/// `i`'s neighbors: the incoming-influence-weighted mean of what the
/// neighbors reveal. Hidden entries add 0 on top while their holder's weight
/// stays below, so they dilute the aggregate toward neutral. An agent with
/// no incoming influence (an isolate, or all incoming weights zero)
/// aggregates to its own opinion. Every component lies in [-1, 1].
///
/// With all weights equal this reduces to the plain neighbor mean, so the
/// sign test against the agent's own opinion implements the strict-majority
/// rule: a bare 50/50 split of the neighbors yields 0 and never triggers a
/// flip.
pub fn aggregate_opinion<S: Scalar>(
    i: NodeId,
    graph: &SocialGraph<S>,
    profile: &OpinionProfile,
    masks: &MaskStore,
) -> Vec<S> {
    let topics = profile.topics();
    let mut numer = vec![S::zero(); topics];
    let mut denom = S::zero();
    for &j in graph.neighbors_unchecked(i) {
        let w = graph
            .weight(j, i)
            .expect("edge weights exist for both orientations");
        denom = denom + w;
        for (k, acc) in numer.iter_mut().enumerate() {
            *acc = *acc + w * S::from_opinion(masks.entry(j, i, k));
        }
    }
    if denom > S::zero() {
        for acc in numer.iter_mut() {
            *acc = *acc / denom;
        }
        numer
    } else {
        (0..topics)
            .map(|k| S::from_opinion(profile.get(i, k)))
            .collect()
    }
}

/// Normalized incoming influence for `i`, ascending by neighbor. The weights
/// sum to 1 whenever the raw incoming sum is positive; an isolate has no
/// incoming influence.
pub fn normalized_incoming<S: Scalar>(graph: &SocialGraph<S>, i: NodeId) -> Vec<(NodeId, S)> {
    let mut entries: Vec<(NodeId, S)> = Vec::new();
    let mut total = S::zero();
    for &j in graph.neighbors_unchecked(i) {
        let w = graph
            .weight(j, i)
            .expect("edge weights exist for both orientations");
        total = total + w;
        entries.push((j, w));
    }
    if total > S::zero() {
        for (_, w) in entries.iter_mut() {
            *w = *w / total;
        }
    }
    entries
}

/// One opinion-update decision for a single topic.
///
/// HOM and HET flip away from their own value when the aggregate opposes it;
/// ADV flips when the aggregate agrees. Either way the aggregate's magnitude
/// must exceed the agent's resistance, and the flip then happens with
/// probability `upd_prob`. The RNG is consulted only when the flip condition
/// holds.
pub fn update_opinion<S: Scalar>(
    archetype: Archetype,
    own: i8,
    aggregate: S,
    res: S,
    upd_prob: S,
    rng: &mut ChaCha8Rng,
) -> i8 {
    let signed = aggregate * S::from_opinion(own);
    let triggered = match archetype {
        Archetype::Hom | Archetype::Het => signed < S::zero(),
        Archetype::Adv => signed > S::zero(),
    };
    if triggered && aggregate.abs() > res && rng.gen_bool(upd_prob.as_f64()) {
        -own
    } else {
        own
    }
}

/// What agent `i` can observe: its own opinions plus every neighbor's
/// revealed mask. This is the observation surface handed to policies,
/// including external (learning) ones.
pub struct View<'a, S: Scalar> {
    observer: NodeId,
    graph: &'a SocialGraph<S>,
    profile: &'a OpinionProfile,
    masks: &'a MaskStore,
}

impl<'a, S: Scalar> View<'a, S> {
    pub fn new(
        observer: NodeId,
        graph: &'a SocialGraph<S>,
        profile: &'a OpinionProfile,
        masks: &'a MaskStore,
    ) -> Self {
        View {
            observer,
            graph,
            profile,
            masks,
        }
    }

    #[inline]
    pub fn observer(&self) -> NodeId {
        self.observer
    }

    #[inline]
    pub fn topics(&self) -> usize {
        self.profile.topics()
    }

    pub fn neighbors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.graph
            .neighbors_unchecked(self.observer)
            .iter()
            .copied()
    }

    /// What the observer knows about `j`'s opinion on `k`: its own private
    /// value when `j` is itself, otherwise the revealed entry (0 if hidden
    /// or not a neighbor).
    pub fn known(&self, j: NodeId, k: usize) -> i8 {
        if j == self.observer {
            self.profile.get(j, k)
        } else if self.graph.has_edge(self.observer, j) {
            self.masks.entry(j, self.observer, k)
        } else {
            0
        }
    }

    pub fn distance_to(&self, j: NodeId) -> PairDistance<S> {
        distance(self.observer, j, self.profile, self.masks)
    }
}
