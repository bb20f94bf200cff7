//! The four-phase synchronous step loop and full-run orchestration.
//!
//! A step is: choose -> execute -> update -> grow. Choices are evaluated
//! against the frozen end-of-previous-step snapshot; execution applies all
//! unfriends before all reveals; updates are simultaneous (every agent reads
//! the same post-execution state); growth closes triads probabilistically.
//! Determinism: a run is a pure function of (config, seed) — see
//! [`crate::rng`] for the stream-splitting scheme.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{generate, GenKind, GenSpec, NodeId, SocialGraph};
use crate::metrics::MetricFrame;
use crate::opinion::{
    aggregate_opinion, neighborhood_reward, update_opinion, ActionSet, AgentSpec, Archetype,
    MaskStore, OpinionProfile,
};
use crate::policy::{Action, DefaultPolicy, Policy};
use crate::rng::{stream, substream};
use crate::scalar::Scalar;

/// Initial mask state: full observability or nothing revealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MaskInit {
    #[default]
    AllVisible,
    AllHidden,
}

/// Initial directed edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightInit {
    Constant(f64),
    UniformRandom,
}

impl Default for WeightInit {
    fn default() -> Self {
        WeightInit::Constant(1.0)
    }
}

/// Optional per-archetype resistance overrides; unset archetypes use the
/// network-wide `upd_thresh`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ResOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub het: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adv: Option<f64>,
}

impl ResOverrides {
    pub fn get(&self, archetype: Archetype) -> Option<f64> {
        match archetype {
            Archetype::Hom => self.hom,
            Archetype::Het => self.het,
            Archetype::Adv => self.adv,
        }
    }
}

fn default_upd_prob() -> f64 {
    0.25
}
fn default_unf_thresh() -> f64 {
    0.5
}
fn default_unf_prob() -> f64 {
    0.9
}
fn default_friend_prob() -> f64 {
    0.05
}

/// Full simulation parameterization. Accepted as JSON with exactly these
/// snake_case field names; unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub nodes: usize,
    /// Topic count.
    #[serde(alias = "K")]
    pub k: usize,
    /// Proportions for (hom, het, adv); must sum to 1.
    pub type_dist: [f64; 3],
    /// Target seed-graph edge density in (0, 1].
    pub saturation: f64,
    /// Network-wide default resistance, in [0, 0.5].
    #[serde(default)]
    pub upd_thresh: f64,
    #[serde(default = "default_upd_prob")]
    pub upd_prob: f64,
    #[serde(default = "default_unf_thresh")]
    pub unf_thresh: f64,
    #[serde(default = "default_unf_prob")]
    pub unf_prob: f64,
    #[serde(default = "default_friend_prob")]
    pub friend_prob: f64,
    pub steps: usize,
    pub seed: u64,
    #[serde(default)]
    pub generator: GenKind,
    #[serde(default)]
    pub mask_init: MaskInit,
    #[serde(default)]
    pub weight_init: WeightInit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub res_overrides: Option<ResOverrides>,
}

impl SimConfig {
    /// Baseline configuration with the common defaults filled in; callers
    /// override what they need via struct update syntax.
    pub fn base(nodes: usize, k: usize, steps: usize, seed: u64) -> Self {
        SimConfig {
            nodes,
            k,
            type_dist: [1.0, 0.0, 0.0],
            saturation: 0.15,
            upd_thresh: 0.0,
            upd_prob: default_upd_prob(),
            unf_thresh: default_unf_thresh(),
            unf_prob: default_unf_prob(),
            friend_prob: default_friend_prob(),
            steps,
            seed,
            generator: GenKind::default(),
            mask_init: MaskInit::default(),
            weight_init: WeightInit::default(),
            res_overrides: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut issues = Vec::new();
        if self.nodes < 2 {
            issues.push(format!("nodes: must be >= 2 (got {})", self.nodes));
        }
        if self.k == 0 {
            issues.push("k: must be >= 1".to_string());
        }
        let sum: f64 = self.type_dist.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            issues.push(format!("type_dist: entries must sum to 1 (got {sum})"));
        }
        if self.type_dist.iter().any(|&p| p < 0.0) {
            issues.push("type_dist: entries must be non-negative".to_string());
        }
        if !(self.saturation > 0.0 && self.saturation <= 1.0) {
            issues.push(format!(
                "saturation: must lie in (0, 1] (got {})",
                self.saturation
            ));
        }
        if !(0.0..=0.5).contains(&self.upd_thresh) {
            issues.push(format!(
                "upd_thresh: must lie in [0, 0.5] (got {})",
                self.upd_thresh
            ));
        }
        for (name, p) in [
            ("upd_prob", self.upd_prob),
            ("unf_thresh", self.unf_thresh),
            ("unf_prob", self.unf_prob),
            ("friend_prob", self.friend_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                issues.push(format!("{name}: must lie in [0, 1] (got {p})"));
            }
        }
        if let WeightInit::Constant(c) = self.weight_init {
            if !(0.0..=1.0).contains(&c) {
                issues.push(format!(
                    "weight_init: constant must lie in [0, 1] (got {c})"
                ));
            }
        }
        if let Some(overrides) = &self.res_overrides {
            for archetype in Archetype::ALL {
                if let Some(r) = overrides.get(archetype) {
                    if !(0.0..=0.5).contains(&r) {
                        issues.push(format!(
                            "res_overrides.{}: must lie in [0, 0.5] (got {r})",
                            archetype.label()
                        ));
                    }
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { issues })
        }
    }

    fn res_for(&self, archetype: Archetype) -> f64 {
        self.res_overrides
            .as_ref()
            .and_then(|o| o.get(archetype))
            .unwrap_or(self.upd_thresh)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid configuration: {}", issues.join("; "))]
pub struct ConfigError {
    pub issues: Vec<String>,
}

/// Complete simulation state between phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct SimState<S: Scalar> {
    /// Completed steps.
    pub t: usize,
    pub graph: SocialGraph<S>,
    pub profile: OpinionProfile,
    pub masks: MaskStore,
    pub agents: Vec<AgentSpec<S>>,
    /// Master seed all phase substreams derive from.
    pub master_seed: u64,
}

impl<S: Scalar> SimState<S> {
    pub fn archetypes(&self) -> Vec<Archetype> {
        self.agents.iter().map(|a| a.archetype).collect()
    }
}

/// One recorded opinion flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub agent: NodeId,
    pub topic: usize,
    pub from: i8,
    pub to: i8,
}

/// Everything that happened in one step; together with the prior state this
/// fully determines the transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct StepLog<S: Scalar> {
    /// Step index this log completed (1-based).
    pub t: usize,
    /// Chosen actions, indexed by agent, one entry per neighbor at choice
    /// time.
    pub actions: Vec<Vec<Action>>,
    pub flips: Vec<FlipRecord>,
    pub edges_added: Vec<(NodeId, NodeId)>,
    pub edges_removed: Vec<(NodeId, NodeId)>,
    /// Neighborhood reward per agent after the step.
    pub rewards: Vec<S>,
}

/// Full-run record: per-step metric frames, the opinion trajectory, all step
/// logs and the final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"))]
pub struct SimResult<S: Scalar> {
    pub config: SimConfig,
    /// Metric frames for t = 0..=steps.
    pub frames: Vec<MetricFrame<S>>,
    /// Opinion profile snapshot for t = 0..=steps.
    pub trajectory: Vec<Vec<Vec<i8>>>,
    pub logs: Vec<StepLog<S>>,
    pub final_state: SimState<S>,
}

impl<S: Scalar> SimResult<S> {
    pub fn density_series(&self) -> Vec<S> {
        self.frames.iter().map(|f| f.density).collect()
    }
}

/// Largest-remainder apportionment of `n` agents over the type proportions;
/// ties go to the lower archetype index.
fn apportion(dist: &[f64; 3], n: usize) -> [usize; 3] {
    let exact: Vec<f64> = dist.iter().map(|p| p * n as f64).collect();
    let mut counts = [0usize; 3];
    for (c, e) in counts.iter_mut().zip(&exact) {
        *c = e.floor() as usize;
    }
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for idx in order.into_iter().cycle().take(n - assigned) {
        counts[idx] += 1;
    }
    counts
}

/// Build the initial state: seed graph, archetype assignment (largest
/// remainder, then a seeded shuffle), i.i.d. opinions, masks and weights.
pub fn init<S: Scalar>(config: &SimConfig) -> Result<SimState<S>, ConfigError> {
    config.validate()?;
    let seed = config.seed;

    let gen_spec = GenSpec {
        kind: config.generator,
        n: config.nodes,
        saturation: config.saturation,
        seed: crate::rng::derive_seed(seed, &[stream::GRAPH]),
    };
    let mut graph: SocialGraph<S> = generate(&gen_spec).map_err(|e| ConfigError {
        issues: vec![e.to_string()],
    })?;

    // Archetypes: counts by largest remainder, placement by seeded shuffle.
    let counts = apportion(&config.type_dist, config.nodes);
    let mut archetypes = Vec::with_capacity(config.nodes);
    for (archetype, &count) in Archetype::ALL.iter().zip(&counts) {
        archetypes.extend(std::iter::repeat_n(*archetype, count));
    }
    {
        let mut rng = substream(seed, &[stream::ARCHETYPES]);
        // Fisher-Yates.
        for i in (1..archetypes.len()).rev() {
            let j = rng.gen_range(0..=i);
            archetypes.swap(i, j);
        }
    }

    let agents: Vec<AgentSpec<S>> = archetypes
        .iter()
        .map(|&archetype| AgentSpec {
            archetype,
            res: S::from_config(config.res_for(archetype)),
            upd_prob: S::from_config(config.upd_prob),
            unf_prob: S::from_config(config.unf_prob),
            unf_thresh: S::from_config(config.unf_thresh),
            actions: ActionSet::default(),
        })
        .collect();

    let profile = {
        let mut rng = substream(seed, &[stream::OPINIONS]);
        OpinionProfile::random(config.nodes, config.k, &mut rng)
    };

    let mut masks = MaskStore::new(config.k);
    if config.mask_init == MaskInit::AllVisible {
        for (i, j) in graph.edges().collect::<Vec<_>>() {
            masks.reveal_all(i, j, profile.row(i));
            masks.reveal_all(j, i, profile.row(j));
        }
    }

    {
        let mut rng = substream(seed, &[stream::WEIGHTS]);
        for (i, j) in graph.edges().collect::<Vec<_>>() {
            let (w_ij, w_ji) = draw_weights::<S>(&config.weight_init, &mut rng);
            graph.set_weight(i, j, w_ij);
            graph.set_weight(j, i, w_ji);
        }
    }

    Ok(SimState {
        t: 0,
        graph,
        profile,
        masks,
        agents,
        master_seed: seed,
    })
}

fn draw_weights<S: Scalar>(init: &WeightInit, rng: &mut ChaCha8Rng) -> (S, S) {
    match init {
        WeightInit::Constant(c) => (S::from_config(*c), S::from_config(*c)),
        WeightInit::UniformRandom => (
            S::from_config(rng.gen::<f64>()),
            S::from_config(rng.gen::<f64>()),
        ),
    }
}

/// Phase 1: every agent decides one action per neighbor against the frozen
/// snapshot. Per-agent substreams make the result independent of agent
/// iteration order.
pub fn phase_choose<S: Scalar>(state: &SimState<S>, policy: &dyn Policy<S>) -> Vec<Vec<Action>> {
    let step_no = state.t as u64;
    (0..state.graph.node_count())
        .map(|i| {
            let mut rng = substream(state.master_seed, &[stream::CHOOSE, step_no, i as u64]);
            policy.decide(NodeId(i), state, &mut rng)
        })
        .collect()
}

fn assert_action_valid<S: Scalar>(state: &SimState<S>, actor: NodeId, action: &Action) {
    let n = state.graph.node_count();
    match *action {
        Action::Reveal { target, topic } => {
            assert!(
                actor.index() < n && target.index() < n,
                "reveal with unknown node"
            );
            assert!(actor != target, "reveal to self");
            assert!(topic < state.profile.topics(), "reveal of unknown topic");
        }
        Action::Unfriend { target } => {
            assert!(
                actor.index() < n && target.index() < n,
                "unfriend with unknown node"
            );
            assert!(actor != target, "unfriend of self");
        }
        Action::Nop => {}
    }
}

/// Phase 2: apply all unfriends first (idempotent, masks zeroed both ways),
/// then all reveals in ascending (actor, target, topic) order; reveals whose
/// edge disappeared are dropped silently. Returns the removed edges.
pub fn phase_execute<S: Scalar>(
    state: &mut SimState<S>,
    actions: &[Vec<Action>],
) -> Vec<(NodeId, NodeId)> {
    let mut unfriends: Vec<(NodeId, NodeId)> = Vec::new();
    let mut reveals: Vec<(NodeId, NodeId, usize)> = Vec::new();
    for (actor, list) in actions.iter().enumerate() {
        let actor = NodeId(actor);
        for action in list {
            assert_action_valid(state, actor, action);
            match *action {
                Action::Unfriend { target } => {
                    unfriends.push((actor.min(target), actor.max(target)));
                }
                Action::Reveal { target, topic } => reveals.push((actor, target, topic)),
                Action::Nop => {}
            }
        }
    }

    unfriends.sort_unstable();
    unfriends.dedup();
    let mut removed = Vec::new();
    for (i, j) in unfriends {
        if state.graph.remove_edge(i, j) {
            removed.push((i, j));
        }
        state.masks.clear_pair(i, j);
    }

    reveals.sort_unstable();
    for (actor, target, topic) in reveals {
        if state.graph.has_edge(actor, target) {
            state
                .masks
                .reveal(actor, target, topic, state.profile.get(actor, topic));
        }
    }
    removed
}

/// Phase 3: simultaneous opinion updates. Every aggregate is computed from
/// the post-execution snapshot before any flip is applied; afterwards,
/// already-revealed mask entries are rewritten to the flipped values.
pub fn phase_update<S: Scalar>(state: &mut SimState<S>) -> Vec<FlipRecord> {
    let step_no = state.t as u64;
    let mut flips = Vec::new();
    for i in 0..state.graph.node_count() {
        let node = NodeId(i);
        let spec = &state.agents[i];
        let aggregate = aggregate_opinion(node, &state.graph, &state.profile, &state.masks);
        let mut rng = substream(state.master_seed, &[stream::UPDATE, step_no, i as u64]);
        for (topic, &agg) in aggregate.iter().enumerate() {
            let own = state.profile.get(node, topic);
            let updated =
                update_opinion(spec.archetype, own, agg, spec.res, spec.upd_prob, &mut rng);
            if updated != own {
                flips.push(FlipRecord {
                    agent: node,
                    topic,
                    from: own,
                    to: updated,
                });
            }
        }
    }
    for flip in &flips {
        state.profile.set(flip.agent, flip.topic, flip.to);
        state.masks.sync_flip(flip.agent, flip.topic, flip.to);
    }
    flips
}

/// Phase 4: the network closes triads. New edges get freshly drawn weights
/// and start with nothing revealed in either direction.
pub fn phase_grow<S: Scalar>(state: &mut SimState<S>, config: &SimConfig) -> Vec<(NodeId, NodeId)> {
    let step_no = state.t as u64;
    let mut rng = substream(state.master_seed, &[stream::GROW, step_no]);
    let weight_init = config.weight_init;
    state.graph.grow(config.friend_prob, &mut rng, |r| {
        draw_weights::<S>(&weight_init, r)
    })
}

/// Advance one full step with the built-in policy.
pub fn step<S: Scalar>(state: &mut SimState<S>, config: &SimConfig) -> StepLog<S> {
    step_with_policy(state, config, &DefaultPolicy)
}

/// Advance one full step with a caller-supplied policy.
pub fn step_with_policy<S: Scalar>(
    state: &mut SimState<S>,
    config: &SimConfig,
    policy: &dyn Policy<S>,
) -> StepLog<S> {
    let actions = phase_choose(state, policy);
    let edges_removed = phase_execute(state, &actions);
    let flips = phase_update(state);
    let edges_added = phase_grow(state, config);
    state.t += 1;
    let rewards = (0..state.graph.node_count())
        .map(|i| {
            neighborhood_reward(
                NodeId(i),
                &state.graph,
                &state.profile,
                &state.masks,
                state.agents[i].archetype,
            )
        })
        .collect();
    StepLog {
        t: state.t,
        actions,
        flips,
        edges_added,
        edges_removed,
        rewards,
    }
}

/// Run a full simulation: init, then `steps` steps with metric collection
/// after every step (frame 0 covers the initial state).
pub fn run<S: Scalar>(config: &SimConfig) -> Result<SimResult<S>, ConfigError> {
    let mut state = init::<S>(config)?;
    let mut frames = Vec::with_capacity(config.steps + 1);
    let mut trajectory = Vec::with_capacity(config.steps + 1);
    let mut logs = Vec::with_capacity(config.steps);
    frames.push(MetricFrame::compute(&state));
    trajectory.push(state.profile.rows().to_vec());
    for _ in 0..config.steps {
        logs.push(step(&mut state, config));
        frames.push(MetricFrame::compute(&state));
        trajectory.push(state.profile.rows().to_vec());
    }
    Ok(SimResult {
        config: config.clone(),
        frames,
        trajectory,
        logs,
        final_state: state,
    })
}
