//! Action model and agent policies.
//!
//! Each step an agent picks exactly one action per neighbor: unfriend,
//! reveal a hidden opinion, or do nothing. The built-in policy follows the
//! same template for every archetype, differing only through the archetype's
//! reward function. Policies are pluggable so a learned controller can be
//! swapped in.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::SimState;
use crate::graph::NodeId;
use crate::opinion::{distance, pair_reward};
use crate::scalar::Scalar;

/// One agent action. The actor is implicit (the agent whose decision list
/// the action sits in).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Reveal { target: NodeId, topic: usize },
    Unfriend { target: NodeId },
    Nop,
}

/// Decides an agent's actions against the frozen end-of-previous-step
/// snapshot. Must emit exactly one action per current neighbor.
pub trait Policy<S: Scalar> {
    fn decide(&self, agent: NodeId, state: &SimState<S>, rng: &mut ChaCha8Rng) -> Vec<Action>;
}

/// The built-in policy template, applied with the agent's own reward
/// function. Per neighbor, in ascending id order:
///
/// 1. if the neighbor has revealed something and the pairwise reward falls
///    below `unf_thresh`, unfriend with probability `unf_prob`;
/// 2. otherwise, if some own topic is still hidden from the neighbor, reveal
///    one (chosen uniformly) with probability 0.5;
/// 3. otherwise do nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultPolicy;

impl<S: Scalar> Policy<S> for DefaultPolicy {
    fn decide(&self, agent: NodeId, state: &SimState<S>, rng: &mut ChaCha8Rng) -> Vec<Action> {
        let spec = &state.agents[agent.index()];
        let mut actions = Vec::new();
        for &j in state.graph.neighbors_unchecked(agent) {
            let mut chosen = Action::Nop;
            let mut fell_through = true;
            if spec.actions.unfriend {
                if let Some(d) = distance::<S>(agent, j, &state.profile, &state.masks).value {
                    if pair_reward(spec.archetype, d) < spec.unf_thresh
                        && rng.gen_bool(spec.unf_prob.as_f64())
                    {
                        chosen = Action::Unfriend { target: j };
                        fell_through = false;
                    }
                }
            }
            if fell_through && spec.actions.reveal {
                let hidden = state.masks.hidden_topics(agent, j);
                if !hidden.is_empty() && rng.gen_bool(0.5) {
                    let topic = hidden[rng.gen_range(0..hidden.len())];
                    chosen = Action::Reveal { target: j, topic };
                }
            }
            actions.push(chosen);
        }
        actions
    }
}
