//! Deterministic, seedable simulation engine for coevolving social networks.
//!
//! Agents of three archetypes (homophilic, heterophilic, adversarial) hold
//! multidimensional binary opinions, selectively reveal them to neighbors,
//! unfriend connections they find unrewarding, and update opinions by
//! influence-weighted neighborhood aggregation while the network itself
//! closes triads. A step has four phases — choose, execute, update, grow —
//! with synchronous (snapshot) semantics throughout.
//!
//! The numeric core is generic over the floating-point scalar (see
//! [`scalar::Scalar`]); opinions themselves stay exact. The aliases below
//! pin the common instantiations.

pub mod engine;
pub mod export;
pub mod graph;
pub mod metrics;
pub mod opinion;
pub mod policy;
pub mod rng;
pub mod scalar;

pub use engine::{
    init, run, step, step_with_policy, ConfigError, MaskInit, ResOverrides, SimConfig, SimResult,
    SimState, StepLog, WeightInit,
};
pub use graph::{generate, GenKind, GenSpec, GraphError, NodeId, SocialGraph};
pub use metrics::{MetricFrame, OutcomeFlags};
pub use opinion::{AgentSpec, Archetype, MaskStore, OpinionProfile, PairDistance};
pub use policy::{Action, DefaultPolicy, Policy};
pub use scalar::Scalar;

/// Double-precision instantiations (the default throughout the CLI).
pub type SocialGraph64 = graph::SocialGraph<f64>;
pub type SimState64 = engine::SimState<f64>;
pub type SimResult64 = engine::SimResult<f64>;
pub type StepLog64 = engine::StepLog<f64>;
pub type MetricFrame64 = metrics::MetricFrame<f64>;
pub type AgentSpec64 = opinion::AgentSpec<f64>;

/// Single-precision instantiations.
pub type SocialGraph32 = graph::SocialGraph<f32>;
pub type SimState32 = engine::SimState<f32>;
pub type SimResult32 = engine::SimResult<f32>;
pub type StepLog32 = engine::StepLog<f32>;
pub type MetricFrame32 = metrics::MetricFrame<f32>;
pub type AgentSpec32 = opinion::AgentSpec<f32>;
