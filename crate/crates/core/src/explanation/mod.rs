//! Monolithic and model-reconciling explanations, classical and
//! probabilistic, with their gain and power.

mod metrics;
mod monolithic;
mod preferred;
mod probabilistic;
mod reconcile;

use serde::Serialize;

pub use metrics::{gain_mono, gain_mrp, power_mono, power_mrp, MonoMetrics, ReconcileMetrics};
pub use monolithic::{monolithic_explanation, monolithic_explanation_with_deadline};
pub use preferred::{most_preferred, most_preferred_with_deadline, PreferredExplanation, DEFAULT_BUDGET};
pub use probabilistic::{
    prob_model_reconciling, prob_model_reconciling_with_deadline, prob_monolithic, prob_monolithic_with_deadline,
};
pub use reconcile::{model_reconciling_explanation, model_reconciling_with_deadline};

pub const DEFAULT_GAMMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonolithicExplanation {
    /// Sorted indices into the source knowledge base.
    pub clause_indices: Vec<usize>,
    pub entails_query: bool,
    /// `None` for classical runs, or when the distribution is out of reach.
    pub metrics: Option<MonoMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconcilingExplanation {
    /// Indices into the agent base.
    pub epsilon_plus: Vec<usize>,
    /// Indices into the human base.
    pub epsilon_minus: Vec<usize>,
    /// Human clauses dropped to restore consistency; a superset of
    /// `epsilon_minus`.
    pub retracted: Vec<usize>,
    pub metrics: Option<ReconcileMetrics>,
}

/// How many top worlds the explanation was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KBound {
    pub k_requested: usize,
    /// 0 when no intersection sufficed and the whole base was used.
    pub k_achieved: usize,
    /// Total probability of the first `k_achieved` worlds.
    pub lower_bound: Option<f64>,
}
