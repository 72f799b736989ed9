use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{max_var_of, BeliefBase, Clause, Query};
use crate::probability::{Distribution, Event};

/// Slack for the strict probability comparisons.
const TOL: f64 = 1e-12;

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

/// Probabilities behind the gain and power of a monolithic explanation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonoMetrics {
    pub prob_query: f64,
    pub prob_query_given: f64,
    pub prob_explanation: f64,
    pub gain: f64,
    pub power: f64,
    pub gamma: f64,
}

impl MonoMetrics {
    pub fn compute(dist: &Distribution, eps: &[Clause], q: &Query, gamma: f64) -> Result<MonoMetrics> {
        check_gamma(gamma)?;
        let qe = Event::all(q.clauses());
        let ee = Event::all(eps);
        let prob_query = dist.prob(&qe)?;
        let prob_explanation = dist.prob(&ee)?;
        let prob_query_given = dist.cond(&qe, &ee)?;
        let gain = (prob_query_given / prob_query).log2();
        Ok(MonoMetrics { prob_query, prob_query_given, prob_explanation, gain, power: gain + gamma * prob_explanation, gamma })
    }

    /// The explanation raises the probability of the query.
    pub fn raises_belief(&self) -> bool {
        self.prob_query_given > self.prob_query + TOL
    }
}

/// Probabilities behind the gain and power of a reconciling explanation,
/// all under the human distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconcileMetrics {
    pub prob_query: f64,
    pub prob_query_given_plus: f64,
    pub prob_plus: f64,
    /// Absent when nothing is retracted.
    pub prob_plus_given_not_minus: Option<f64>,
    pub prob_minus: Option<f64>,
    pub gain: f64,
    pub power: f64,
    pub gamma: f64,
}

impl ReconcileMetrics {
    pub fn compute(dist: &Distribution, plus: &[Clause], minus: &[Clause], q: &Query, gamma: f64) -> Result<ReconcileMetrics> {
        check_gamma(gamma)?;
        let qe = Event::all(q.clauses());
        let pe = Event::all(plus);
        let prob_query = dist.prob(&qe)?;
        let prob_plus = dist.prob(&pe)?;
        let prob_query_given_plus = dist.cond(&qe, &pe)?;
        let mut gain = (prob_query_given_plus / prob_query).log2();
        let (prob_plus_given_not_minus, prob_minus) = if minus.is_empty() {
            (None, None)
        } else {
            let c = dist.cond(&pe, &Event::not_all(minus))?;
            gain += (c / prob_plus).log2();
            (Some(c), Some(dist.prob(&Event::all(minus))?))
        };
        let power = gain + gamma * (prob_plus + prob_minus.unwrap_or(0.0));
        Ok(ReconcileMetrics {
            prob_query,
            prob_query_given_plus,
            prob_plus,
            prob_plus_given_not_minus,
            prob_minus,
            gain,
            power,
            gamma,
        })
    }

    /// Both strict inequalities of the probabilistic reconciliation
    /// condition; the second is vacuous when nothing is retracted.
    pub fn conditions(&self) -> (bool, bool) {
        let first = self.prob_query_given_plus > self.prob_query + TOL;
        let second = self.prob_plus_given_not_minus.is_none_or(|c| c > self.prob_plus + TOL);
        (first, second)
    }
}

fn dist_for(base: &BeliefBase, clause_sets: &[&[Clause]], q: &Query) -> Result<Distribution> {
    let n = clause_sets.iter().map(|cs| max_var_of(*cs)).fold(q.max_var(), u32::max);
    Distribution::with_vars(base, n)
}

/// `log2(P(q | eps) / P(q))`.
pub fn gain_mono(base: &BeliefBase, eps: &[Clause], q: &Query) -> Result<f64> {
    Ok(MonoMetrics::compute(&dist_for(base, &[eps], q)?, eps, q, 0.0)?.gain)
}

/// Gain plus `gamma · P(eps)`.
pub fn power_mono(base: &BeliefBase, eps: &[Clause], q: &Query, gamma: f64) -> Result<f64> {
    Ok(MonoMetrics::compute(&dist_for(base, &[eps], q)?, eps, q, gamma)?.power)
}

/// `log2(P(q | ε⁺) / P(q)) + log2(P(ε⁺ | ¬ε⁻) / P(ε⁺))`, the second term
/// dropped when `eps_minus` is empty.
pub fn gain_mrp(base_human: &BeliefBase, eps_plus: &[Clause], eps_minus: &[Clause], q: &Query) -> Result<f64> {
    let d = dist_for(base_human, &[eps_plus, eps_minus], q)?;
    Ok(ReconcileMetrics::compute(&d, eps_plus, eps_minus, q, 0.0)?.gain)
}

/// Reconciling gain plus `gamma · (P(ε⁺) + P(ε⁻))`.
pub fn power_mrp(base_human: &BeliefBase, eps_plus: &[Clause], eps_minus: &[Clause], q: &Query, gamma: f64) -> Result<f64> {
    let d = dist_for(base_human, &[eps_plus, eps_minus], q)?;
    Ok(ReconcileMetrics::compute(&d, eps_plus, eps_minus, q, gamma)?.power)
}
