use std::collections::HashSet;

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{classical_projection, max_var_of, negate_query, BeliefBase, Clause, KnowledgeBase, Query, WeightedClause};
use crate::probability::{intersections, top_k_scored, Distribution, ScoredWorld};
use crate::sat::{entails_unchecked, is_consistent, is_sat};

use super::metrics::{check_gamma, MonoMetrics, ReconcileMetrics};
use super::monolithic::smallest_entailing;
use super::reconcile::reconcile;
use super::{KBound, MonolithicExplanation, ReconcilingExplanation};

/// Smallest explanation contained in the clauses shared by the most
/// probable `q`-worlds, for the largest workable number of worlds `≤ k_hat`.
pub fn prob_monolithic(base: &BeliefBase, q: &Query, k_hat: usize, gamma: f64) -> Result<(MonolithicExplanation, KBound)> {
    prob_monolithic_with_deadline(base, q, k_hat, gamma, Deadline::none())
}

pub fn prob_monolithic_with_deadline(
    base: &BeliefBase,
    q: &Query,
    k_hat: usize,
    gamma: f64,
    deadline: Deadline,
) -> Result<(MonolithicExplanation, KBound)> {
    check_gamma(gamma)?;
    if k_hat == 0 {
        return Err(Error::InvalidK);
    }
    let n = base.num_vars().max(q.max_var());
    let kb = classical_projection(base).with_num_vars(n);
    if !is_consistent(&kb) {
        return Err(Error::InconsistentKb);
    }
    if !entails_unchecked(kb.clauses(), n, q) {
        return Err(Error::NotEntailed);
    }
    let worlds = top_k_scored(base, Some(q), n, k_hat, deadline)?;
    let (k, subset) = largest_entailing_prefix(&kb, &[], &worlds, n, q, deadline)?;
    let sub: Vec<Clause> = subset.iter().map(|&i| kb.clauses()[i].clone()).collect();
    let local = smallest_entailing(&sub, n, q, deadline)?;
    let clause_indices: Vec<usize> = local.iter().map(|&j| subset[j]).collect();

    let dist = Distribution::with_vars(base, n).ok();
    let eps: Vec<Clause> = clause_indices.iter().map(|&i| kb.clauses()[i].clone()).collect();
    let metrics = dist.as_ref().and_then(|d| MonoMetrics::compute(d, &eps, q, gamma).ok());
    let bound = KBound {
        k_requested: k_hat,
        k_achieved: k,
        lower_bound: dist.as_ref().map(|d| prefix_mass(d, &worlds, k)),
    };
    Ok((MonolithicExplanation { clause_indices, entails_query: true, metrics }, bound))
}

/// Reconciling explanation whose additions come from the agent clauses shared
/// by the most probable `q`-worlds of the human base extended with the
/// agent's clauses.
pub fn prob_model_reconciling(
    kb_agent: &KnowledgeBase,
    base_human: &BeliefBase,
    q: &Query,
    k_hat: usize,
    gamma: f64,
) -> Result<(ReconcilingExplanation, KBound)> {
    prob_model_reconciling_with_deadline(kb_agent, base_human, q, k_hat, gamma, Deadline::none())
}

pub fn prob_model_reconciling_with_deadline(
    kb_agent: &KnowledgeBase,
    base_human: &BeliefBase,
    q: &Query,
    k_hat: usize,
    gamma: f64,
    deadline: Deadline,
) -> Result<(ReconcilingExplanation, KBound)> {
    check_gamma(gamma)?;
    if k_hat == 0 {
        return Err(Error::InvalidK);
    }
    let n = kb_agent.num_vars().max(base_human.num_vars()).max(q.max_var());
    let agent = kb_agent.clone().with_num_vars(n);
    if !is_consistent(&agent) {
        return Err(Error::InconsistentKb);
    }
    if !entails_unchecked(agent.clauses(), n, q) {
        return Err(Error::NotEntailed);
    }
    let hard: Vec<Clause> = base_human.hard_clauses().cloned().collect();
    if !is_sat(&hard, n, &[]).is_sat() {
        return Err(Error::UnsatisfiableHard);
    }
    let human = classical_projection(base_human).with_num_vars(n);
    let human_set: HashSet<&Clause> = human.clauses().iter().collect();
    let shared: Vec<usize> = (0..agent.len()).filter(|&i| human_set.contains(&agent.clauses()[i])).collect();

    // One agent clause outweighs the whole human base.
    let w = base_human.soft_weight_sum().max(1.0);
    let mut combined = base_human.clone().with_num_vars(n);
    for (i, c) in agent.clauses().iter().enumerate() {
        if !shared.contains(&i) {
            combined.push(WeightedClause::soft(c.clone(), w)?);
        }
    }
    let worlds = top_k_scored(&combined, Some(q), n, k_hat, deadline)?;
    let (k, subset) = largest_entailing_prefix(&agent, &shared, &worlds, n, q, deadline)?;

    let sub: Vec<Clause> = subset.iter().map(|&i| agent.clauses()[i].clone()).collect();
    let r = reconcile(&sub, human.clauses(), n, q, deadline)?;
    let epsilon_plus: Vec<usize> = r.plus.iter().map(|&j| subset[j]).collect();

    let plus: Vec<Clause> = epsilon_plus.iter().map(|&i| agent.clauses()[i].clone()).collect();
    let minus: Vec<Clause> = r.minus.iter().map(|&j| human.clauses()[j].clone()).collect();
    let metrics = Distribution::with_vars(base_human, n)
        .ok()
        .and_then(|d| ReconcileMetrics::compute(&d, &plus, &minus, q, gamma).ok());
    let lower_bound = Distribution::with_vars(&combined, n).ok().map(|d| prefix_mass(&d, &worlds, k));
    let bound = KBound { k_requested: k_hat, k_achieved: k, lower_bound };
    Ok((
        ReconcilingExplanation { epsilon_plus, epsilon_minus: r.minus, retracted: r.retracted, metrics },
        bound,
    ))
}

/// Walks `k` down from the number of worlds until the clauses of `kb`
/// satisfied by the first `k` worlds, together with `extra`, entail `q`.
/// Returns `k` and the sorted clause indices; `k = 0` means all of `kb`.
fn largest_entailing_prefix(
    kb: &KnowledgeBase,
    extra: &[usize],
    worlds: &[ScoredWorld],
    n: u32,
    q: &Query,
    deadline: Deadline,
) -> Result<(usize, Vec<usize>)> {
    let neg = negate_query(q, n.max(max_var_of(kb.clauses())));
    for k in (1..=worlds.len()).rev() {
        deadline.check()?;
        let mut idx = intersections(kb, worlds, k)?;
        idx.extend_from_slice(extra);
        idx.sort_unstable();
        idx.dedup();
        let mut clauses: Vec<Clause> = idx.iter().map(|&i| kb.clauses()[i].clone()).collect();
        clauses.extend(neg.clauses.iter().cloned());
        if !is_sat(&clauses, neg.num_vars, &[]).is_sat() {
            return Ok((k, idx));
        }
    }
    Ok((0, (0..kb.len()).collect()))
}

fn prefix_mass(d: &Distribution, worlds: &[ScoredWorld], k: usize) -> f64 {
    worlds[..k].iter().map(|w| d.world_prob(&w.world)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explanation::monolithic_explanation;
    use crate::formula::Var;

    fn cex() -> BeliefBase {
        BeliefBase::from_soft(3, &[(&[1], 1.0), (&[-1, 2], 3.0), (&[3], 2.0), (&[-3, 2], 1.0)]).unwrap()
    }

    #[test]
    fn k_bounded_fixture() {
        let b = Query::literal(Var::new(2).pos());
        let (e, k) = prob_monolithic(&cex(), &b, 4, 0.5).unwrap();
        assert_eq!(k.k_achieved, 2);
        assert_eq!(e.clause_indices, vec![2, 3]);
        let m = e.metrics.unwrap();
        assert!((m.prob_explanation - 0.7759).abs() < 1e-3, "{m:?}");
        assert!((m.power - 0.571).abs() < 1e-2, "{m:?}");
        assert!(m.prob_explanation >= k.lower_bound.unwrap() - 1e-9);
    }

    #[test]
    fn single_world_matches_classical() {
        let b = Query::literal(Var::new(2).pos());
        let (e, k) = prob_monolithic(&cex(), &b, 1, 0.5).unwrap();
        assert_eq!(k.k_achieved, 1);
        let c = monolithic_explanation(&classical_projection(&cex()), &b).unwrap();
        assert_eq!(e.clause_indices, c.clause_indices);
    }

    #[test]
    fn reconciliation_fixture() {
        let agent = KnowledgeBase::from_dimacs(3, &[&[1], &[-1, 2], &[3]]).unwrap();
        let human = BeliefBase::from_soft(3, &[(&[3], 2.0), (&[-3, -1], 2.0)]).unwrap();
        let (e, _) = prob_model_reconciling(&agent, &human, &Query::literal(Var::new(2).pos()), 4, 0.5).unwrap();
        assert_eq!(e.epsilon_plus, vec![0, 1]);
        assert_eq!(e.epsilon_minus, vec![1]);
        let m = e.metrics.unwrap();
        assert!((m.prob_query - 0.5).abs() < 1e-9);
        assert!((m.prob_plus - 0.0963).abs() < 1e-3, "{m:?}");
        assert!((m.prob_plus_given_not_minus.unwrap() - 0.5).abs() < 1e-9);
        assert!((m.prob_minus.unwrap() - 0.9037).abs() < 1e-3);
        assert!((m.gain - 3.377).abs() < 1e-2 && (m.power - 3.877).abs() < 1e-2, "{m:?}");
        assert_eq!(m.conditions(), (true, true));
    }

    #[test]
    fn nothing_to_reconcile() {
        let agent = KnowledgeBase::from_dimacs(2, &[&[1], &[-1, 2]]).unwrap();
        let human = BeliefBase::from_soft(2, &[(&[2], 1.0)]).unwrap();
        let (e, _) = prob_model_reconciling(&agent, &human, &Query::literal(Var::new(2).pos()), 3, 0.5).unwrap();
        assert!(e.epsilon_plus.is_empty() && e.epsilon_minus.is_empty());
    }
}
