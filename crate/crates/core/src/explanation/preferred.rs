use serde::Serialize;

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{classical_projection, BeliefBase, Clause, Query};
use crate::probability::Distribution;
use crate::sat::{entails_unchecked, is_consistent};

use super::metrics::{check_gamma, MonoMetrics};
use super::monolithic::enumerate_entailing;
use super::MonolithicExplanation;

pub const DEFAULT_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreferredExplanation {
    pub explanation: MonolithicExplanation,
    /// Number of minimal explanations scored.
    pub candidates: usize,
    /// Every minimal explanation was scored, so the choice is a true argmax.
    pub exhaustive: bool,
}

/// Highest-power minimal explanation among the first `budget` found,
/// breaking ties by size and then by index order.
pub fn most_preferred(base: &BeliefBase, q: &Query, budget: usize, gamma: f64) -> Result<PreferredExplanation> {
    most_preferred_with_deadline(base, q, budget, gamma, Deadline::none())
}

pub fn most_preferred_with_deadline(
    base: &BeliefBase,
    q: &Query,
    budget: usize,
    gamma: f64,
    deadline: Deadline,
) -> Result<PreferredExplanation> {
    check_gamma(gamma)?;
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    let n = base.num_vars().max(q.max_var());
    let kb = classical_projection(base).with_num_vars(n);
    if !is_consistent(&kb) {
        return Err(Error::InconsistentKb);
    }
    if !entails_unchecked(kb.clauses(), n, q) {
        return Err(Error::NotEntailed);
    }
    let dist = Distribution::with_vars(base, n)?;
    let (found, exhaustive) = enumerate_entailing(kb.clauses(), n, q, budget, deadline)?;
    let mut best: Option<(Vec<usize>, MonoMetrics)> = None;
    for cand in &found {
        let eps: Vec<Clause> = cand.iter().map(|&i| kb.clauses()[i].clone()).collect();
        let m = MonoMetrics::compute(&dist, &eps, q, gamma)?;
        let better = match &best {
            None => true,
            Some((b, bm)) => {
                m.power > bm.power || (m.power == bm.power && (cand.len(), cand) < (b.len(), b))
            }
        };
        if better {
            best = Some((cand.clone(), m));
        }
    }
    let (clause_indices, metrics) = best.expect("an entailing base has a minimal explanation");
    Ok(PreferredExplanation {
        explanation: MonolithicExplanation { clause_indices, entails_query: true, metrics: Some(metrics) },
        candidates: found.len(),
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;

    #[test]
    fn power_fixture() {
        let base = BeliefBase::from_soft(3, &[(&[1], 1.5), (&[2], 3.0), (&[-1, 3], 1.0), (&[-2, 3], 1.0)]).unwrap();
        let p = most_preferred(&base, &Query::literal(Var::new(3).pos()), DEFAULT_BUDGET, 0.5).unwrap();
        assert_eq!(p.explanation.clause_indices, vec![1, 3]);
        assert_eq!(p.candidates, 2);
        assert!(p.exhaustive);
    }

    #[test]
    fn k_bounded_base() {
        let base = BeliefBase::from_soft(3, &[(&[1], 1.0), (&[-1, 2], 3.0), (&[3], 2.0), (&[-3, 2], 1.0)]).unwrap();
        let p = most_preferred(&base, &Query::literal(Var::new(2).pos()), DEFAULT_BUDGET, 0.5).unwrap();
        assert_eq!(p.explanation.clause_indices, vec![2, 3]);
    }
}
