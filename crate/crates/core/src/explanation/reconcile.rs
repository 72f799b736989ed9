use std::collections::HashSet;

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{max_var_of, negate_query, Clause, KnowledgeBase, Query};
use crate::minimal::{HittingSetSolver, SoftSolver};
use crate::sat::{entails_unchecked, is_consistent, solver_for, SatOracle};

use super::ReconcilingExplanation;

/// Additions `ε⁺ ⊆ kb_agent` and retractions `ε⁻ ⊆ kb_human` after which the
/// human base entails `q`.
pub fn model_reconciling_explanation(
    kb_agent: &KnowledgeBase,
    kb_human: &KnowledgeBase,
    q: &Query,
) -> Result<ReconcilingExplanation> {
    model_reconciling_with_deadline(kb_agent, kb_human, q, Deadline::none())
}

pub fn model_reconciling_with_deadline(
    kb_agent: &KnowledgeBase,
    kb_human: &KnowledgeBase,
    q: &Query,
    deadline: Deadline,
) -> Result<ReconcilingExplanation> {
    let n = kb_agent.num_vars().max(kb_human.num_vars()).max(q.max_var());
    if !is_consistent(&kb_agent.clone().with_num_vars(n)) {
        return Err(Error::InconsistentKb);
    }
    if !entails_unchecked(kb_agent.clauses(), n, q) {
        return Err(Error::NotEntailed);
    }
    let r = reconcile(kb_agent.clauses(), kb_human.clauses(), n, q, deadline)?;
    Ok(ReconcilingExplanation {
        epsilon_plus: r.plus,
        epsilon_minus: r.minus,
        retracted: r.retracted,
        metrics: None,
    })
}

pub(crate) struct Reconciled {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub retracted: Vec<usize>,
}

/// The reconciliation loop over raw clause lists; indices point into
/// `agent` and `human`. Assumes `agent` is consistent and entails `q`.
pub(crate) fn reconcile(agent: &[Clause], human: &[Clause], n: u32, q: &Query, deadline: Deadline) -> Result<Reconciled> {
    let n = n.max(max_var_of(agent.iter().chain(human)));
    let human_set: HashSet<&Clause> = human.iter().collect();
    let agent_set: HashSet<&Clause> = agent.iter().collect();

    // Agent clauses the human already holds are fixed; the rest may be offered.
    let (shared, offered): (Vec<usize>, Vec<usize>) = (0..agent.len()).partition(|&i| human_set.contains(&agent[i]));
    let human_only: Vec<usize> = (0..human.len()).filter(|&j| !agent_set.contains(&human[j])).collect();

    // Restore consistency of the human base with the agent's, retracting a
    // correction set of human-only clauses against the whole agent base.
    let mut retracted = Vec::new();
    {
        let mut s = solver_for(agent, n);
        for c in human {
            s.add(c);
        }
        if !s.solve(&[])? {
            let soft: Vec<Clause> = human_only.iter().map(|&j| human[j].clone()).collect();
            let mut ss = SoftSolver::new(&soft, agent, n, deadline);
            retracted = ss.grow_mcs(&[])?.into_iter().map(|k| human_only[k]).collect();
        }
    }
    let kept_human: Vec<Clause> =
        (0..human.len()).filter(|j| !retracted.contains(j)).map(|j| human[j].clone()).collect();

    let neg = negate_query(q, n);
    let offered_clauses: Vec<Clause> = offered.iter().map(|&i| agent[i].clone()).collect();
    let mut check_hard = kept_human.clone();
    check_hard.extend(neg.clauses.iter().cloned());
    let mut checker = SoftSolver::new(&offered_clauses, &check_hard, neg.num_vars, deadline);
    let mut mcs_hard: Vec<Clause> = shared.iter().map(|&i| agent[i].clone()).collect();
    mcs_hard.extend(neg.clauses.iter().cloned());
    let mut grower = SoftSolver::new(&offered_clauses, &mcs_hard, neg.num_vars, deadline);

    let mut collection: Vec<Vec<usize>> = Vec::new();
    let seed = loop {
        deadline.check()?;
        let mut hs = HittingSetSolver::new(&collection)?;
        hs.set_deadline(deadline);
        let seed = hs.solve()?.expect("no forbidden sets");
        if !checker.solve(&seed)? {
            break seed;
        }
        collection.push(grower.grow_mcs(&seed)?);
    };
    let plus: Vec<usize> = seed.iter().map(|&k| offered[k]).collect();

    // Put back what was retracted unless it conflicts with the additions.
    let mut minus = Vec::new();
    if !retracted.is_empty() {
        let mut hard = kept_human;
        hard.extend(plus.iter().map(|&i| agent[i].clone()));
        let soft: Vec<Clause> = retracted.iter().map(|&j| human[j].clone()).collect();
        let mut ss = SoftSolver::new(&soft, &hard, n, deadline);
        let all: Vec<usize> = (0..soft.len()).collect();
        if !ss.solve(&all)? {
            minus = ss.grow_mcs(&[])?.into_iter().map(|k| retracted[k]).collect();
        }
    }
    Ok(Reconciled { plus, minus, retracted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;

    #[test]
    fn alg2_table() {
        let agent = KnowledgeBase::from_dimacs(4, &[&[1, 2], &[-2, 3], &[-3], &[-2, 4], &[-4]]).unwrap();
        let human = KnowledgeBase::from_dimacs(4, &[&[2], &[-3]]).unwrap();
        let e = model_reconciling_explanation(&agent, &human, &Query::literal(Var::new(1).pos())).unwrap();
        assert_eq!(e.epsilon_plus, vec![0, 1]);
        assert_eq!(e.epsilon_minus, vec![0]);
        assert_eq!(e.retracted, vec![0]);
    }

    #[test]
    fn example_two() {
        let agent = KnowledgeBase::from_dimacs(3, &[&[1], &[-1, 2], &[3]]).unwrap();
        let human = KnowledgeBase::from_dimacs(2, &[&[-1], &[-1, 2]]).unwrap();
        let e = model_reconciling_explanation(&agent, &human, &Query::literal(Var::new(2).pos())).unwrap();
        assert_eq!(e.epsilon_plus, vec![0]);
        assert_eq!(e.epsilon_minus, vec![0]);
    }

    #[test]
    fn already_entailed() {
        let agent = KnowledgeBase::from_dimacs(2, &[&[1], &[-1, 2]]).unwrap();
        let human = KnowledgeBase::from_dimacs(2, &[&[2]]).unwrap();
        let e = model_reconciling_explanation(&agent, &human, &Query::literal(Var::new(2).pos())).unwrap();
        assert!(e.epsilon_plus.is_empty() && e.epsilon_minus.is_empty());
    }
}
