use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{negate_query, Clause, KnowledgeBase, Query};
use crate::minimal::{HittingSetSolver, SoftSolver};
use crate::sat::{entails_unchecked, is_consistent};

use super::MonolithicExplanation;

/// Minimum-cardinality subset of `kb` entailing `q`.
pub fn monolithic_explanation(kb: &KnowledgeBase, q: &Query) -> Result<MonolithicExplanation> {
    monolithic_explanation_with_deadline(kb, q, Deadline::none())
}

pub fn monolithic_explanation_with_deadline(
    kb: &KnowledgeBase,
    q: &Query,
    deadline: Deadline,
) -> Result<MonolithicExplanation> {
    if !is_consistent(kb) {
        return Err(Error::InconsistentKb);
    }
    if !entails_unchecked(kb.clauses(), kb.num_vars(), q) {
        return Err(Error::NotEntailed);
    }
    let clause_indices = smallest_entailing(kb.clauses(), kb.num_vars(), q, deadline)?;
    Ok(MonolithicExplanation { clause_indices, entails_query: true, metrics: None })
}

/// Hitting-set duality loop: the minimum hitting set of the correction sets
/// found so far is tried against `¬q`; if satisfiable, its grown correction
/// set joins the collection.
///
/// Assumes `clauses ⊨ q`. Returns positions into `clauses`.
pub(crate) fn smallest_entailing(clauses: &[Clause], num_vars: u32, q: &Query, deadline: Deadline) -> Result<Vec<usize>> {
    let neg = negate_query(q, num_vars);
    let mut solver = SoftSolver::new(clauses, &neg.clauses, neg.num_vars, deadline);
    let mut collection: Vec<Vec<usize>> = Vec::new();
    loop {
        deadline.check()?;
        let mut hs = HittingSetSolver::new(&collection)?;
        hs.set_deadline(deadline);
        let seed = hs.solve()?.expect("no forbidden sets");
        if !solver.solve(&seed)? {
            return Ok(seed);
        }
        collection.push(solver.grow_mcs(&seed)?);
    }
}

/// Minimal entailing subsets in order of increasing size, at most `budget`.
/// The flag reports whether every one was found.
pub(crate) fn enumerate_entailing(
    clauses: &[Clause],
    num_vars: u32,
    q: &Query,
    budget: usize,
    deadline: Deadline,
) -> Result<(Vec<Vec<usize>>, bool)> {
    let neg = negate_query(q, num_vars);
    let mut solver = SoftSolver::new(clauses, &neg.clauses, neg.num_vars, deadline);
    let mut collection: Vec<Vec<usize>> = Vec::new();
    let mut found: Vec<Vec<usize>> = Vec::new();
    while found.len() < budget {
        deadline.check()?;
        let mut hs = HittingSetSolver::new(&collection)?;
        hs.set_deadline(deadline);
        for m in &found {
            hs.forbid_superset_of(m);
        }
        let Some(seed) = hs.solve()? else {
            return Ok((found, true));
        };
        if solver.solve(&seed)? {
            collection.push(solver.grow_mcs(&seed)?);
        } else {
            // Minimum among hitting sets avoiding every known subset, so
            // it is itself minimal.
            found.push(seed);
        }
    }
    // Out of budget; check whether anything is left.
    let mut remaining = false;
    loop {
        let mut hs = HittingSetSolver::new(&collection)?;
        for m in &found {
            hs.forbid_superset_of(m);
        }
        let Some(seed) = hs.solve()? else { break };
        if !solver.solve(&seed)? {
            remaining = true;
            break;
        }
        collection.push(solver.grow_mcs(&seed)?);
    }
    Ok((found, !remaining))
}
