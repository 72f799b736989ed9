//! Satisfiability, entailment and backbones.

mod cdcl;

pub use cdcl::{Branching, Cdcl};

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{negate_query, Clause, KnowledgeBase, Lit, Query, World};

/// The incremental interface every consumer of the engine relies on.
pub trait SatOracle {
    /// Makes variables `1..=n` known to the solver.
    fn reserve_vars(&mut self, n: u32);
    fn num_vars(&self) -> u32;
    fn add_clause(&mut self, lits: &[Lit]);
    fn set_deadline(&mut self, deadline: Deadline);
    /// `Err(Error::Timeout)` once the deadline has passed.
    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool>;
    /// Values of all variables from the last satisfiable call.
    fn model(&self) -> &[bool];

    fn add(&mut self, clause: &Clause) {
        self.add_clause(clause.lits());
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub model: Option<World>,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.model.is_some()
    }
}

/// Decides `clauses ∧ assumptions` over variables `1..=num_vars` (widened to
/// cover every literal).
///
/// The reported model is canonical: after solving, variables are scanned from
/// the highest id down and any true variable that can be made false without
/// breaking a clause or an assumption is flipped. Later decisions that turned
/// out to be unnecessary thus read as false.
pub fn is_sat(clauses: &[Clause], num_vars: u32, assumptions: &[Lit]) -> SatResult {
    let n = clauses
        .iter()
        .map(Clause::max_var)
        .chain(assumptions.iter().map(|l| l.var().id()))
        .fold(num_vars, u32::max);
    let mut s = Cdcl::with_vars(n);
    for c in clauses {
        s.add(c);
    }
    let sat = s.solve(assumptions).expect("no deadline set");
    if !sat {
        return SatResult { model: None };
    }
    let mut model = s.model().to_vec();
    lower_model(clauses, assumptions, &mut model);
    SatResult { model: Some(World::new(model)) }
}

fn lower_model(clauses: &[Clause], assumptions: &[Lit], model: &mut [bool]) {
    let n = model.len();
    let mut pinned = vec![false; n];
    for l in assumptions {
        if l.is_positive() {
            pinned[l.var().index()] = true;
        }
    }
    let mut pos_occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut neg_occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut true_count: Vec<u32> = Vec::with_capacity(clauses.len());
    for (i, c) in clauses.iter().enumerate() {
        let mut t = 0;
        for l in c.lits() {
            let v = l.var().index();
            if l.is_positive() {
                pos_occ[v].push(i);
            } else {
                neg_occ[v].push(i);
            }
            if model[v] == l.is_positive() {
                t += 1;
            }
        }
        true_count.push(t);
    }
    for v in (0..n).rev() {
        if !model[v] || pinned[v] || pos_occ[v].iter().any(|&i| true_count[i] < 2) {
            continue;
        }
        model[v] = false;
        for &i in &pos_occ[v] {
            true_count[i] -= 1;
        }
        for &i in &neg_occ[v] {
            true_count[i] += 1;
        }
    }
}

pub(crate) fn solver_for(clauses: &[Clause], num_vars: u32) -> Cdcl {
    let mut s = Cdcl::with_vars(num_vars);
    for c in clauses {
        s.add(c);
    }
    s
}

pub fn is_consistent(kb: &KnowledgeBase) -> bool {
    solver_for(kb.clauses(), kb.num_vars()).solve(&[]).expect("no deadline set")
}

/// `kb ⊨ q`, refusing inconsistent bases.
pub fn entails(kb: &KnowledgeBase, q: &Query) -> Result<bool> {
    if !is_consistent(kb) {
        return Err(Error::InconsistentKb);
    }
    Ok(entails_unchecked(kb.clauses(), kb.num_vars(), q))
}

/// `clauses ⊨ q` without a consistency check.
pub(crate) fn entails_unchecked(clauses: &[Clause], num_vars: u32, q: &Query) -> bool {
    let neg = negate_query(q, num_vars);
    let mut s = solver_for(clauses, neg.num_vars);
    for c in &neg.clauses {
        s.add(c);
    }
    !s.solve(&[]).expect("no deadline set")
}

/// Literals true in every model of `kb`, in ascending variable order.
pub fn backbone(kb: &KnowledgeBase) -> Result<Vec<Lit>> {
    let n = kb.num_vars();
    let mut s = solver_for(kb.clauses(), n);
    if !s.solve(&[])? {
        return Err(Error::InconsistentKb);
    }
    let mut candidate: Vec<Option<bool>> = s.model()[..n as usize].iter().map(|&b| Some(b)).collect();
    let mut out = Vec::new();
    for v in 1..=n {
        let Some(val) = candidate[v as usize - 1] else { continue };
        let lit = crate::formula::Var::new(v).lit(val);
        if s.solve(&[!lit])? {
            let m = s.model();
            for (c, &b) in candidate.iter_mut().zip(m) {
                if *c != Some(b) {
                    *c = None;
                }
            }
        } else {
            out.push(lit);
            s.add_clause(&[lit]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;

    fn cl(c: &[i32]) -> Clause {
        Clause::from_dimacs(c).unwrap()
    }

    #[test]
    fn alg1_table_unsat() {
        let cs = [cl(&[1, 2]), cl(&[-2, 3]), cl(&[-3]), cl(&[-1])];
        assert!(!is_sat(&cs, 4, &[]).is_sat());
    }

    #[test]
    fn assumption_conflict() {
        let a = Var::new(1);
        assert!(!is_sat(&[Clause::unit(a.pos())], 1, &[a.neg()]).is_sat());
    }

    #[test]
    fn canonical_model() {
        let r = is_sat(&[cl(&[1, 2])], 2, &[]);
        assert_eq!(r.model.unwrap().values(), &[true, false]);
    }

    #[test]
    fn example_one_entailment() {
        // p, ¬p ∨ q, ¬p ∨ r over p=1, q=2, r=3
        let kb = KnowledgeBase::from_dimacs(3, &[&[1], &[-1, 2], &[-1, 3]]).unwrap();
        assert!(entails(&kb, &Query::literal(Var::new(2).pos())).unwrap());
        let kb = KnowledgeBase::from_dimacs(2, &[&[1, 2]]).unwrap();
        assert!(!entails(&kb, &Query::literal(Var::new(1).pos())).unwrap());
        let bad = KnowledgeBase::from_dimacs(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(entails(&bad, &Query::literal(Var::new(1).pos())), Err(Error::InconsistentKb));
    }

    #[test]
    fn small_backbones() {
        let kb = KnowledgeBase::from_dimacs(2, &[&[1], &[-1, 2]]).unwrap();
        assert_eq!(backbone(&kb).unwrap(), vec![Var::new(1).pos(), Var::new(2).pos()]);
        let kb = KnowledgeBase::from_dimacs(2, &[&[1, 2]]).unwrap();
        assert!(backbone(&kb).unwrap().is_empty());
    }

    #[test]
    fn incremental_use() {
        let mut s = Cdcl::with_vars(3);
        s.add(&cl(&[1, 2, 3]));
        assert!(s.solve(&[Var::new(1).neg(), Var::new(2).neg()]).unwrap());
        assert!(s.model()[2]);
        s.add(&cl(&[-3]));
        assert!(!s.solve(&[Var::new(1).neg(), Var::new(2).neg()]).unwrap());
        assert!(s.solve(&[]).unwrap());
    }
}
