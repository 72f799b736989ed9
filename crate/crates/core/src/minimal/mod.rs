//! Correction sets, minimum hitting sets and the solver wrapper they share.

mod hitting_set;

pub use hitting_set::{min_hitting_set, HittingSetInstance, HittingSetSolver};

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{max_var_of, Clause, Lit, Var};
use crate::sat::{Cdcl, SatOracle};

/// Soft clauses that may be dropped and hard clauses that may not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftHardProblem {
    soft: Vec<Clause>,
    hard: Vec<Clause>,
    num_vars: u32,
}

impl SoftHardProblem {
    /// Fails with [`Error::UnsatisfiableHard`] if the hard part alone is
    /// unsatisfiable.
    pub fn new(soft: Vec<Clause>, hard: Vec<Clause>) -> Result<SoftHardProblem> {
        let num_vars = max_var_of(soft.iter().chain(&hard));
        let mut s = Cdcl::with_vars(num_vars);
        for c in &hard {
            s.add(c);
        }
        if !s.solve(&[])? {
            return Err(Error::UnsatisfiableHard);
        }
        Ok(SoftHardProblem { soft, hard, num_vars })
    }

    pub fn soft(&self) -> &[Clause] {
        &self.soft
    }

    pub fn hard(&self) -> &[Clause] {
        &self.hard
    }
}

/// Soft-clause indices whose removal restores satisfiability, minimally.
/// An empty set means the problem was already satisfiable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorrectionSet {
    pub indices: Vec<usize>,
}

impl CorrectionSet {
    /// True when nothing had to be removed.
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// An incremental solver over hard clauses plus soft clauses guarded by
/// selector variables. Soft clause `i` is active when its selector is assumed.
pub(crate) struct SoftSolver {
    solver: Cdcl,
    soft: Vec<Clause>,
    sel_base: u32,
    num_vars: u32,
}

impl SoftSolver {
    pub fn new(soft: &[Clause], hard: &[Clause], num_vars: u32, deadline: Deadline) -> SoftSolver {
        let num_vars = max_var_of(soft.iter().chain(hard)).max(num_vars);
        let mut solver = Cdcl::with_vars(num_vars + soft.len() as u32);
        solver.set_deadline(deadline);
        for c in hard {
            solver.add(c);
        }
        let mut lits = Vec::new();
        for (i, c) in soft.iter().enumerate() {
            lits.clear();
            lits.extend_from_slice(c.lits());
            lits.push(Var::new(num_vars + 1 + i as u32).neg());
            solver.add_clause(&lits);
        }
        SoftSolver { solver, soft: soft.to_vec(), sel_base: num_vars, num_vars }
    }

    pub fn len(&self) -> usize {
        self.soft.len()
    }

    pub fn selector(&self, i: usize) -> Lit {
        Var::new(self.sel_base + 1 + i as u32).pos()
    }

    /// Is the union of the hard clauses and the soft clauses in `active`
    /// satisfiable?
    pub fn solve(&mut self, active: &[usize]) -> Result<bool> {
        let assumptions: Vec<Lit> = active.iter().map(|&i| self.selector(i)).collect();
        self.solver.solve(&assumptions)
    }

    /// Does `model` satisfy soft clause `i`?
    pub fn satisfies(&self, model: &[bool], i: usize) -> bool {
        self.soft[i].lits().iter().any(|l| model[l.var().index()] == l.is_positive())
    }

    pub fn model(&self) -> &[bool] {
        &self.solver.model()[..self.num_vars as usize]
    }

    pub fn add_hard(&mut self, lits: &[Lit]) {
        self.solver.add_clause(lits);
    }

    /// Grows `seed` to a maximal satisfiable subset, visiting the remaining
    /// soft clauses from the highest index down, and returns the complement.
    pub fn grow_mcs(&mut self, seed: &[usize]) -> Result<Vec<usize>> {
        let m = self.len();
        let mut in_set = vec![false; m];
        let mut kept: Vec<usize> = seed.to_vec();
        for &i in seed {
            in_set[i] = true;
        }
        if !self.solve(&kept)? {
            return Err(Error::UnsatisfiableSeed);
        }
        let mut model = self.model().to_vec();
        for i in (0..m).rev() {
            if in_set[i] {
                continue;
            }
            // A clause the current model already satisfies can be kept
            // without a solver call.
            if self.satisfies(&model, i) {
                kept.push(i);
                in_set[i] = true;
                continue;
            }
            kept.push(i);
            if self.solve(&kept)? {
                in_set[i] = true;
                model.copy_from_slice(self.model());
            } else {
                kept.pop();
            }
        }
        Ok((0..m).filter(|&i| !in_set[i]).collect())
    }
}

/// Extracts one minimal correction set disjoint from `seed`.
///
/// Fails with [`Error::UnsatisfiableSeed`] if the seed clauses conflict with
/// the hard clauses.
pub fn get_mcs(seed: &[usize], problem: &SoftHardProblem) -> Result<CorrectionSet> {
    get_mcs_with_deadline(seed, problem, Deadline::none())
}

pub fn get_mcs_with_deadline(seed: &[usize], problem: &SoftHardProblem, deadline: Deadline) -> Result<CorrectionSet> {
    if let Some(&bad) = seed.iter().find(|&&i| i >= problem.soft.len()) {
        return Err(Error::IndexOutOfRange(bad));
    }
    let mut s = SoftSolver::new(&problem.soft, &problem.hard, problem.num_vars, deadline);
    let mut seed = seed.to_vec();
    seed.sort_unstable();
    seed.dedup();
    Ok(CorrectionSet { indices: s.grow_mcs(&seed)? })
}

/// All MCSes in lexicographic order of their index tuples, or the first
/// `limit` discovered ones (then sorted).
pub fn enumerate_mcses(problem: &SoftHardProblem, limit: Option<usize>) -> Result<Vec<CorrectionSet>> {
    let mut s = SoftSolver::new(&problem.soft, &problem.hard, problem.num_vars, Deadline::none());
    let mut out = Vec::new();
    while limit.is_none_or(|l| out.len() < l) {
        if !s.solve(&[])? {
            break;
        }
        let mcs = s.grow_mcs(&[])?;
        if mcs.is_empty() {
            out.push(CorrectionSet { indices: mcs });
            break;
        }
        // Some clause of this MCS must hold from now on.
        let block: Vec<Lit> = mcs.iter().map(|&i| s.selector(i)).collect();
        s.add_hard(&block);
        out.push(CorrectionSet { indices: mcs });
    }
    out.sort();
    Ok(out)
}
