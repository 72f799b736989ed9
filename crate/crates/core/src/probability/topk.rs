use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{BeliefBase, Clause, Lit, Query, Var, Weight, World};
use crate::sat::{Cdcl, SatOracle};

/// A world with its unnormalized log score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredWorld {
    pub world: World,
    pub score: f64,
}

impl AsRef<World> for ScoredWorld {
    fn as_ref(&self) -> &World {
        &self.world
    }
}

/// Sum of satisfied soft weights, added in entry order so equal worlds
/// compare exactly equal.
pub(crate) fn canonical_score(soft: &[(Clause, f64)], values: &[bool]) -> f64 {
    let mut s = 0.0;
    for (c, w) in soft {
        if c.lits().iter().any(|l| values[l.var().index()] == l.is_positive()) {
            s += w;
        }
    }
    s
}

/// The `k` best worlds satisfying the hard entries and `constraint`, by score
/// descending then lexicographically (false before true, variable 1 first).
///
/// Each round runs a branch and bound over variables `1..=n` in order,
/// checking feasibility of every prefix with the SAT engine and bounding by
/// the weight of soft clauses not yet falsified. The winner is blocked with a
/// clause over all `n` variables before the next round.
pub fn top_k_scored(
    base: &BeliefBase,
    constraint: Option<&Query>,
    num_vars: u32,
    k: usize,
    deadline: Deadline,
) -> Result<Vec<ScoredWorld>> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let n = num_vars.max(base.num_vars()).max(constraint.map_or(0, Query::max_var));
    let mut search = Search::new(base, constraint, n, deadline);
    if !search.solver.solve(&[])? {
        return Err(if constraint.is_some() && search.hard_alone_sat()? {
            Error::UnsatisfiableConstraint
        } else {
            Error::UnsatisfiableHard
        });
    }
    let mut out = Vec::new();
    while out.len() < k {
        let Some((score, values)) = search.best()? else { break };
        let block: Vec<Lit> = values.iter().enumerate().map(|(i, &b)| Var::new(i as u32 + 1).lit(!b)).collect();
        search.solver.add_clause(&block);
        out.push(ScoredWorld { world: World::new(values), score });
    }
    Ok(out)
}

struct Search {
    n: usize,
    soft: Vec<(Clause, f64)>,
    hard: Vec<Clause>,
    occ: Vec<Vec<(u32, bool)>>,
    false_count: Vec<u32>,
    ub: f64,
    tol: f64,
    solver: Cdcl,
    prefix: Vec<Lit>,
    best: Option<(f64, Vec<bool>)>,
    deadline: Deadline,
    nodes: u64,
}

impl Search {
    fn new(base: &BeliefBase, constraint: Option<&Query>, n: u32, deadline: Deadline) -> Search {
        let mut solver = Cdcl::with_vars(n);
        solver.set_deadline(deadline);
        let mut soft = Vec::new();
        let mut hard = Vec::new();
        for e in base.entries() {
            match e.weight {
                Weight::Hard => {
                    solver.add(&e.clause);
                    hard.push(e.clause.clone());
                }
                Weight::Soft(w) => soft.push((e.clause.clone(), w)),
            }
        }
        if let Some(q) = constraint {
            for c in q.clauses() {
                solver.add(c);
            }
        }
        let mut occ = vec![Vec::new(); n as usize];
        for (i, (c, _)) in soft.iter().enumerate() {
            for l in c.lits() {
                occ[l.var().index()].push((i as u32, l.is_positive()));
            }
        }
        let total: f64 = soft.iter().map(|(_, w)| w).sum();
        Search {
            n: n as usize,
            false_count: vec![0; soft.len()],
            ub: total,
            tol: 1e-9 * (1.0 + total),
            soft,
            hard,
            occ,
            solver,
            prefix: Vec::new(),
            best: None,
            deadline,
            nodes: 0,
        }
    }

    fn hard_alone_sat(&self) -> Result<bool> {
        let mut s = Cdcl::with_vars(self.n as u32);
        for c in &self.hard {
            s.add(c);
        }
        s.solve(&[])
    }

    fn best(&mut self) -> Result<Option<(f64, Vec<bool>)>> {
        self.best = None;
        self.prefix.clear();
        self.dfs(None)?;
        Ok(self.best.take())
    }

    fn assign(&mut self, v: usize, val: bool, delta: i32) {
        for &(i, pos) in &self.occ[v] {
            if pos != val {
                let i = i as usize;
                if delta > 0 {
                    self.false_count[i] += 1;
                    if self.false_count[i] as usize == self.soft[i].0.len() {
                        self.ub -= self.soft[i].1;
                    }
                } else {
                    if self.false_count[i] as usize == self.soft[i].0.len() {
                        self.ub += self.soft[i].1;
                    }
                    self.false_count[i] -= 1;
                }
            }
        }
    }

    fn pruned(&self) -> bool {
        self.best.as_ref().is_some_and(|(b, _)| self.ub + self.tol < *b)
    }

    fn dfs(&mut self, witness: Option<Vec<bool>>) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(256) {
            self.deadline.check()?;
        }
        if self.pruned() {
            return Ok(());
        }
        let model = match witness {
            Some(m) => m,
            None => {
                let assumptions = self.prefix.clone();
                if !self.solver.solve(&assumptions)? {
                    return Ok(());
                }
                self.solver.model()[..self.n].to_vec()
            }
        };
        let score = canonical_score(&self.soft, &model);
        let better = match &self.best {
            None => true,
            Some((b, bm)) => score > *b || (score == *b && model < *bm),
        };
        if better {
            self.best = Some((score, model.clone()));
        }
        let d = self.prefix.len();
        if d == self.n {
            return Ok(());
        }
        for val in [false, true] {
            self.assign(d, val, 1);
            self.prefix.push(Var::new(d as u32 + 1).lit(val));
            if !self.pruned() {
                let w = (model[d] == val).then(|| model.clone());
                let r = self.dfs(w);
                if r.is_err() {
                    self.prefix.pop();
                    self.assign(d, val, -1);
                    return r;
                }
            }
            self.prefix.pop();
            self.assign(d, val, -1);
        }
        Ok(())
    }
}
