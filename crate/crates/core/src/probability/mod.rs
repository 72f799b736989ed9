//! Log-linear semantics of belief bases.

mod distribution;
mod topk;

pub use distribution::{Distribution, Event, MAX_ENUM_VARS};
pub use topk::{top_k_scored, ScoredWorld};

use std::ops::Add;

use serde::Serialize;

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::{BeliefBase, Clause, KnowledgeBase, Query, Weight, World};

/// A log-space world score; `BottomHard` marks a world violating a hard entry.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum LogScore {
    BottomHard,
    Finite(f64),
}

impl LogScore {
    pub fn finite(self) -> Option<f64> {
        match self {
            LogScore::Finite(v) => Some(v),
            LogScore::BottomHard => None,
        }
    }
}

impl Add for LogScore {
    type Output = LogScore;
    fn add(self, rhs: LogScore) -> LogScore {
        match (self, rhs) {
            (LogScore::Finite(a), LogScore::Finite(b)) => LogScore::Finite(a + b),
            _ => LogScore::BottomHard,
        }
    }
}

/// A world, its score and its probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedWorld {
    pub world: World,
    pub score: f64,
    pub probability: f64,
}

impl AsRef<World> for RankedWorld {
    fn as_ref(&self) -> &World {
        &self.world
    }
}

/// Sum of the weights of the soft entries `w` satisfies.
///
/// # Panics
/// If `w` does not cover the base's variables.
pub fn world_score(base: &BeliefBase, w: &World) -> LogScore {
    let mut s = LogScore::Finite(0.0);
    for e in base.entries() {
        let sat = e.clause.is_satisfied(w);
        match e.weight {
            Weight::Hard if !sat => return LogScore::BottomHard,
            Weight::Soft(x) if sat => s = s + LogScore::Finite(x),
            _ => {}
        }
    }
    s
}

fn widen(base: &BeliefBase, extra: u32) -> Result<Distribution> {
    Distribution::with_vars(base, extra)
}

pub fn log_partition(base: &BeliefBase) -> Result<LogScore> {
    Ok(LogScore::Finite(Distribution::new(base)?.log_partition()))
}

/// Degree of belief in `q`.
pub fn prob(base: &BeliefBase, q: &Query) -> Result<f64> {
    widen(base, q.max_var())?.prob(&Event::all(q.clauses()))
}

/// `P(q | given)`.
pub fn cond_prob(base: &BeliefBase, q: &Query, given: &[Clause]) -> Result<f64> {
    let n = q.max_var().max(crate::formula::max_var_of(given));
    widen(base, n)?.cond(&Event::all(q.clauses()), &Event::all(given))
}

/// The `k` most probable worlds satisfying the hard entries and
/// `constraint`, highest first. Fewer are returned if fewer exist.
pub fn top_k_worlds(base: &BeliefBase, constraint: &Query, k: usize) -> Result<Vec<RankedWorld>> {
    let n = base.num_vars().max(constraint.max_var());
    let dist = widen(base, n)?;
    let scored = top_k_scored(base, Some(constraint), n, k, Deadline::none())?;
    let log_z = dist.log_partition();
    Ok(scored
        .into_iter()
        .map(|s| RankedWorld { probability: (s.score - log_z).exp(), world: s.world, score: s.score })
        .collect())
}

/// Most probable world given `evidence`.
pub fn mpe(base: &BeliefBase, evidence: &Query) -> Result<RankedWorld> {
    Ok(top_k_worlds(base, evidence, 1)?.remove(0))
}

/// Indices of the clauses of `kb` satisfied by each of the first `k` worlds.
pub fn intersections<W: AsRef<World>>(kb: &KnowledgeBase, worlds: &[W], k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > worlds.len() {
        return Err(Error::InvalidK);
    }
    let top = &worlds[..k];
    if top.iter().any(|w| w.as_ref().num_vars() < kb.num_vars()) {
        return Err(Error::InvalidArgument("world does not cover the knowledge base".into()));
    }
    Ok((0..kb.len()).filter(|&i| top.iter().all(|w| kb.clauses()[i].is_satisfied(w.as_ref()))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;

    fn ex7() -> BeliefBase {
        BeliefBase::from_soft(2, &[(&[1], 1.0), (&[-1, 2], 2.0)]).unwrap()
    }

    fn cex() -> BeliefBase {
        BeliefBase::from_soft(3, &[(&[1], 1.0), (&[-1, 2], 3.0), (&[3], 2.0), (&[-3, 2], 1.0)]).unwrap()
    }

    #[test]
    fn scores() {
        let b = ex7();
        assert_eq!(world_score(&b, &World::new(vec![true, true])), LogScore::Finite(3.0));
        assert_eq!(world_score(&b, &World::new(vec![false, false])), LogScore::Finite(2.0));
        let mut h = ex7();
        h.push(crate::formula::WeightedClause::hard(Clause::unit(Var::new(1).neg())));
        assert_eq!(world_score(&h, &World::new(vec![true, true])), LogScore::BottomHard);
    }

    #[test]
    fn partition() {
        let z = log_partition(&ex7()).unwrap().finite().unwrap();
        let expected = (3f64.exp() + 1f64.exp() + 2.0 * 2f64.exp()).ln();
        assert!((z - expected).abs() < 1e-12);
    }

    #[test]
    fn degree_of_belief() {
        let b = Query::literal(Var::new(2).pos());
        assert!((prob(&ex7(), &b).unwrap() - 0.731059).abs() < 1e-6);
        assert!((prob(&cex(), &b).unwrap() - 0.8808).abs() < 1e-4);
        let a = Clause::unit(Var::new(1).pos());
        assert!((cond_prob(&ex7(), &b, &[a]).unwrap() - 0.8808).abs() < 1e-4);
    }

    #[test]
    fn cex_top_worlds() {
        let b = Query::literal(Var::new(2).pos());
        let top = top_k_worlds(&cex(), &b, 4).unwrap();
        assert_eq!(top[0].world.values(), &[true, true, true]);
        assert_eq!(top[1].world.values(), &[false, true, true]);
        let probs: Vec<f64> = top.iter().map(|w| w.probability).collect();
        for (p, e) in probs.iter().zip([0.567, 0.2087, 0.0768, 0.0282]) {
            assert!((p - e).abs() < 1e-3, "{probs:?}");
        }
        let kb = crate::formula::classical_projection(&cex());
        assert_eq!(intersections(&kb, &top, 2).unwrap(), vec![1, 2, 3]);
        assert_eq!(intersections(&kb, &top, 1).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn unsatisfiable_constraint() {
        let mut base = ex7();
        base.push(crate::formula::WeightedClause::hard(Clause::unit(Var::new(2).neg())));
        assert_eq!(top_k_worlds(&base, &Query::literal(Var::new(2).pos()), 1), Err(Error::UnsatisfiableConstraint));
    }
}
