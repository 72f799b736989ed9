#![allow(dead_code)]

use pexpl_core::formula::{BeliefBase, Clause, KnowledgeBase, Lit, Query, Var, WeightedClause, World};
use proptest::prelude::*;

pub fn cl(c: &[i32]) -> Clause {
    Clause::from_dimacs(c).unwrap()
}

pub fn lit(code: i32) -> Lit {
    Lit::from_dimacs(code).unwrap()
}

pub fn q(code: i32) -> Query {
    Query::literal(lit(code))
}

pub fn worlds(n: u32) -> impl Iterator<Item = World> {
    (0..1u64 << n).map(move |b| World::from_bits(b, n))
}

pub fn brute_sat(clauses: &[Clause], n: u32) -> bool {
    worlds(n).any(|w| clauses.iter().all(|c| c.is_satisfied(&w)))
}

pub fn brute_entails(clauses: &[Clause], n: u32, query: &Query) -> bool {
    worlds(n).filter(|w| clauses.iter().all(|c| c.is_satisfied(w))).all(|w| query.is_satisfied(&w))
}

/// A random non-tautological clause over `1..=n` with 1..=max_len literals.
pub fn clause_strategy(n: u32, max_len: usize) -> impl Strategy<Value = Clause> {
    prop::collection::vec((1..=n, any::<bool>()), 1..=max_len).prop_map(|lits| {
        let mut seen = std::collections::BTreeMap::new();
        for (v, p) in lits {
            seen.entry(v).or_insert(p);
        }
        Clause::new(seen.into_iter().map(|(v, p)| Var::new(v).lit(p))).unwrap()
    })
}

pub fn kb_strategy(n: u32, max_clauses: usize, max_len: usize) -> impl Strategy<Value = KnowledgeBase> {
    prop::collection::vec(clause_strategy(n, max_len), 0..=max_clauses)
        .prop_map(move |cs| KnowledgeBase::new(n, cs))
}

pub fn soft_base_strategy(n: u32, max_clauses: usize, max_len: usize) -> impl Strategy<Value = BeliefBase> {
    prop::collection::vec((clause_strategy(n, max_len), 0.1f64..4.0), 1..=max_clauses).prop_map(move |es| {
        BeliefBase::new(n, es.into_iter().map(|(c, w)| WeightedClause::soft(c, w).unwrap()).collect())
    })
}

pub fn literal_strategy(n: u32) -> impl Strategy<Value = Lit> {
    (1..=n, any::<bool>()).prop_map(|(v, p)| Var::new(v).lit(p))
}
