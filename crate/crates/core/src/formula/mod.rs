//! Variables, literals, clauses and the containers built from them.

mod dimacs;
mod query;

pub use dimacs::{parse_cnf, parse_query, parse_wcnf, write_cnf, write_query, write_wcnf};
pub use query::{negate_query, NegatedQuery};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(u32);

impl Var {
    /// # Panics
    /// If `id` is zero or does not fit a DIMACS literal.
    pub fn new(id: u32) -> Var {
        assert!(id >= 1 && id <= i32::MAX as u32, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// Zero-based position, handy for indexing assignment vectors.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }

    pub fn lit(self, positive: bool) -> Lit {
        if positive {
            self.pos()
        } else {
            self.neg()
        }
    }
}

/// A literal in DIMACS encoding: `v` or `-v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i32", try_from = "i32")]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(code: i32) -> Option<Lit> {
        (code != 0 && code != i32::MIN).then_some(Lit(code))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Truth value of the literal under `world`.
    pub fn eval(self, world: &World) -> bool {
        world.value(self.var()) == self.is_positive()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl From<Lit> for i32 {
    fn from(l: Lit) -> i32 {
        l.0
    }
}

impl TryFrom<i32> for Lit {
    type Error = String;
    fn try_from(v: i32) -> std::result::Result<Lit, String> {
        Lit::from_dimacs(v).ok_or_else(|| format!("invalid literal {v}"))
    }
}

// Sorted by variable, negative before positive.
impl Ord for Lit {
    fn cmp(&self, other: &Lit) -> Ordering {
        (self.var(), self.is_positive()).cmp(&(other.var(), other.is_positive()))
    }
}

impl PartialOrd for Lit {
    fn partial_cmp(&self, other: &Lit) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals in canonical order, never tautological.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Lit>", into = "Vec<Lit>")]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Sorts and deduplicates `lits`; fails on a complementary pair.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return Err(Error::Tautology);
        }
        Ok(Clause { lits })
    }

    /// Builds a clause from DIMACS codes.
    ///
    /// # Panics
    /// On a zero code. Tautologies are reported as errors.
    pub fn from_dimacs(codes: &[i32]) -> Result<Clause> {
        Clause::new(codes.iter().map(|&c| Lit::from_dimacs(c).expect("nonzero literal")))
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause { lits: vec![lit] }
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn max_var(&self) -> u32 {
        self.lits.last().map_or(0, |l| l.var().id())
    }

    pub fn is_satisfied(&self, world: &World) -> bool {
        self.lits.iter().any(|l| l.eval(world))
    }

    pub fn to_dimacs(&self) -> Vec<i32> {
        self.lits.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl TryFrom<Vec<Lit>> for Clause {
    type Error = Error;
    fn try_from(lits: Vec<Lit>) -> Result<Clause> {
        Clause::new(lits)
    }
}

impl From<Clause> for Vec<Lit> {
    fn from(c: Clause) -> Vec<Lit> {
        c.lits
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

pub(crate) fn max_var_of<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> u32 {
    clauses.into_iter().map(Clause::max_var).max().unwrap_or(0)
}

/// An indexed set of clauses. Clause `i` is `clauses()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl KnowledgeBase {
    /// `num_vars` is raised to cover every literal if needed.
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> KnowledgeBase {
        let num_vars = num_vars.max(max_var_of(&clauses));
        KnowledgeBase { num_vars, clauses }
    }

    pub fn from_dimacs(num_vars: u32, clauses: &[&[i32]]) -> Result<KnowledgeBase> {
        let clauses = clauses.iter().map(|c| Clause::from_dimacs(c)).collect::<Result<_>>()?;
        Ok(KnowledgeBase::new(num_vars, clauses))
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// The sub-base made of `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> KnowledgeBase {
        KnowledgeBase {
            num_vars: self.num_vars,
            clauses: indices.iter().map(|&i| self.clauses[i].clone()).collect(),
        }
    }

    pub fn with_num_vars(mut self, n: u32) -> KnowledgeBase {
        self.num_vars = self.num_vars.max(n);
        self
    }

    pub fn is_satisfied(&self, world: &World) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied(world))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    Soft(f64),
    Hard,
}

impl Weight {
    pub fn is_hard(self) -> bool {
        matches!(self, Weight::Hard)
    }

    pub fn soft(self) -> Option<f64> {
        match self {
            Weight::Soft(w) => Some(w),
            Weight::Hard => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedClause {
    pub clause: Clause,
    pub weight: Weight,
}

impl WeightedClause {
    pub fn soft(clause: Clause, w: f64) -> Result<WeightedClause> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidWeight(w));
        }
        Ok(WeightedClause { clause, weight: Weight::Soft(w) })
    }

    pub fn hard(clause: Clause) -> WeightedClause {
        WeightedClause { clause, weight: Weight::Hard }
    }
}

/// Weighted clauses defining a log-linear distribution over worlds.
///
/// Satisfiability of the hard part is only checked when a distribution is
/// built from the base.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BeliefBase {
    num_vars: u32,
    entries: Vec<WeightedClause>,
}

impl BeliefBase {
    pub fn new(num_vars: u32, entries: Vec<WeightedClause>) -> BeliefBase {
        let num_vars = num_vars.max(max_var_of(entries.iter().map(|e| &e.clause)));
        BeliefBase { num_vars, entries }
    }

    /// Soft entries from `(dimacs clause, weight)` pairs.
    pub fn from_soft(num_vars: u32, entries: &[(&[i32], f64)]) -> Result<BeliefBase> {
        let entries = entries
            .iter()
            .map(|(c, w)| WeightedClause::soft(Clause::from_dimacs(c)?, *w))
            .collect::<Result<_>>()?;
        Ok(BeliefBase::new(num_vars, entries))
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn entries(&self) -> &[WeightedClause] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: WeightedClause) {
        self.num_vars = self.num_vars.max(entry.clause.max_var());
        self.entries.push(entry);
    }

    pub fn with_num_vars(mut self, n: u32) -> BeliefBase {
        self.num_vars = self.num_vars.max(n);
        self
    }

    pub fn hard_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.entries.iter().filter(|e| e.weight.is_hard()).map(|e| &e.clause)
    }

    pub fn soft_weight_sum(&self) -> f64 {
        self.entries.iter().filter_map(|e| e.weight.soft()).sum()
    }
}

/// The base with its weights stripped; entry `i` becomes clause `i`.
pub fn classical_projection(base: &BeliefBase) -> KnowledgeBase {
    KnowledgeBase {
        num_vars: base.num_vars,
        clauses: base.entries.iter().map(|e| e.clause.clone()).collect(),
    }
}

/// A conjunction of clauses; must contain at least one clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    clauses: Vec<Clause>,
}

impl Query {
    pub fn new(clauses: Vec<Clause>) -> Result<Query> {
        if clauses.is_empty() {
            return Err(Error::InvalidArgument("query needs at least one clause".into()));
        }
        Ok(Query { clauses })
    }

    pub fn literal(l: Lit) -> Query {
        Query { clauses: vec![Clause::unit(l)] }
    }

    /// Conjunction of the given literals, one unit clause each.
    pub fn literals(lits: &[Lit]) -> Result<Query> {
        Query::new(lits.iter().map(|&l| Clause::unit(l)).collect())
    }

    pub fn from_dimacs(clauses: &[&[i32]]) -> Result<Query> {
        Query::new(clauses.iter().map(|c| Clause::from_dimacs(c)).collect::<Result<_>>()?)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn max_var(&self) -> u32 {
        max_var_of(&self.clauses)
    }

    pub fn is_satisfied(&self, world: &World) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied(world))
    }
}

/// A total assignment over variables `1..=len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct World {
    values: Vec<bool>,
}

impl World {
    pub fn new(values: Vec<bool>) -> World {
        World { values }
    }

    /// Bit `i` of `bits` gives the value of variable `i + 1`.
    pub fn from_bits(bits: u64, num_vars: u32) -> World {
        World { values: (0..num_vars).map(|i| bits >> i & 1 == 1).collect() }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// # Panics
    /// If `v` lies outside the world.
    pub fn value(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// The world as a list of true/false literals, DIMACS style.
    pub fn to_dimacs(&self) -> Vec<i32> {
        (1..=self.values.len() as u32).map(|v| Var::new(v).lit(self.values[v as usize - 1]).to_dimacs()).collect()
    }
}

impl Ord for World {
    // Lexicographic with F < T on ascending variable ids.
    fn cmp(&self, other: &World) -> Ordering {
        self.values.cmp(&other.values)
    }
}

impl PartialOrd for World {
    fn partial_cmp(&self, other: &World) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_canonical_order() {
        let c = Clause::from_dimacs(&[3, -1, 1 + 1, -1]).unwrap();
        assert_eq!(c.to_dimacs(), vec![-1, 2, 3]);
        assert_eq!(Clause::from_dimacs(&[2, -2]), Err(Error::Tautology));
    }

    #[test]
    fn literal_involution() {
        for code in [-5, -1, 1, 7] {
            let l = Lit::from_dimacs(code).unwrap();
            assert_eq!(!!l, l);
            assert_eq!((!l).var(), l.var());
        }
    }

    #[test]
    fn projection_keeps_indices() {
        let base = BeliefBase::from_soft(0, &[(&[3], 2.0), (&[-3, -1], 2.0)]).unwrap();
        let kb = classical_projection(&base);
        assert_eq!(kb.clauses()[0].to_dimacs(), vec![3]);
        assert_eq!(kb.clauses()[1].to_dimacs(), vec![-1, -3]);
        assert!(classical_projection(&BeliefBase::default()).is_empty());
    }

    #[test]
    fn world_order_is_false_first() {
        let a = World::new(vec![false, true]);
        let b = World::new(vec![true, false]);
        assert!(a < b);
    }
}
