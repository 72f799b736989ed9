use super::{Clause, Query, Var};

/// CNF for the negation of a query, possibly over auxiliary variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegatedQuery {
    pub clauses: Vec<Clause>,
    /// First auxiliary variable id; equal to `num_vars + 1` when none are used.
    pub first_aux: u32,
    /// Total number of variables including auxiliaries.
    pub num_vars: u32,
}

/// Encodes `¬q` as CNF.
///
/// A conjunction of unit clauses becomes a single clause. Otherwise each query
/// clause `c_j` gets a selector `s_j` with `s_j → ¬l` for every `l ∈ c_j`, and
/// one clause asks for some selector. Selectors are numbered above
/// `max(num_vars, vars of q)`.
pub fn negate_query(q: &Query, num_vars: u32) -> NegatedQuery {
    let base = num_vars.max(q.max_var());
    if q.clauses().iter().all(|c| c.len() == 1) {
        let lits = q.clauses().iter().map(|c| !c.lits()[0]);
        // a ∧ ¬a negates to a tautology; represent it with no clause at all.
        let clauses = Clause::new(lits).map(|c| vec![c]).unwrap_or_default();
        return NegatedQuery { clauses, first_aux: base + 1, num_vars: base };
    }
    let mut clauses = Vec::new();
    let mut selectors = Vec::new();
    for (j, c) in q.clauses().iter().enumerate() {
        let s = Var::new(base + 1 + j as u32);
        selectors.push(s.pos());
        for &l in c.lits() {
            clauses.push(Clause::new([s.neg(), !l]).expect("selector is fresh"));
        }
    }
    clauses.push(Clause::new(selectors).expect("distinct selectors"));
    NegatedQuery { clauses, first_aux: base + 1, num_vars: base + q.clauses().len() as u32 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::World;

    fn models_project(neg: &NegatedQuery, n: u32) -> Vec<u64> {
        let extra = neg.num_vars - n;
        let mut out = Vec::new();
        for bits in 0..1u64 << n {
            let ok = (0..1u64 << extra).any(|aux| {
                let w = World::from_bits(bits | aux << n, neg.num_vars);
                neg.clauses.iter().all(|c| c.is_satisfied(&w))
            });
            if ok {
                out.push(bits);
            }
        }
        out
    }

    #[test]
    fn unit_queries() {
        let a = Var::new(1);
        let b = Var::new(2);
        let n = negate_query(&Query::literal(a.pos()), 1);
        assert_eq!(n.clauses, vec![Clause::unit(a.neg())]);
        let n = negate_query(&Query::literals(&[a.pos(), b.pos()]).unwrap(), 2);
        assert_eq!(n.clauses, vec![Clause::new([a.neg(), b.neg()]).unwrap()]);
        assert_eq!(n.num_vars, 2);
    }

    #[test]
    fn contradictory_unit_query_negates_to_true() {
        let a = Var::new(1);
        let n = negate_query(&Query::literals(&[a.pos(), a.neg()]).unwrap(), 1);
        assert!(n.clauses.is_empty());
    }

    #[test]
    fn selector_encoding_matches_truth_table() {
        let q = Query::from_dimacs(&[&[1, 2], &[3, 4]]).unwrap();
        let neg = negate_query(&q, 4);
        assert_eq!(neg.first_aux, 5);
        let expected: Vec<u64> =
            (0..16u64).filter(|&b| !q.is_satisfied(&World::from_bits(b, 4))).collect();
        assert_eq!(models_project(&neg, 4), expected);
    }
}
