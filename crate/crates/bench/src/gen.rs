use std::collections::HashSet;

use pexpl_core::formula::{BeliefBase, Clause, KnowledgeBase, Lit, Query, Var, WeightedClause};
use pexpl_core::sat::{backbone, is_consistent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};

pub const DEFAULT_WEIGHT_RANGE: (f64, f64) = (0.5, 5.0);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` distinct values from `0..n` in draw order. Uses 32-bit draws so the
/// stream does not depend on the pointer width.
fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i as u32..n as u32) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Random clauses of exactly `width` distinct variables with random signs.
/// No two clauses share the same variable set.
pub fn gen_random_cnf(n_vars: u32, n_clauses: usize, width: usize, seed: u64) -> Result<KnowledgeBase> {
    if width == 0 || width > n_vars as usize {
        return Err(BenchError::InvalidParameters(format!("width {width} with {n_vars} variables")));
    }
    if n_clauses as u128 > binomial(n_vars as u64, width as u64) {
        return Err(BenchError::InvalidParameters(format!(
            "{n_clauses} clauses of width {width} over {n_vars} variables"
        )));
    }
    let mut rng = rng(seed);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut clauses = Vec::with_capacity(n_clauses);
    while clauses.len() < n_clauses {
        let mut vars = sample_distinct(&mut rng, n_vars as usize, width);
        vars.sort_unstable();
        let signs: Vec<bool> = (0..width).map(|_| rng.gen()).collect();
        if !seen.insert(vars.clone()) {
            continue;
        }
        let lits = vars.iter().zip(signs).map(|(&v, s)| Var::new(v as u32 + 1).lit(s));
        clauses.push(Clause::new(lits).expect("distinct variables"));
    }
    Ok(KnowledgeBase::new(n_vars, clauses))
}

/// Weights each clause uniformly in `[lo, hi]`.
pub fn assign_random_weights(kb: &KnowledgeBase, lo: f64, hi: f64, seed: u64) -> Result<BeliefBase> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(BenchError::InvalidParameters(format!("weight range [{lo}, {hi}]")));
    }
    let mut rng = rng(seed);
    let entries = kb
        .clauses()
        .iter()
        .map(|c| {
            let w = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
            WeightedClause::soft(c.clone(), w).expect("range checked")
        })
        .collect();
    Ok(BeliefBase::new(kb.num_vars(), entries))
}

/// Human model for scenario `1..=5`: drops `p = 10·scenario` percent of the
/// clauses, then strips `floor(len / 5)` literals from `p` percent of the
/// rest. Surviving clauses keep their relative order.
pub fn make_human_scenario(kb: &KnowledgeBase, scenario: u32, seed: u64) -> Result<KnowledgeBase> {
    if !(1..=5).contains(&scenario) {
        return Err(BenchError::InvalidParameters(format!("scenario {scenario}")));
    }
    let p = 10 * scenario as usize;
    let mut rng = rng(seed);
    let m = kb.len();
    let removed: HashSet<usize> = sample_distinct(&mut rng, m, m * p / 100).into_iter().collect();
    let mut kept: Vec<Vec<Lit>> =
        (0..m).filter(|i| !removed.contains(i)).map(|i| kb.clauses()[i].lits().to_vec()).collect();
    let rem = kept.len();
    let mut pruned = sample_distinct(&mut rng, rem, rem * p / 100);
    pruned.sort_unstable();
    for i in pruned {
        let lits = &mut kept[i];
        let drop = lits.len() / 5;
        let mut gone = sample_distinct(&mut rng, lits.len(), drop);
        gone.sort_unstable_by(|a, b| b.cmp(a));
        for j in gone {
            lits.remove(j);
        }
    }
    let clauses = kept
        .into_iter()
        .filter(|l| !l.is_empty())
        .map(|l| Clause::new(l).expect("subset of a clause"))
        .collect();
    Ok(KnowledgeBase::new(kb.num_vars(), clauses))
}

/// Conjunction of up to `max_literals` backbone literals of `kb`, chosen at
/// random and listed in variable order.
pub fn backbone_query(kb: &KnowledgeBase, max_literals: usize, seed: u64) -> Result<Query> {
    let bb = backbone(kb)?;
    if bb.is_empty() || max_literals == 0 {
        return Err(BenchError::EmptyBackbone);
    }
    let mut rng = rng(seed);
    let mut pick = sample_distinct(&mut rng, bb.len(), max_literals.min(bb.len()));
    pick.sort_unstable();
    let lits: Vec<Lit> = pick.into_iter().map(|i| bb[i]).collect();
    Ok(Query::literals(&lits)?)
}

/// A consistent random base with a backbone query, retrying derived seeds.
/// Returns the seed that was used.
pub fn gen_entailing_instance(
    n_vars: u32,
    n_clauses: usize,
    width: usize,
    max_literals: usize,
    seed: u64,
) -> Result<(KnowledgeBase, Query, u64)> {
    const ATTEMPTS: u64 = 1000;
    for attempt in 0..ATTEMPTS {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let kb = gen_random_cnf(n_vars, n_clauses, width, s)?;
        if !is_consistent(&kb) {
            continue;
        }
        match backbone_query(&kb, max_literals, s) {
            Ok(q) => return Ok((kb, q, s)),
            Err(BenchError::EmptyBackbone) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(BenchError::InvalidParameters(format!("no entailing instance after {ATTEMPTS} attempts")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(200, 3), 1_313_400);
    }

    #[test]
    fn sampling_is_distinct() {
        let mut r = rng(3);
        let mut s = sample_distinct(&mut r, 10, 10);
        s.sort_unstable();
        assert_eq!(s, (0..10).collect::<Vec<_>>());
    }
}
