//! Plain world enumeration, kept apart from the library's evaluator so
//! `--oracle` is an independent check.

use pexpl_core::formula::{BeliefBase, Clause, Query, Weight};

pub const MAX_VARS: u32 = 20;

fn sat(c: &Clause, values: &[bool]) -> bool {
    c.lits().iter().any(|l| values[l.var().index()] == l.is_positive())
}

fn worlds(n: u32) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

/// Log score, `None` when a hard entry is violated.
fn score(base: &BeliefBase, values: &[bool]) -> Option<f64> {
    let mut s = 0.0;
    for e in base.entries() {
        match e.weight {
            Weight::Hard if !sat(&e.clause, values) => return None,
            Weight::Soft(w) if sat(&e.clause, values) => s += w,
            _ => {}
        }
    }
    Some(s)
}

fn all(cs: &[Clause], values: &[bool]) -> bool {
    cs.iter().all(|c| sat(c, values))
}

fn check(n: u32) -> Result<(), String> {
    if n > MAX_VARS {
        return Err(format!("oracle is limited to {MAX_VARS} variables, got {n}"));
    }
    Ok(())
}

/// `P(q | given)` by summing world weights; `q = None` is the true query.
/// `None` if the condition has no mass.
pub fn prob(base: &BeliefBase, q: Option<&Query>, given: &[Clause], n: u32) -> Result<Option<f64>, String> {
    check(n)?;
    let (mut num, mut den) = (0.0, 0.0);
    for v in worlds(n) {
        let Some(s) = score(base, &v) else { continue };
        if all(given, &v) {
            let w = s.exp();
            den += w;
            if q.is_none_or(|q| all(q.clauses(), &v)) {
                num += w;
            }
        }
    }
    Ok((den > 0.0).then(|| num / den))
}

/// Every world satisfying `q`, best first, with its probability.
pub fn ranking(base: &BeliefBase, q: &Query, n: u32) -> Result<Vec<(Vec<bool>, f64)>, String> {
    check(n)?;
    let mut z = 0.0;
    let mut hits = Vec::new();
    for v in worlds(n) {
        let Some(s) = score(base, &v) else { continue };
        z += s.exp();
        if all(q.clauses(), &v) {
            hits.push((v, s));
        }
    }
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(hits.into_iter().map(|(v, s)| (v, s.exp() / z)).collect())
}
