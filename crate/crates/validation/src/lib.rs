//! Brute-force references used by the acceptance checks. Everything here
//! enumerates worlds or clause subsets directly and is meant for at most a
//! dozen variables and clauses.

use pexpl_core::formula::{BeliefBase, Clause, Query, Weight};

/// Positive and negative literal masks of a clause over variable bits.
pub fn masks(c: &Clause) -> (u32, u32) {
    c.lits().iter().fold((0, 0), |(p, n), l| {
        let bit = 1 << l.var().index();
        if l.is_positive() {
            (p | bit, n)
        } else {
            (p, n | bit)
        }
    })
}

pub fn holds((p, n): (u32, u32), bits: u32) -> bool {
    bits & p != 0 || !bits & n != 0
}

pub fn query_holds(q: &Query, bits: u32) -> bool {
    q.clauses().iter().all(|c| holds(masks(c), bits))
}

/// For every world, the set of `clauses` it satisfies as a bit mask.
pub fn satisfied_sets(clauses: &[Clause], n: u32) -> Vec<u32> {
    let ms: Vec<_> = clauses.iter().map(masks).collect();
    (0u32..1 << n)
        .map(|w| ms.iter().enumerate().filter(|(_, &m)| holds(m, w)).fold(0, |acc, (i, _)| acc | 1 << i))
        .collect()
}

/// `out[s]` is true iff some member of `sets` contains `s`.
pub fn covered(sets: impl IntoIterator<Item = u32>, m: usize) -> Vec<bool> {
    let mut out = vec![false; 1 << m];
    for s in sets {
        out[s as usize] = true;
    }
    for bit in 0..m {
        for s in (0..1usize << m).rev() {
            if s >> bit & 1 == 0 && out[s | 1 << bit] {
                out[s] = true;
            }
        }
    }
    out
}

/// `sat[s]` for every subset `s` of `clauses`.
pub fn subset_sat(clauses: &[Clause], n: u32) -> Vec<bool> {
    covered(satisfied_sets(clauses, n), clauses.len())
}

/// `entails[s]`: subset `s` of `clauses` entails `q`.
pub fn subset_entails(clauses: &[Clause], n: u32, q: &Query) -> Vec<bool> {
    let sets = satisfied_sets(clauses, n);
    let counter = (0u32..1 << n).filter(|&w| !query_holds(q, w)).map(|w| sets[w as usize]);
    covered(counter, clauses.len()).into_iter().map(|c| !c).collect()
}

pub fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn pick(clauses: &[Clause], idx: &[usize]) -> Vec<Clause> {
    idx.iter().map(|&i| clauses[i].clone()).collect()
}

/// Unnormalized weight of every world; zero when a hard entry is violated.
pub fn world_weights(base: &BeliefBase, n: u32) -> Vec<f64> {
    let entries: Vec<_> = base.entries().iter().map(|e| (masks(&e.clause), e.weight)).collect();
    (0u32..1 << n)
        .map(|w| {
            let mut s = 0.0;
            for &(m, weight) in &entries {
                match weight {
                    Weight::Hard if !holds(m, w) => return 0.0,
                    Weight::Soft(x) if holds(m, w) => s += x,
                    _ => {}
                }
            }
            f64::exp(s)
        })
        .collect()
}

/// Probability of the worlds selected by `keep`.
pub fn mass(weights: &[f64], keep: impl Fn(u32) -> bool) -> f64 {
    let z: f64 = weights.iter().sum();
    weights.iter().enumerate().filter(|(w, _)| keep(*w as u32)).map(|(_, x)| x).sum::<f64>() / z
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // Ties share the mean of their positions.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            r[o] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties. `NaN` if either
/// side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
