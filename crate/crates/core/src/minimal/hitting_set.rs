use crate::deadline::Deadline;
use crate::error::{Error, Result};

/// A collection of subsets of a universe of non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HittingSetInstance {
    pub universe: Vec<usize>,
    pub collection: Vec<Vec<usize>>,
}

impl HittingSetInstance {
    /// Universe taken as the union of the collection.
    pub fn new(collection: Vec<Vec<usize>>) -> HittingSetInstance {
        let mut universe: Vec<usize> = collection.iter().flatten().copied().collect();
        universe.sort_unstable();
        universe.dedup();
        HittingSetInstance { universe, collection }
    }
}

/// A minimum-cardinality hitting set, lexicographically smallest among the
/// minimum ones.
pub fn min_hitting_set(inst: &HittingSetInstance) -> Result<Vec<usize>> {
    if let Some(bad) = inst.collection.iter().flatten().find(|e| inst.universe.binary_search(e).is_err()) {
        return Err(Error::InvalidArgument(format!("element {bad} is not in the universe")));
    }
    let mut s = HittingSetSolver::new(&inst.collection)?;
    Ok(s.solve()?.expect("unconstrained instances always have a hitting set"))
}

/// Exact minimum hitting sets with optional forbidden supersets.
///
/// First a branch and bound over elements (most frequent first, greedy upper
/// bound, disjoint-sets lower bound) finds the optimum size; then a
/// depth-first search in ascending element order picks the lexicographically
/// first set of that size.
pub struct HittingSetSolver {
    elems: Vec<usize>,
    sets: Vec<Vec<u32>>,
    occ: Vec<Vec<u32>>,
    forbidden: Vec<Vec<u32>>,
    forbid_occ: Vec<Vec<u32>>,
    deadline: Deadline,
    // search state
    cover: Vec<u32>,
    uncovered: usize,
    excluded: Vec<bool>,
    forbid_hits: Vec<u32>,
    chosen: Vec<u32>,
    nodes: u64,
    mark: Vec<bool>,
    by_size: Vec<u32>,
}

impl HittingSetSolver {
    pub fn new(collection: &[Vec<usize>]) -> Result<HittingSetSolver> {
        if collection.iter().any(Vec::is_empty) {
            return Err(Error::EmptyMember);
        }
        let mut elems: Vec<usize> = collection.iter().flatten().copied().collect();
        elems.sort_unstable();
        elems.dedup();
        let id = |e: usize| elems.binary_search(&e).expect("collected") as u32;
        let mut sets: Vec<Vec<u32>> = collection
            .iter()
            .map(|s| {
                let mut v: Vec<u32> = s.iter().map(|&e| id(e)).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        sets.sort();
        sets.dedup();
        let mut occ = vec![Vec::new(); elems.len()];
        for (i, s) in sets.iter().enumerate() {
            for &e in s {
                occ[e as usize].push(i as u32);
            }
        }
        let mut by_size: Vec<u32> = (0..sets.len() as u32).collect();
        by_size.sort_by_key(|&i| (sets[i as usize].len(), i));
        let n = elems.len();
        Ok(HittingSetSolver {
            cover: vec![0; sets.len()],
            uncovered: sets.len(),
            excluded: vec![false; n],
            forbid_hits: Vec::new(),
            chosen: Vec::new(),
            nodes: 0,
            mark: vec![false; n],
            by_size,
            elems,
            sets,
            occ,
            forbidden: Vec::new(),
            forbid_occ: vec![Vec::new(); n],
            deadline: Deadline::none(),
        })
    }

    pub fn set_deadline(&mut self, deadline: Deadline) {
        self.deadline = deadline;
    }

    /// Rejects every hitting set that contains all of `elements`.
    pub fn forbid_superset_of(&mut self, elements: &[usize]) {
        let mut ids = Vec::new();
        for e in elements {
            match self.elems.binary_search(e) {
                Ok(i) => ids.push(i as u32),
                // Hitting sets draw only on collection elements, so this
                // superset can never occur.
                Err(_) => return,
            }
        }
        ids.sort_unstable();
        ids.dedup();
        let k = self.forbidden.len() as u32;
        for &e in &ids {
            self.forbid_occ[e as usize].push(k);
        }
        self.forbidden.push(ids);
        self.forbid_hits.push(0);
    }

    /// `Ok(None)` when the forbidden sets leave no valid hitting set.
    pub fn solve(&mut self) -> Result<Option<Vec<usize>>> {
        if self.forbidden.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        if self.sets.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let greedy = self.greedy();
        let mut best = greedy.as_ref().map_or(usize::MAX, Vec::len);
        self.branch(&mut best)?;
        if best == usize::MAX {
            return Ok(None);
        }
        debug_assert!(self.chosen.is_empty() && self.uncovered == self.sets.len());
        let found = self.lex_first(0, best)?;
        debug_assert!(found);
        let mut out: Vec<usize> = self.chosen.iter().map(|&e| self.elems[e as usize]).collect();
        out.sort_unstable();
        while let Some(e) = self.chosen.pop() {
            self.unchoose(e);
        }
        Ok(Some(out))
    }

    fn choose(&mut self, e: u32) {
        for &s in &self.occ[e as usize] {
            if self.cover[s as usize] == 0 {
                self.uncovered -= 1;
            }
            self.cover[s as usize] += 1;
        }
        for &f in &self.forbid_occ[e as usize] {
            self.forbid_hits[f as usize] += 1;
        }
        self.chosen.push(e);
    }

    fn unchoose(&mut self, e: u32) {
        for &s in &self.occ[e as usize] {
            self.cover[s as usize] -= 1;
            if self.cover[s as usize] == 0 {
                self.uncovered += 1;
            }
        }
        for &f in &self.forbid_occ[e as usize] {
            self.forbid_hits[f as usize] -= 1;
        }
    }

    fn violates(&self, e: u32) -> bool {
        self.forbid_occ[e as usize]
            .iter()
            .any(|&f| self.forbid_hits[f as usize] + 1 == self.forbidden[f as usize].len() as u32)
    }

    fn available(&self, e: u32, min_elem: u32) -> bool {
        e >= min_elem && !self.excluded[e as usize]
    }

    /// Size of a greedy packing of pairwise disjoint uncovered sets, using
    /// only elements that are still available.
    fn lower_bound(&mut self, min_elem: u32) -> Option<usize> {
        let mut count = 0;
        let mut touched = Vec::new();
        let mut dead = false;
        for k in 0..self.by_size.len() {
            let s = self.by_size[k] as usize;
            if self.cover[s] > 0 {
                continue;
            }
            let mut any = false;
            let mut clash = false;
            for &e in &self.sets[s] {
                if self.available(e, min_elem) {
                    any = true;
                    if self.mark[e as usize] {
                        clash = true;
                        break;
                    }
                }
            }
            if !any {
                dead = true;
                break;
            }
            if clash {
                continue;
            }
            for &e in &self.sets[s] {
                if self.available(e, min_elem) {
                    self.mark[e as usize] = true;
                    touched.push(e);
                }
            }
            count += 1;
        }
        for e in touched {
            self.mark[e as usize] = false;
        }
        (!dead).then_some(count)
    }

    fn greedy(&mut self) -> Option<Vec<u32>> {
        let mut picked = Vec::new();
        while self.uncovered > 0 {
            let mut best: Option<(usize, u32)> = None;
            for e in 0..self.elems.len() as u32 {
                if self.violates(e) {
                    continue;
                }
                let gain = self.occ[e as usize].iter().filter(|&&s| self.cover[s as usize] == 0).count();
                if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, e));
                }
            }
            let Some((_, e)) = best else { break };
            self.choose(e);
            picked.push(e);
        }
        let ok = self.uncovered == 0;
        for &e in picked.iter().rev() {
            self.chosen.pop();
            self.unchoose(e);
        }
        ok.then_some(picked)
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            self.deadline.check()?;
        }
        Ok(())
    }

    fn branch(&mut self, best: &mut usize) -> Result<()> {
        self.tick()?;
        if self.uncovered == 0 {
            *best = (*best).min(self.chosen.len());
            return Ok(());
        }
        if self.chosen.len() + 1 >= *best {
            return Ok(());
        }
        match self.lower_bound(0) {
            Some(lb) if self.chosen.len() + lb < *best => {}
            _ => return Ok(()),
        }
        // Branch on the uncovered set with the fewest available elements.
        let mut target = None;
        let mut target_len = usize::MAX;
        for (s, set) in self.sets.iter().enumerate() {
            if self.cover[s] > 0 {
                continue;
            }
            let live = set.iter().filter(|&&e| !self.excluded[e as usize]).count();
            if live < target_len {
                target_len = live;
                target = Some(s);
            }
        }
        let target = target.expect("uncovered set");
        let mut cands: Vec<(usize, u32)> = self.sets[target]
            .iter()
            .filter(|&&e| !self.excluded[e as usize])
            .map(|&e| {
                let freq = self.occ[e as usize].iter().filter(|&&s| self.cover[s as usize] == 0).count();
                (freq, e)
            })
            .collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut excluded_here = Vec::new();
        for (_, e) in cands {
            if !self.violates(e) {
                self.choose(e);
                let r = self.branch(best);
                self.chosen.pop();
                self.unchoose(e);
                r?;
            }
            self.excluded[e as usize] = true;
            excluded_here.push(e);
            if self.chosen.len() + 1 >= *best {
                break;
            }
        }
        for e in excluded_here {
            self.excluded[e as usize] = false;
        }
        Ok(())
    }

    /// Depth-first search in ascending element order for a hitting set of
    /// size at most `size`; leaves the result in `self.chosen`.
    fn lex_first(&mut self, start: u32, size: usize) -> Result<bool> {
        self.tick()?;
        if self.uncovered == 0 {
            return Ok(true);
        }
        if self.chosen.len() == size {
            return Ok(false);
        }
        // Every uncovered set needs an element from `start` on, and the one
        // with the smallest maximum caps the next choice.
        let mut limit = u32::MAX;
        for (s, set) in self.sets.iter().enumerate() {
            if self.cover[s] == 0 {
                limit = limit.min(*set.last().expect("non-empty"));
            }
        }
        if limit < start {
            return Ok(false);
        }
        for e in start..=limit {
            if !self.occ[e as usize].iter().any(|&s| self.cover[s as usize] == 0) || self.violates(e) {
                continue;
            }
            self.choose(e);
            let feasible = match self.lower_bound(e + 1) {
                Some(lb) => self.chosen.len() + lb <= size,
                None => self.uncovered == 0,
            };
            if feasible && self.lex_first(e + 1, size)? {
                return Ok(true);
            }
            self.chosen.pop();
            self.unchoose(e);
        }
        Ok(false)
    }
}
