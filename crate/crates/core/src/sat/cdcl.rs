use super::SatOracle;
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formula::Lit;

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

// Internal literal code: 2 * (var - 1) + (1 if negative).
fn code(l: Lit) -> u32 {
    2 * l.var().index() as u32 + u32::from(!l.is_positive())
}

#[inline]
fn lit_value(assign: &[u8], lit: u32) -> u8 {
    let a = assign[(lit >> 1) as usize];
    if a == UNDEF {
        UNDEF
    } else {
        a ^ (lit & 1) as u8
    }
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: u32,
}

/// Decision heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Lowest unassigned variable first, positive polarity, no restarts.
    Static,
    /// Activity-based choice (ties to the lowest id), saved phases starting
    /// positive, Luby restarts.
    #[default]
    Activity,
}

// Conflicts before the first learnt-clause reduction, and the increment
// between later ones.
const REDUCE_FIRST: u64 = 2000;
const REDUCE_STEP: u64 = 300;

/// Conflict-driven clause learning with two watched literals.
///
/// Both heuristics are deterministic: answers and models depend only on the
/// clauses added, the order of calls and the assumptions given. Half of the
/// learnt clauses, those with the most decision levels, are dropped at
/// restarts once enough conflicts have passed.
#[derive(Clone, Default)]
pub struct Cdcl {
    branching: Branching,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    clauses: Vec<Vec<u32>>,
    // Literal block distance of each clause; 0 for original clauses.
    lbd: Vec<u32>,
    next_reduce: u64,
    reduce_interval: u64,
    watches: Vec<Vec<Watcher>>,
    assign: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    next_var: usize,
    ok: bool,
    model: Vec<bool>,
    deadline: Deadline,
    conflicts: u64,
    decisions: u64,
}

impl Cdcl {
    pub fn new() -> Cdcl {
        Cdcl::with_branching(Branching::default())
    }

    pub fn with_branching(branching: Branching) -> Cdcl {
        Cdcl {
            ok: true,
            branching,
            var_inc: 1.0,
            next_reduce: REDUCE_FIRST,
            reduce_interval: REDUCE_FIRST,
            ..Cdcl::default()
        }
    }

    pub fn with_vars(n: u32) -> Cdcl {
        let mut s = Cdcl::new();
        s.reserve_vars(n);
        s
    }

    pub fn conflicts(&self) -> u64 {
        self.conflicts
    }

    #[inline]
    fn value(&self, lit: u32) -> u8 {
        lit_value(&self.assign, lit)
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, lit: u32, reason: u32) {
        let v = (lit >> 1) as usize;
        debug_assert_eq!(self.assign[v], UNDEF);
        self.assign[v] = 1 ^ (lit & 1) as u8;
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl];
        for &lit in &self.trail[start..] {
            let v = (lit >> 1) as usize;
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.next_var = self.next_var.min(v);
            if self.branching == Branching::Activity {
                self.phase[v] = lit & 1 == 0;
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl);
        self.qhead = self.trail.len();
    }

    fn watch(&mut self, cref: u32) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c[0], c[1]);
        self.watches[a as usize].push(Watcher { cref, blocker: b });
        self.watches[b as usize].push(Watcher { cref, blocker: a });
    }

    /// Returns the index of a falsified clause, if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                let c = &mut self.clauses[cref];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if first != w.blocker && lit_value(&self.assign, first) == 1 {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    let l = c[k];
                    if lit_value(&self.assign, l) != 0 {
                        c.swap(1, k);
                        self.watches[l as usize].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                match self.value(first) {
                    0 => {
                        conflict = Some(w.cref);
                        while i < ws.len() {
                            ws[j] = ws[i];
                            j += 1;
                            i += 1;
                        }
                    }
                    _ => self.enqueue(first, w.cref),
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal first)
    /// and the backjump level.
    fn analyze(&mut self, confl: u32) -> (Vec<u32>, usize) {
        let cur = self.decision_level() as u32;
        let mut learnt = vec![0u32];
        let mut path = 0usize;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        let mut cref = confl;
        loop {
            let skip = usize::from(p.is_some());
            for k in skip..self.clauses[cref as usize].len() {
                let q = self.clauses[cref as usize][k];
                let v = (q >> 1) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.branching == Branching::Activity {
                        self.bump(v);
                    }
                    if self.level[v] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[(self.trail[idx] >> 1) as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[(lit >> 1) as usize] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            cref = self.reason[(lit >> 1) as usize];
        }
        learnt[0] = p.expect("uip") ^ 1;

        // Drop literals implied by the rest of the clause.
        let mut keep = vec![true; learnt.len()];
        for (i, &q) in learnt.iter().enumerate().skip(1) {
            let r = self.reason[(q >> 1) as usize];
            if r == NO_REASON {
                continue;
            }
            let redundant = self.clauses[r as usize][1..].iter().all(|&x| {
                let v = (x >> 1) as usize;
                self.seen[v] || self.level[v] == 0
            });
            if redundant {
                keep[i] = false;
            }
        }
        for &q in &learnt[1..] {
            self.seen[(q >> 1) as usize] = false;
        }
        let mut out: Vec<u32> = learnt.iter().zip(&keep).filter(|(_, &k)| k).map(|(&q, _)| q).collect();

        let mut bt = 0;
        if out.len() > 1 {
            let mut best = 1;
            for i in 2..out.len() {
                if self.level[(out[i] >> 1) as usize] > self.level[(out[best] >> 1) as usize] {
                    best = i;
                }
            }
            out.swap(1, best);
            bt = self.level[(out[1] >> 1) as usize] as usize;
        }
        (out, bt)
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn pick_branch(&mut self) -> Option<u32> {
        match self.branching {
            Branching::Static => {
                let n = self.assign.len();
                while self.next_var < n && self.assign[self.next_var] != UNDEF {
                    self.next_var += 1;
                }
                (self.next_var < n).then(|| 2 * self.next_var as u32)
            }
            Branching::Activity => loop {
                let v = self.heap.pop(&self.activity)?;
                if self.assign[v] == UNDEF {
                    return Some(2 * v as u32 + u32::from(!self.phase[v]));
                }
            },
        }
    }

    fn block_distance(&mut self, c: &[u32]) -> u32 {
        let mut levels: Vec<u32> = c.iter().map(|&l| self.level[(l >> 1) as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    /// Keeps the better half of the learnt clauses (by block distance, then
    /// age), plus every clause of distance 2 or less. Only called at level 0,
    /// where no reason is consulted again.
    fn reduce_learnts(&mut self) {
        debug_assert_eq!(self.decision_level(), 0);
        self.reduce_interval += REDUCE_STEP;
        self.next_reduce = self.conflicts + self.reduce_interval;
        let mut learnts: Vec<usize> = (0..self.clauses.len()).filter(|&i| self.lbd[i] > 0).collect();
        learnts.sort_by_key(|&i| (self.lbd[i], std::cmp::Reverse(i)));
        let mut drop = vec![false; self.clauses.len()];
        for &i in &learnts[learnts.len() / 2..] {
            if self.lbd[i] > 2 {
                drop[i] = true;
            }
        }
        let mut remap = vec![NO_REASON; self.clauses.len()];
        let mut next = 0u32;
        for (i, r) in remap.iter_mut().enumerate() {
            if !drop[i] {
                *r = next;
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.clauses);
        let old_lbd = std::mem::take(&mut self.lbd);
        for (i, (c, l)) in old.into_iter().zip(old_lbd).enumerate() {
            if !drop[i] {
                self.clauses.push(c);
                self.lbd.push(l);
            }
        }
        for ws in &mut self.watches {
            ws.retain_mut(|w| {
                w.cref = remap[w.cref as usize];
                w.cref != NO_REASON
            });
        }
        for r in &mut self.reason {
            *r = NO_REASON;
        }
    }

    fn save_model(&mut self) {
        self.model.clear();
        self.model.extend(self.assign.iter().map(|&a| a == 1));
    }
}

impl SatOracle for Cdcl {
    fn reserve_vars(&mut self, n: u32) {
        let n = n as usize;
        if n <= self.assign.len() {
            return;
        }
        self.assign.resize(n, UNDEF);
        self.level.resize(n, 0);
        self.reason.resize(n, NO_REASON);
        self.seen.resize(n, false);
        self.watches.resize_with(2 * n, Vec::new);
        let old = self.activity.len();
        self.activity.resize(n, 0.0);
        self.phase.resize(n, true);
        for v in old..n {
            self.heap.insert(v, &self.activity);
        }
    }

    fn num_vars(&self) -> u32 {
        self.assign.len() as u32
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        if !self.ok {
            return;
        }
        self.cancel_until(0);
        let max = lits.iter().map(|l| l.var().id()).max().unwrap_or(0);
        self.reserve_vars(max);
        let mut c: Vec<u32> = lits.iter().map(|&l| code(l)).collect();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        // Simplify against level-0 facts.
        if c.iter().any(|&l| self.value(l) == 1) {
            return;
        }
        c.retain(|&l| self.value(l) == UNDEF);
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                let cref = self.clauses.len() as u32;
                self.clauses.push(c);
                self.lbd.push(0);
                self.watch(cref);
            }
        }
    }

    fn set_deadline(&mut self, deadline: Deadline) {
        self.deadline = deadline;
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool> {
        if !self.ok {
            return Ok(false);
        }
        let max = assumptions.iter().map(|l| l.var().id()).max().unwrap_or(0);
        self.reserve_vars(max);
        let assumptions: Vec<u32> = assumptions.iter().map(|&l| code(l)).collect();
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return Ok(false);
        }
        let mut restart_round = 0u32;
        let mut restart_left = luby(restart_round) * 100;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                restart_left = restart_left.saturating_sub(1);
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Ok(false);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let cref = self.clauses.len() as u32;
                    let first = learnt[0];
                    let lbd = self.block_distance(&learnt);
                    self.clauses.push(learnt);
                    self.lbd.push(lbd);
                    self.watch(cref);
                    self.enqueue(first, cref);
                }
                if self.branching == Branching::Activity {
                    self.var_inc /= 0.95;
                }
                if self.conflicts.is_multiple_of(128) && self.deadline.expired() {
                    self.cancel_until(0);
                    return Err(Error::Timeout);
                }
                continue;
            }
            if self.branching == Branching::Activity && restart_left == 0 {
                restart_round += 1;
                restart_left = luby(restart_round) * 100;
                self.cancel_until(0);
                if self.conflicts >= self.next_reduce {
                    self.reduce_learnts();
                }
                continue;
            }

            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match self.value(p) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => {
                        self.cancel_until(0);
                        return Ok(false);
                    }
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let next = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(l) => l,
                    None => {
                        self.save_model();
                        self.cancel_until(0);
                        return Ok(true);
                    }
                },
            };
            self.decisions += 1;
            if self.decisions.is_multiple_of(4096) && self.deadline.expired() {
                self.cancel_until(0);
                return Err(Error::Timeout);
            }
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, NO_REASON);
        }
    }

    fn model(&self) -> &[bool] {
        &self.model
    }
}

impl std::fmt::Debug for Cdcl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cdcl")
            .field("vars", &self.assign.len())
            .field("clauses", &self.clauses.len())
            .field("conflicts", &self.conflicts)
            .finish()
    }
}

/// The Luby sequence 1 1 2 1 1 2 4 ..., indexed from 0.
fn luby(mut i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < u64::from(i) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != u64::from(i) {
        size = (size - 1) / 2;
        seq -= 1;
        i %= size as u32;
    }
    1 << seq
}

/// Binary max-heap of variables ordered by activity, lower id first on ties.
#[derive(Clone, Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn before(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.pos.len() <= v {
            self.pos.resize(v + 1, NOT_IN_HEAP);
        }
        if self.pos[v] != NOT_IN_HEAP {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(&p) = self.pos.get(v) {
            if p != NOT_IN_HEAP {
                self.up(p, act);
            }
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::before(v, self.heap[parent], act) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::before(self.heap[r], self.heap[l], act) { r } else { l };
            if !Self::before(self.heap[c], v, act) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
}
