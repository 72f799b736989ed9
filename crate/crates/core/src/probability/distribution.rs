use crate::error::{Error, Result};
use crate::formula::{BeliefBase, Clause, Weight, World};

/// Largest variable count handled by exact enumeration.
pub const MAX_ENUM_VARS: u32 = 26;

// Worlds kept in memory after the first pass; larger spaces are re-enumerated.
const CACHE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct MaskClause {
    pos: u32,
    neg: u32,
}

impl MaskClause {
    pub(crate) fn new(c: &Clause) -> MaskClause {
        let mut m = MaskClause { pos: 0, neg: 0 };
        for l in c.lits() {
            let bit = 1u32 << l.var().index();
            if l.is_positive() {
                m.pos |= bit;
            } else {
                m.neg |= bit;
            }
        }
        m
    }

    #[inline]
    pub(crate) fn holds(self, bits: u32) -> bool {
        bits & self.pos != 0 || !bits & self.neg != 0
    }
}

/// A conjunction of CNF formulas, each possibly negated.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Event {
    parts: Vec<(Vec<MaskClause>, bool)>,
    max_var: u32,
}

impl Event {
    /// True on every world.
    pub fn always() -> Event {
        Event::default()
    }

    /// All of `clauses` hold.
    pub fn all(clauses: &[Clause]) -> Event {
        Event::default().and_all(clauses)
    }

    /// Not all of `clauses` hold.
    pub fn not_all(clauses: &[Clause]) -> Event {
        Event::default().and_not_all(clauses)
    }

    pub fn and_all(mut self, clauses: &[Clause]) -> Event {
        self.push(clauses, false);
        self
    }

    pub fn and_not_all(mut self, clauses: &[Clause]) -> Event {
        self.push(clauses, true);
        self
    }

    pub fn and(mut self, other: &Event) -> Event {
        self.parts.extend(other.parts.iter().cloned());
        self.max_var = self.max_var.max(other.max_var);
        self
    }

    fn push(&mut self, clauses: &[Clause], negated: bool) {
        self.max_var = self.max_var.max(crate::formula::max_var_of(clauses));
        if self.max_var > MAX_ENUM_VARS {
            // Keep the event well-formed; the distribution refuses it later.
            self.parts.push((Vec::new(), negated));
            return;
        }
        self.parts.push((clauses.iter().map(MaskClause::new).collect(), negated));
    }

    pub fn max_var(&self) -> u32 {
        self.max_var
    }

    #[inline]
    fn holds(&self, bits: u32) -> bool {
        self.parts.iter().all(|(cs, neg)| cs.iter().all(|c| c.holds(bits)) != *neg)
    }
}

/// Exact log-linear distribution of a belief base.
///
/// Hard entries remove worlds; each surviving world scores the sum of the
/// weights of the soft entries it satisfies.
#[derive(Debug, Clone)]
pub struct Distribution {
    num_vars: u32,
    hard: Vec<MaskClause>,
    soft: Vec<(MaskClause, f64)>,
    max_score: f64,
    // Σ exp(score − max_score) over surviving worlds.
    mass: f64,
    cache: Option<Vec<(u32, f64)>>,
}

impl Distribution {
    pub fn new(base: &BeliefBase) -> Result<Distribution> {
        Distribution::with_vars(base, base.num_vars())
    }

    /// Distribution over `max(n, base vars)` variables.
    pub fn with_vars(base: &BeliefBase, n: u32) -> Result<Distribution> {
        let num_vars = n.max(base.num_vars());
        if num_vars > MAX_ENUM_VARS {
            return Err(Error::TooManyVariables { num_vars, limit: MAX_ENUM_VARS });
        }
        let mut hard = Vec::new();
        let mut soft = Vec::new();
        for e in base.entries() {
            let m = MaskClause::new(&e.clause);
            match e.weight {
                Weight::Hard => hard.push(m),
                Weight::Soft(w) => soft.push((m, w)),
            }
        }
        let mut d = Distribution { num_vars, hard, soft, max_score: f64::NEG_INFINITY, mass: 0.0, cache: None };
        let mut cache = Vec::new();
        let mut cache_ok = true;
        let mut max_score = f64::NEG_INFINITY;
        d.for_each_world(|bits, s| {
            if s > max_score {
                max_score = s;
            }
            if cache_ok {
                if cache.len() < CACHE_LIMIT {
                    cache.push((bits, s));
                } else {
                    cache_ok = false;
                    cache = Vec::new();
                }
            }
        });
        d.max_score = max_score;
        if max_score == f64::NEG_INFINITY {
            return Err(Error::UnsatisfiableHard);
        }
        if cache_ok {
            d.cache = Some(cache);
        }
        d.mass = d.mass_of(&Event::always());
        Ok(d)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    fn score_bits(&self, bits: u32) -> Option<f64> {
        if !self.hard.iter().all(|c| c.holds(bits)) {
            return None;
        }
        let mut s = 0.0;
        for &(c, w) in &self.soft {
            if c.holds(bits) {
                s += w;
            }
        }
        Some(s)
    }

    fn for_each_world(&self, mut f: impl FnMut(u32, f64)) {
        if let Some(cache) = &self.cache {
            for &(bits, s) in cache {
                f(bits, s);
            }
            return;
        }
        let total: u64 = 1 << self.num_vars;
        for bits in 0..total {
            if let Some(s) = self.score_bits(bits as u32) {
                f(bits as u32, s);
            }
        }
    }

    fn mass_of(&self, e: &Event) -> f64 {
        let mut acc = 0.0;
        self.for_each_world(|bits, s| {
            if e.holds(bits) {
                acc += (s - self.max_score).exp();
            }
        });
        acc
    }

    fn check(&self, e: &Event) -> Result<()> {
        if e.max_var > self.num_vars {
            return Err(Error::InvalidArgument(format!(
                "event mentions variable {} beyond the distribution's {}",
                e.max_var, self.num_vars
            )));
        }
        Ok(())
    }

    /// Natural log of the partition function.
    pub fn log_partition(&self) -> f64 {
        self.max_score + self.mass.ln()
    }

    pub fn prob(&self, e: &Event) -> Result<f64> {
        self.check(e)?;
        Ok(self.mass_of(e) / self.mass)
    }

    /// `P(e | given)`; fails when `given` has probability zero.
    pub fn cond(&self, e: &Event, given: &Event) -> Result<f64> {
        self.check(e)?;
        self.check(given)?;
        let g = self.mass_of(given);
        if g == 0.0 {
            return Err(Error::ZeroProbability);
        }
        Ok(self.mass_of(&given.clone().and(e)) / g)
    }

    /// Probability of a single world, zero if it violates a hard entry.
    pub fn world_prob(&self, w: &World) -> f64 {
        match self.score_bits(world_bits(w)) {
            Some(s) => (s - self.max_score).exp() / self.mass,
            None => 0.0,
        }
    }

    /// Probability of every surviving world in ascending bit order.
    pub fn worlds(&self) -> Vec<(World, f64)> {
        let mut out = Vec::new();
        self.for_each_world(|bits, s| {
            out.push((World::from_bits(u64::from(bits), self.num_vars), (s - self.max_score).exp() / self.mass))
        });
        out
    }
}

fn world_bits(w: &World) -> u32 {
    w.values().iter().take(32).enumerate().fold(0u32, |acc, (i, &b)| acc | u32::from(b) << i)
}
