//! The office delivery robot as a weighted belief base.
//!
//! Locations `room1`, `room2`, corridors `A`, `B`, steps `0..=horizon`.
//! Variables are numbered in this order:
//!
//! ```text
//! 1 crowded(A)
//! 2 crowded(B)
//! then for t in 0..=horizon:
//!     robot-at(room1)_t, robot-at(room2)_t, package-delivered_t
//! then for t in 0..horizon:
//!     move(room1,room2,A)_t, move(room1,room2,B)_t,
//!     move(room2,room1,A)_t, move(room2,room1,B)_t, deliver_t
//! ```
//!
//! Delivery happens in `room2`. Implications with a conjunctive consequent
//! become one clause per conjunct, each carrying the formula's weight.

use pexpl_core::formula::{BeliefBase, Clause, Lit, Var, WeightedClause};

/// `w1`, `w2` for crowded(A), crowded(B); `w3`/`w4` for succeeding/staying
/// in a crowded corridor, `w5`/`w6` for a clear one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotWeights(pub [f64; 6]);

impl Default for RobotWeights {
    fn default() -> Self {
        RobotWeights([3.0, 0.5, 0.5, 3.0, 3.0, 0.5])
    }
}

#[derive(Debug, Clone)]
pub struct OfficeRobot {
    pub horizon: usize,
    pub base: BeliefBase,
    /// `names[i]` names variable `i + 1`.
    pub names: Vec<String>,
}

impl OfficeRobot {
    pub fn var(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n == name).map(|i| Var::new(i as u32 + 1))
    }
}

struct Builder {
    names: Vec<String>,
    entries: Vec<WeightedClause>,
}

impl Builder {
    fn var(&mut self, name: String) -> Var {
        self.names.push(name);
        Var::new(self.names.len() as u32)
    }

    fn clause(lits: &[Lit]) -> Clause {
        Clause::new(lits.iter().copied()).expect("encoding clauses are not tautologies")
    }

    fn hard(&mut self, lits: &[Lit]) {
        self.entries.push(WeightedClause::hard(Self::clause(lits)));
    }

    fn soft(&mut self, lits: &[Lit], w: f64) {
        self.entries.push(WeightedClause::soft(Self::clause(lits), w).expect("weights validated"));
    }
}

struct Move {
    from: usize,
    to: usize,
    corridor: Var,
    var: Var,
}

/// Panics if `horizon` is 0 or a weight is not positive and finite.
pub fn build_office_robot(horizon: usize, weights: RobotWeights) -> OfficeRobot {
    assert!(horizon >= 1, "horizon must be at least 1");
    let [w1, w2, w3, w4, w5, w6] = weights.0;
    assert!(weights.0.iter().all(|w| *w > 0.0 && w.is_finite()), "weights must be positive");
    let mut b = Builder { names: Vec::new(), entries: Vec::new() };

    let crowded = [b.var("crowded(A)".into()), b.var("crowded(B)".into())];
    let mut at = Vec::new();
    let mut delivered = Vec::new();
    for t in 0..=horizon {
        at.push([b.var(format!("robot-at(room1)_{t}")), b.var(format!("robot-at(room2)_{t}"))]);
        delivered.push(b.var(format!("package-delivered_{t}")));
    }
    let mut moves: Vec<Vec<Move>> = Vec::new();
    let mut deliver = Vec::new();
    for t in 0..horizon {
        let mut ms = Vec::new();
        for (from, to) in [(0, 1), (1, 0)] {
            for (c, corridor) in ["A", "B"].into_iter().zip(crowded) {
                let var = b.var(format!("move(room{},room{},{c})_{t}", from + 1, to + 1));
                ms.push(Move { from, to, corridor, var });
            }
        }
        moves.push(ms);
        deliver.push(b.var(format!("deliver_{t}")));
    }

    // Initial state and beliefs about the corridors.
    b.hard(&[at[0][0].pos()]);
    b.hard(&[at[0][1].neg()]);
    b.hard(&[delivered[0].neg()]);
    b.soft(&[crowded[0].pos()], w1);
    b.soft(&[crowded[1].pos()], w2);
    b.hard(&[delivered[horizon].pos()]);

    for t in 0..horizon {
        for m in &moves[t] {
            let stay = at[t + 1][m.from];
            let arrive = at[t + 1][m.to];
            b.hard(&[m.var.neg(), at[t][m.from].pos()]);
            // Condition literal negated: crowded first, then clear.
            for (cond, succeed, fail) in [(m.corridor.neg(), w3, w4), (m.corridor.pos(), w5, w6)] {
                b.soft(&[m.var.neg(), cond, arrive.pos()], succeed);
                b.soft(&[m.var.neg(), cond, stay.neg()], succeed);
                b.soft(&[m.var.neg(), cond, stay.pos()], fail);
            }
        }
        b.hard(&[deliver[t].neg(), at[t][1].pos()]);
        b.hard(&[deliver[t].neg(), delivered[t + 1].pos()]);

        // Frame axioms.
        #[allow(clippy::needless_range_loop)]
        for l in 0..2 {
            let mut leave = vec![at[t][l].neg(), at[t + 1][l].pos()];
            leave.extend(moves[t].iter().filter(|m| m.from == l).map(|m| m.var.pos()));
            b.hard(&leave);
            let mut enter = vec![at[t][l].pos(), at[t + 1][l].neg()];
            enter.extend(moves[t].iter().filter(|m| m.to == l).map(|m| m.var.pos()));
            b.hard(&enter);
        }
        b.hard(&[delivered[t].neg(), delivered[t + 1].pos()]);
        b.hard(&[delivered[t].pos(), delivered[t + 1].neg(), deliver[t].pos()]);

        let mut acts: Vec<Var> = moves[t].iter().map(|m| m.var).collect();
        acts.push(deliver[t]);
        for i in 0..acts.len() {
            for j in i + 1..acts.len() {
                b.hard(&[acts[i].neg(), acts[j].neg()]);
            }
        }
    }
    // The robot is in at most one room.
    for loc in &at {
        b.hard(&[loc[0].neg(), loc[1].neg()]);
    }

    let n = b.names.len() as u32;
    OfficeRobot { horizon, base: BeliefBase::new(n, b.entries), names: b.names }
}
