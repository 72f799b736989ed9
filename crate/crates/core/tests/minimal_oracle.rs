mod common;

use std::collections::BTreeSet;

use common::*;
use pexpl_core::formula::Clause;
use pexpl_core::minimal::{enumerate_mcses, get_mcs, min_hitting_set, HittingSetInstance, SoftHardProblem};
use proptest::prelude::*;

fn sat_subset(soft: &[Clause], hard: &[Clause], mask: u32, n: u32) -> bool {
    let mut all: Vec<Clause> = hard.to_vec();
    all.extend(soft.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| c.clone()));
    brute_sat(&all, n)
}

fn to_vec(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All MCSes and MUSes by scanning every subset.
fn brute_mcs_mus(soft: &[Clause], hard: &[Clause], n: u32) -> (BTreeSet<Vec<usize>>, BTreeSet<Vec<usize>>) {
    let m = soft.len();
    let full = (1u32 << m) - 1;
    let sat: Vec<bool> = (0..=full).map(|mask| sat_subset(soft, hard, mask, n)).collect();
    let mut mcses = BTreeSet::new();
    let mut muses = BTreeSet::new();
    for mask in 0..=full {
        let keep = full & !mask;
        // mask is a correction set if the kept clauses are satisfiable and
        // putting back any removed clause breaks that.
        if sat[keep as usize] && to_vec(mask, m).iter().all(|&i| !sat[(keep | 1 << i) as usize]) {
            mcses.insert(to_vec(mask, m));
        }
        if !sat[mask as usize] && to_vec(mask, m).iter().all(|&i| sat[(mask & !(1 << i)) as usize]) {
            muses.insert(to_vec(mask, m));
        }
    }
    (mcses, muses)
}

fn minimal_hitting_sets(collection: &BTreeSet<Vec<usize>>, m: usize) -> BTreeSet<Vec<usize>> {
    let hits = |mask: u32| collection.iter().all(|s| s.iter().any(|&i| mask >> i & 1 == 1));
    let mut out = BTreeSet::new();
    for mask in 0..1u32 << m {
        if hits(mask) && to_vec(mask, m).iter().all(|&i| !hits(mask & !(1 << i))) {
            out.insert(to_vec(mask, m));
        }
    }
    out
}

fn problem_strategy() -> impl Strategy<Value = (Vec<Clause>, Vec<Clause>)> {
    (prop::collection::vec(clause_strategy(6, 3), 1..=9), prop::collection::vec(clause_strategy(6, 2), 0..=2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn mcs_contract((soft, hard) in problem_strategy(), seed_mask in 0u32..512) {
        let Ok(p) = SoftHardProblem::new(soft.clone(), hard.clone()) else {
            prop_assert!(!brute_sat(&hard, 6));
            return Ok(());
        };
        let m = soft.len();
        let seed: Vec<usize> = to_vec(seed_mask & ((1 << m) - 1), m);
        let seed_mask = seed.iter().fold(0u32, |a, &i| a | 1 << i);
        match get_mcs(&seed, &p) {
            Err(_) => prop_assert!(!sat_subset(&soft, &hard, seed_mask, 6)),
            Ok(c) => {
                let mask = c.indices.iter().fold(0u32, |a, &i| a | 1 << i);
                prop_assert_eq!(mask & seed_mask, 0);
                let keep = ((1u32 << m) - 1) & !mask;
                prop_assert!(sat_subset(&soft, &hard, keep, 6));
                for &i in &c.indices {
                    prop_assert!(!sat_subset(&soft, &hard, keep | 1 << i, 6));
                }
            }
        }
    }

    #[test]
    fn duality((soft, hard) in problem_strategy()) {
        let Ok(p) = SoftHardProblem::new(soft.clone(), hard.clone()) else { return Ok(()); };
        let (mcs_bf, mus_bf) = brute_mcs_mus(&soft, &hard, 6);
        let got: BTreeSet<Vec<usize>> = enumerate_mcses(&p, None).unwrap().into_iter().map(|c| c.indices).collect();
        prop_assert_eq!(&got, &mcs_bf);
        if !mus_bf.is_empty() {
            prop_assert_eq!(minimal_hitting_sets(&mcs_bf, soft.len()), mus_bf.clone());
            prop_assert_eq!(minimal_hitting_sets(&mus_bf, soft.len()), mcs_bf);
        }
    }

    #[test]
    fn hitting_set_minimum(collection in prop::collection::vec(prop::collection::btree_set(0usize..12, 1..5), 0..=10)) {
        let collection: Vec<Vec<usize>> = collection.into_iter().map(|s| s.into_iter().collect()).collect();
        let got = min_hitting_set(&HittingSetInstance::new(collection.clone())).unwrap();
        prop_assert!(collection.iter().all(|s| s.iter().any(|e| got.contains(e))));
        let hits = |mask: u32| collection.iter().all(|s| s.iter().any(|&e| mask >> e & 1 == 1));
        let best = (0..1u32 << 12)
            .filter(|&m| hits(m))
            .min_by_key(|&m| (m.count_ones(), to_vec(m, 12)))
            .unwrap();
        prop_assert_eq!(got, to_vec(best, 12));
    }
}

#[test]
fn enumerate_respects_limit() {
    let soft = vec![cl(&[1]), cl(&[-1]), cl(&[2]), cl(&[-2])];
    let p = SoftHardProblem::new(soft, vec![]).unwrap();
    assert_eq!(enumerate_mcses(&p, None).unwrap().len(), 4);
    assert_eq!(enumerate_mcses(&p, Some(2)).unwrap().len(), 2);
}
