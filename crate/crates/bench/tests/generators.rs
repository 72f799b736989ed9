use std::collections::HashSet;

use pexpl_bench::{assign_random_weights, backbone_query, gen_entailing_instance, gen_random_cnf, make_human_scenario};
use pexpl_core::formula::{write_cnf, write_wcnf, KnowledgeBase, Weight};
use pexpl_core::sat::entails;
use proptest::prelude::*;

#[test]
fn same_seed_same_bytes() {
    let a = gen_random_cnf(20, 60, 3, 7).unwrap();
    let b = gen_random_cnf(20, 60, 3, 7).unwrap();
    assert_eq!(write_cnf(&a), write_cnf(&b));
    assert_ne!(write_cnf(&a), write_cnf(&gen_random_cnf(20, 60, 3, 8).unwrap()));
}

#[test]
fn width_one_gives_units() {
    let kb = gen_random_cnf(5, 5, 1, 0).unwrap();
    let vars: HashSet<u32> = kb.clauses().iter().map(|c| c.lits()[0].var().id()).collect();
    assert_eq!(vars.len(), 5);
}

#[test]
fn impossible_parameters_are_rejected() {
    assert!(gen_random_cnf(3, 1, 4, 0).is_err());
    assert!(gen_random_cnf(3, 1, 0, 0).is_err());
    assert!(gen_random_cnf(4, 7, 3, 0).is_err());
    assert!(make_human_scenario(&gen_random_cnf(5, 5, 2, 0).unwrap(), 6, 0).is_err());
    assert!(assign_random_weights(&gen_random_cnf(5, 5, 2, 0).unwrap(), 2.0, 1.0, 0).is_err());
}

#[test]
fn scenario_one_on_hundred_clauses() {
    // Ten removed; 9 of the remaining 90 lose one of their five literals.
    let kb = gen_random_cnf(30, 100, 5, 11).unwrap();
    let h = make_human_scenario(&kb, 1, 3).unwrap();
    assert_eq!(h.len(), 90);
    let shortened = h.clauses().iter().filter(|c| c.len() == 4).count();
    assert_eq!(shortened, 9);
}

#[test]
fn scenario_five_halves() {
    let kb = gen_random_cnf(10, 10, 3, 1).unwrap();
    assert_eq!(make_human_scenario(&kb, 5, 2).unwrap().len(), 5);
}

#[test]
fn short_clauses_are_not_pruned() {
    // len / 5 is zero below five literals.
    let kb = gen_random_cnf(12, 40, 3, 5).unwrap();
    let h = make_human_scenario(&kb, 5, 9).unwrap();
    let original: HashSet<_> = kb.clauses().iter().collect();
    assert!(h.clauses().iter().all(|c| original.contains(c)));
}

#[test]
fn equal_bounds_give_exact_weights() {
    let kb = gen_random_cnf(6, 8, 2, 0).unwrap();
    let b = assign_random_weights(&kb, 2.5, 2.5, 4).unwrap();
    assert!(b.entries().iter().all(|e| e.weight == Weight::Soft(2.5)));
}

#[test]
fn entailing_instance_at_scale() {
    let (kb, q, _) = gen_entailing_instance(40, 160, 3, 3, 0).unwrap();
    assert_eq!(kb.len(), 160);
    assert!(entails(&kb, &q).unwrap());
}

#[test]
fn empty_backbone_is_reported() {
    let kb = KnowledgeBase::from_dimacs(2, &[&[1, 2]]).unwrap();
    assert!(matches!(backbone_query(&kb, 2, 0), Err(pexpl_bench::BenchError::EmptyBackbone)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_cnf_shape(n in 3u32..15, width in 1usize..4, m in 1usize..30, seed: u64) {
        prop_assume!(width <= n as usize);
        let cap = (0..width as u64).fold(1u64, |a, i| a * (n as u64 - i) / (i + 1));
        prop_assume!(m as u64 <= cap);
        let kb = gen_random_cnf(n, m, width, seed).unwrap();
        prop_assert_eq!(kb.len(), m);
        let mut sets = HashSet::new();
        for c in kb.clauses() {
            prop_assert_eq!(c.len(), width);
            prop_assert!(c.max_var() <= n);
            let vars: Vec<u32> = c.lits().iter().map(|l| l.var().id()).collect();
            prop_assert!(sets.insert(vars));
        }
        prop_assert_eq!(write_cnf(&kb), write_cnf(&gen_random_cnf(n, m, width, seed).unwrap()));
    }

    #[test]
    fn weights_in_range(m in 1usize..20, seed: u64, lo in 0.1f64..3.0, span in 0.0f64..3.0) {
        let kb = gen_random_cnf(8, m, 2, seed).unwrap();
        let b = assign_random_weights(&kb, lo, lo + span, seed).unwrap();
        prop_assert_eq!(b.len(), m);
        for (e, c) in b.entries().iter().zip(kb.clauses()) {
            prop_assert_eq!(&e.clause, c);
            let w = e.weight.soft().unwrap();
            prop_assert!(w >= lo && w <= lo + span);
        }
        prop_assert_eq!(write_wcnf(&b), write_wcnf(&assign_random_weights(&kb, lo, lo + span, seed).unwrap()));
    }

    #[test]
    fn scenario_counts(m in 1usize..60, level in 1u32..=5, seed: u64) {
        let kb = gen_random_cnf(12, m, 5, seed).unwrap();
        let h = make_human_scenario(&kb, level, seed).unwrap();
        let p = 10 * level as usize;
        let kept = m - m * p / 100;
        prop_assert_eq!(h.len(), kept);
        prop_assert_eq!(h.clauses().iter().filter(|c| c.len() == 4).count(), kept * p / 100);
        // Every human clause is a subset of some agent clause.
        for c in h.clauses() {
            prop_assert!(kb.clauses().iter().any(|a| c.lits().iter().all(|l| a.lits().contains(l))));
        }
    }

    #[test]
    fn backbone_queries_are_entailed(seed in 0u64..200) {
        let kb = gen_random_cnf(10, 40, 3, seed).unwrap();
        prop_assume!(pexpl_core::sat::is_consistent(&kb));
        if let Ok(q) = backbone_query(&kb, 3, seed) {
            prop_assert!(q.clauses().len() <= 3);
            prop_assert!(entails(&kb, &q).unwrap());
        }
    }
}
