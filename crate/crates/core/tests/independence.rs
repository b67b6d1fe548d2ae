mod common;

use dpo_core::fixtures;
use dpo_core::independence::{independence_pairs, is_strong, strong_witness, switch, verify_switch};
use dpo_core::presheaf::graph;
use dpo_core::rewriting::{abstraction_equivalent, Derivation};
use dpo_core::{Category, Error};

use common::is_pushout_oracle;

#[test]
fn pair_counts_on_fixtures() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let e = fixtures::der_e(&sys).unwrap();
    assert_eq!(independence_pairs(c, d.step(0), d.step(1)).len(), 0);
    assert_eq!(independence_pairs(c, d.step(1), d.step(2)).len(), 1);
    assert_eq!(independence_pairs(c, e.step(1), e.step(2)).len(), 2);
}

#[test]
fn unique_pair_follows_node_numbering() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let p = &independence_pairs(c, d.step(1), d.step(2))[0];
    // ρ2's left side lands on the nodes 1, 2 of the context of the loop step
    assert_eq!(p.i1.image_of("V", "1"), Some("1"));
    assert_eq!(p.i1.image_of("V", "2"), Some("2"));
    assert_eq!(c.compose(&p.i1, &d.step(1).g).unwrap(), d.step(2).m);
    assert_eq!(c.compose(&p.i0, &d.step(2).f).unwrap(), d.step(1).h);
}

#[test]
fn pairs_of_der_e_are_strong() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let e = fixtures::der_e(&sys).unwrap();
    for p in independence_pairs(c, e.step(1), e.step(2)) {
        let w = strong_witness(c, e.step(1), e.step(2), &p).unwrap();
        assert!(w.first_square_pushout && w.second_square_pushout && w.third_pushout_exists);
    }
}

#[test]
fn poset_pair_is_not_strong() {
    let sys = fixtures::poset_system().unwrap();
    let c = sys.category();
    let d = fixtures::poset_derivation(&sys).unwrap();
    let p = &independence_pairs(c, d.step(0), d.step(1))[0];
    let w = strong_witness(c, d.step(0), d.step(1), p).unwrap();
    assert!(w.first_square_pushout && w.second_square_pushout);
    assert!(!w.third_pushout_exists);
    assert!(!is_strong(c, d.step(0), d.step(1), p));
}

#[test]
fn witness_rejects_foreign_pairs() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let dp = fixtures::der_d_prime(&sys).unwrap();
    let p = independence_pairs(c, dp.step(1), dp.step(2)).remove(0);
    assert!(matches!(strong_witness(c, d.step(1), d.step(2), &p), Err(Error::PairInvalid(_))));
}

#[test]
fn switch_of_der_d_gives_der_e() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let e = fixtures::der_e(&sys).unwrap();
    let p = independence_pairs(c, d.step(1), d.step(2)).remove(0);
    let s = switch(c, d.step(1), d.step(2), &p).unwrap();
    assert_eq!(s.derivation.rule_names(), ["rho2", "rho1"]);
    let window = e.window(c, 1).unwrap();
    assert!(abstraction_equivalent(c, &s.derivation, &window).is_some());
    assert!(verify_switch(c, d.step(1), d.step(2), &s.derivation));
    for step in s.derivation.steps() {
        step.verify(c).unwrap();
        let (l, r) = (step.left_square(), step.right_square());
        assert!(is_pushout_oracle(&l.top, &l.left, &l.right, &l.bottom));
        assert!(is_pushout_oracle(&r.top, &r.left, &r.right, &r.bottom));
    }
}

#[test]
fn two_switches_of_der_e_differ() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let e = fixtures::der_e(&sys).unwrap();
    let results: Vec<Derivation<_>> = independence_pairs(c, e.step(1), e.step(2))
        .iter()
        .map(|p| switch(c, e.step(1), e.step(2), p).unwrap().derivation)
        .collect();
    assert!(abstraction_equivalent(c, &results[0], &results[1]).is_none());
    for r in &results {
        assert!(verify_switch(c, e.step(1), e.step(2), r));
    }
}

#[test]
fn switching_back_restores_the_original() {
    let sys = fixtures::disj_system().unwrap();
    let c = sys.category();
    let f = fixtures::der_f(&sys).unwrap();
    let p = independence_pairs(c, f.step(1), f.step(2)).remove(0);
    let s = switch(c, f.step(1), f.step(2), &p).unwrap();
    let back = switch(c, s.derivation.step(0), s.derivation.step(1), &s.pair).unwrap();
    assert!(abstraction_equivalent(c, &back.derivation, &f.window(c, 1).unwrap()).is_some());
}

#[test]
fn switch_is_unique_up_to_equivalence() {
    let sys = fixtures::coffee_system().unwrap();
    let c = sys.category();
    let d = fixtures::coffee_independent(&sys).unwrap();
    for i in 0..2 {
        for p in independence_pairs(c, d.step(i), d.step(i + 1)) {
            let a = switch(c, d.step(i), d.step(i + 1), &p).unwrap();
            let b = switch(c, d.step(i), d.step(i + 1), &p).unwrap();
            assert!(abstraction_equivalent(c, &a.derivation, &b.derivation).is_some());
        }
    }
}

#[test]
fn verify_switch_rejects_wrong_matches() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let g0 = graph(c.schema(), &["a", "c"], &[]).unwrap();
    // loops on a then c; the same order is not a switch of itself
    let d = fixtures::run_plan(&sys, &g0, &[("rho1", &[("V", "1", "a")]), ("rho1", &[("V", "1", "c")])]).unwrap();
    assert!(!verify_switch(c, d.step(0), d.step(1), &d));
    let p = independence_pairs(c, d.step(0), d.step(1)).remove(0);
    let s = switch(c, d.step(0), d.step(1), &p).unwrap();
    assert!(verify_switch(c, d.step(0), d.step(1), &s.derivation));
    assert!(!verify_switch(c, d.step(0), d.step(1), &d.prefix(1)));
}

#[test]
fn der_e_window_is_a_switch_of_der_d() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let e = fixtures::der_e(&sys).unwrap();
    assert!(verify_switch(c, d.step(1), d.step(2), &e.window(c, 1).unwrap()));
}
