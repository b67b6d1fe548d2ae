mod common;

use dpo_core::fixtures;
use dpo_core::format::{derivation_json, to_pretty};
use dpo_core::presheaf::{graph, labelled_graph, PresheafCat, PresheafMorphism};
use dpo_core::rewriting::{abstraction_equivalent, Derivation, MatchSelector, RewritingSystem, Rule};
use dpo_core::{Category, Error};

use common::graph_schema;

#[test]
fn non_injective_match_of_brown_sugar() {
    let sys = fixtures::coffee_system().unwrap();
    let c = sys.category();
    let d = fixtures::coffee_derivation(&sys).unwrap();
    let g1 = d.step(0).target(c);
    let ms = sys.find_matches(sys.rule("rho_b").unwrap(), g1, false);
    assert_eq!(ms.len(), 1);
    assert!(!c.is_mono(&ms[0]));
}

#[test]
fn one_match_per_node() {
    let sys = fixtures::merge_system().unwrap();
    let d = fixtures::der_d(&sys).unwrap();
    let g1 = d.step(0).target(sys.category());
    assert_eq!(sys.find_matches(sys.rule("rho1").unwrap(), g1, false).len(), 2);
}

#[test]
fn dangling_filter_removes_all_matches() {
    let schema = graph_schema();
    let cat = PresheafCat::from_arc(schema.clone());
    let node = graph(&schema, &["1"], &[]).unwrap();
    let empty = graph(&schema, &[], &[]).unwrap();
    let kill = Rule::new(
        &cat,
        "kill",
        PresheafMorphism::by_names(&empty, &node, &[]).unwrap(),
        PresheafMorphism::by_names(&empty, &empty, &[]).unwrap(),
    )
    .unwrap();
    let sys = RewritingSystem::new(cat, vec![kill]).unwrap();
    let host = graph(&schema, &["a", "b"], &[("x", "a", "b"), ("y", "b", "a")]).unwrap();
    let rule = sys.rule("kill").unwrap();
    assert_eq!(sys.find_matches(rule, &host, false).len(), 2);
    assert!(sys.find_matches(rule, &host, true).is_empty());
    let m = sys.find_matches(rule, &host, false).remove(0);
    assert!(matches!(sys.apply(rule, &m), Err(Error::DanglingViolation(_))));
}

#[test]
fn rules_must_be_left_linear() {
    let schema = graph_schema();
    let cat = PresheafCat::from_arc(schema.clone());
    let two = graph(&schema, &["1", "2"], &[]).unwrap();
    let one = graph(&schema, &["1"], &[]).unwrap();
    let collapse = PresheafMorphism::by_names(&two, &one, &[("V", "2", "1")]).unwrap();
    let id = PresheafMorphism::by_names(&two, &two, &[]).unwrap();
    assert!(matches!(Rule::new(&cat, "bad", collapse.clone(), id.clone()), Err(Error::InvalidRule { .. })));
    let ok = Rule::new(&cat, "fuse", id, collapse).unwrap();
    assert!(!ok.is_linear());
}

#[test]
fn white_sugar_step() {
    let sys = fixtures::coffee_system().unwrap();
    let c = sys.category();
    let g0 = fixtures::coffee_g0(&sys).unwrap();
    let d = sys.derive(&g0, &[("rho_w", MatchSelector::Index(0))]).unwrap();
    let want = labelled_graph(c.schema(), &["12"], &[("b", "b", "12", "12"), ("c", "c", "12", "12"), ("s", "s", "12", "12")]).unwrap();
    assert!(c.is_isomorphic(d.end(c), &want));
    d.verify(c).unwrap();
}

#[test]
fn identity_rule_preserves_the_host() {
    let schema = graph_schema();
    let cat = PresheafCat::from_arc(schema.clone());
    let k = graph(&schema, &["1"], &[("l", "1", "1")]).unwrap();
    let id = PresheafMorphism::by_names(&k, &k, &[]).unwrap();
    let sys = RewritingSystem::new(cat, vec![Rule::new(&PresheafCat::from_arc(schema.clone()), "id", id.clone(), id).unwrap()]).unwrap();
    let host = graph(&schema, &["a", "b"], &[("x", "a", "a"), ("y", "a", "b")]).unwrap();
    let d = sys.derive(&host, &[("id", MatchSelector::Index(0))]).unwrap();
    assert!(sys.category().is_isomorphic(d.end(sys.category()), &host));
}

#[test]
fn poset_rule_without_pushout() {
    let sys = fixtures::poset_system().unwrap();
    let c = "c".to_string();
    let r = sys.derive(&c, &[("up_b", MatchSelector::Index(0))]);
    assert!(matches!(r, Err(Error::NoPushout(_))));
}

#[test]
fn coffee_plan_ends_ready_to_drink() {
    let sys = fixtures::coffee_system().unwrap();
    let c = sys.category();
    let d = fixtures::coffee_derivation(&sys).unwrap();
    let end = d.end(c);
    let count = |sort: &str| end.carrier_of(sort).unwrap().len();
    assert_eq!((count("V"), count("r"), count("s"), count("c"), count("w"), count("b")), (1, 1, 1, 0, 0, 0));
}

#[test]
fn merge_plan_by_indices() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let g0 = graph(c.schema(), &["1"], &[]).unwrap();
    let plan = [
        ("rho0", MatchSelector::Index(0)),
        ("rho1", MatchSelector::Index(1)),
        // index 0 sends both nodes of ρ2 to node 1
        ("rho2", MatchSelector::Index(1)),
    ];
    let d = sys.derive(&g0, &plan).unwrap();
    assert!(abstraction_equivalent(c, &d, &fixtures::der_d(&sys).unwrap()).is_some());
    assert!(matches!(
        sys.derive(&g0, &[("rho1", MatchSelector::Index(5))]),
        Err(Error::MatchSelectorOutOfRange { index: 5, available: 1 })
    ));
    assert!(matches!(sys.derive(&g0, &[("nope", MatchSelector::Index(0))]), Err(Error::UnknownName(_))));
    assert!(sys.derive(&g0, &[]).unwrap().is_empty());
}

#[test]
fn same_match_gives_equivalent_results() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let again = sys.apply(&d.step(0).rule, &d.step(0).m).unwrap();
    let one = Derivation::new(c, d.start().clone(), vec![again]).unwrap();
    let fam = abstraction_equivalent(c, &d.prefix(1), &one).unwrap();
    assert_eq!(fam.objects[0], c.identity(d.start()));
}

#[test]
fn apply_is_deterministic() {
    let sys = fixtures::disj_system().unwrap();
    let a = to_pretty(&derivation_json(&sys, &fixtures::der_f(&sys).unwrap()));
    let b = to_pretty(&derivation_json(&sys, &fixtures::der_f(&sys).unwrap()));
    assert_eq!(a, b);
}

#[test]
fn abstraction_equivalence_on_the_corpus() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let dp = fixtures::der_d_prime(&sys).unwrap();
    let e = fixtures::der_e(&sys).unwrap();
    assert!(abstraction_equivalent(c, &d, &d).is_some());
    assert!(abstraction_equivalent(c, &d, &dp).is_none());
    assert!(abstraction_equivalent(c, &d, &e).is_none());
    let switched = dpo_core::equivalence::apply_switch_at_index(c, &d, 1, 0).unwrap().0;
    assert!(abstraction_equivalent(c, &switched, &e).is_some());
    assert!(abstraction_equivalent(c, &e, &switched).is_some());
    let twice = dpo_core::equivalence::apply_switch_at_index(c, &switched, 1, 0).unwrap().0;
    // transitivity through the switched copy
    let back = [&d, &dp].iter().filter(|x| abstraction_equivalent(c, &twice, x).is_some()).count();
    assert_eq!(back, 1);
}

#[test]
fn chains_are_checked() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let d = fixtures::der_d(&sys).unwrap();
    let steps = vec![d.step(0).clone(), d.step(2).clone()];
    assert!(Derivation::new(c, d.start().clone(), steps).is_err());
    assert_eq!(d.rule_names(), ["rho0", "rho1", "rho2"]);
    assert_eq!(d.objects(c).len(), 4);
}
