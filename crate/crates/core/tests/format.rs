use serde_json::json;

use dpo_core::equivalence::canonical_sequence;
use dpo_core::fixtures;
use dpo_core::format::{
    derivation_from_json, derivation_hash, derivation_json, object_file_json, object_from_file_json, parse,
    schema_from_json, sequence_json, system_from_json, system_json, to_pretty, Codec,
};
use dpo_core::poset::PosetCat;
use dpo_core::presheaf::{PresheafCat, Schema};
use dpo_core::rewriting::{Derivation, RewritingSystem};
use dpo_core::Error;

fn corpus() -> Vec<(RewritingSystem<PresheafCat>, Derivation<PresheafCat>)> {
    let coffee = fixtures::coffee_system().unwrap();
    let merge = fixtures::merge_system().unwrap();
    let disj = fixtures::disj_system().unwrap();
    vec![
        (coffee.clone(), fixtures::coffee_derivation(&coffee).unwrap()),
        (merge.clone(), fixtures::der_d(&merge).unwrap()),
        (merge.clone(), fixtures::der_e(&merge).unwrap()),
        (disj.clone(), fixtures::der_f(&disj).unwrap()),
    ]
}

#[test]
fn derivations_round_trip_bit_exactly() {
    for (sys, d) in corpus() {
        let text = to_pretty(&derivation_json(&sys, &d));
        let (sys2, d2) = derivation_from_json::<PresheafCat>(&parse(&text).unwrap()).unwrap();
        assert_eq!(to_pretty(&derivation_json(&sys2, &d2)), text);
        assert_eq!(d2.start(), d.start());
        assert_eq!(derivation_hash(sys.category(), &d), derivation_hash(sys2.category(), &d2));
    }
}

#[test]
fn poset_derivation_round_trips() {
    let sys = fixtures::poset_system().unwrap();
    let d = fixtures::poset_derivation(&sys).unwrap();
    let v = derivation_json(&sys, &d);
    let (sys2, d2) = derivation_from_json::<PosetCat>(&v).unwrap();
    assert_eq!(derivation_json(&sys2, &d2), v);
}

#[test]
fn systems_and_objects_round_trip() {
    let sys = fixtures::coffee_system().unwrap();
    let v = system_json(&sys);
    let back = system_from_json::<PresheafCat>(&v).unwrap();
    assert_eq!(system_json(&back), v);

    let g0 = fixtures::coffee_g0(&sys).unwrap();
    let file = object_file_json(sys.category(), &g0);
    assert_eq!(object_from_file_json(sys.category(), &file).unwrap(), g0);
}

#[test]
fn tampered_squares_are_rejected() {
    let sys = fixtures::merge_system().unwrap();
    let d = fixtures::der_d(&sys).unwrap();
    let mut v = derivation_json(&sys, &d);
    // move the co-match of the loop step to the other node
    v["steps"][1]["h"]["map"]["V"]["1"] = json!("1");
    assert!(derivation_from_json::<PresheafCat>(&v).is_err());

    let mut v = derivation_json(&sys, &d);
    v["steps"][0]["rule"] = json!("rho9");
    assert!(matches!(derivation_from_json::<PresheafCat>(&v), Err(Error::UnknownName(_))));
}

#[test]
fn built_in_schema_names() {
    assert_eq!(schema_from_json(&json!("graph")).unwrap(), Schema::graph());
    assert_eq!(schema_from_json(&json!("egraph")).unwrap(), Schema::egraph());
    assert_eq!(
        schema_from_json(&json!("labelled:w,b")).unwrap(),
        Schema::labelled_graph(&["w", "b"]).unwrap()
    );
    assert!(schema_from_json(&json!("tree")).is_err());
    let spec = serde_json::to_value(Schema::egraph().to_spec()).unwrap();
    assert_eq!(schema_from_json(&spec).unwrap(), Schema::egraph());
}

#[test]
fn object_shape() {
    let sys = fixtures::merge_system().unwrap();
    let c = sys.category();
    let g = dpo_core::presheaf::graph(c.schema(), &["1", "2"], &[("e", "1", "2")]).unwrap();
    assert_eq!(
        c.object_json(&g),
        json!({"carriers": {"E": ["e"], "V": ["1", "2"]}, "action": {"s": {"e": "1"}, "t": {"e": "2"}}})
    );
    let bad = json!({"carriers": {"E": ["e"], "V": ["1"]}, "action": {"s": {"e": "1"}, "t": {"e": "9"}}});
    assert!(c.object_from_json(&bad).is_err());
}

#[test]
fn sequence_dump_lists_positions_and_hashes() {
    let sys = fixtures::disj_system().unwrap();
    let c = sys.category();
    let f2 = fixtures::der_f_second(&sys).unwrap();
    let fp = fixtures::der_f_prime(&sys).unwrap();
    let seq = canonical_sequence(c, &f2, &fp, 3).unwrap();
    let v = sequence_json(&sys, &seq);
    assert_eq!(v["positions"], json!([1, 0, 1]));
    // s1 s0 s1 is the reversal under either composition order
    assert_eq!(v["permutation"], json!([2, 1, 0]));
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
    assert_eq!(v["steps"][2]["derivation"], json!(derivation_hash(c, seq.end())));
    assert_eq!(v["steps"][0]["derivation"].as_str().unwrap().len(), 64);
}
