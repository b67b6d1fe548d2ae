//! Ready-made systems and derivations used by the tests and the CLI.
//!
//! Element identities follow the usual drawings: nodes are numbered, edges
//! are named after their label or role. Matches that are ambiguous are given
//! explicitly by name.

use std::sync::Arc;

use crate::error::Result;
use crate::poset::{FinitePoset, PosetCat};
use crate::presheaf::{graph, labelled_graph, Presheaf, PresheafCat, PresheafMorphism, Schema};
use crate::rewriting::{Derivation, MatchSelector, RewritingSystem, Rule};

type Pins<'a> = &'a [(&'a str, &'a str, &'a str)];

/// A rule whose legs send every element to the equally named one, except
/// for the listed `(sort, from, to)` overrides.
pub fn named_rule(
    cat: &PresheafCat,
    name: &str,
    (k, l, r): (&Presheaf, &Presheaf, &Presheaf),
    l_pins: Pins<'_>,
    r_pins: Pins<'_>,
) -> Result<Rule<PresheafCat>> {
    let lm = PresheafMorphism::by_names(k, l, l_pins)?;
    let rm = PresheafMorphism::by_names(k, r, r_pins)?;
    Rule::new(cat, name, lm, rm)
}

/// Extend `d` by one step of `rule` at the match given by name overrides.
pub fn step_at(
    sys: &RewritingSystem<PresheafCat>,
    d: Derivation<PresheafCat>,
    rule: &str,
    pins: Pins<'_>,
) -> Result<Derivation<PresheafCat>> {
    let cat = sys.category();
    let here = d.end(cat).clone();
    let r = sys.rule(rule)?.clone();
    let m = PresheafMorphism::by_names(r.lhs(cat), &here, pins)?;
    let s = sys.apply(&r, &m)?;
    let mut steps = d.steps().to_vec();
    steps.push(s);
    Derivation::new(cat, d.start().clone(), steps)
}

/// Run a whole plan of `(rule, pins)` from `g0`.
pub fn run_plan(
    sys: &RewritingSystem<PresheafCat>,
    g0: &Presheaf,
    plan: &[(&str, Pins<'_>)],
) -> Result<Derivation<PresheafCat>> {
    plan.iter().try_fold(Derivation::empty(g0.clone()), |d, (rule, pins)| {
        step_at(sys, d, rule, pins)
    })
}

// ---------------------------------------------------------------- coffee

pub const COFFEE_LABELS: [&str; 5] = ["w", "b", "c", "s", "r"];

pub fn coffee_schema() -> Arc<Schema> {
    Arc::new(Schema::labelled_graph(&COFFEE_LABELS).expect("labels are non-empty"))
}

/// Sugar-dissolving rules `ρw`, `ρb` and the stirring rule `ρr`.
pub fn coffee_system() -> Result<RewritingSystem<PresheafCat>> {
    let schema = coffee_schema();
    let cat = PresheafCat::from_arc(schema.clone());
    let dissolve = |label: &str| -> Result<Rule<PresheafCat>> {
        let l = labelled_graph(&schema, &["1", "2"], &[(label, label, "1", "1"), ("s", "s", "1", "2")])?;
        let k = labelled_graph(&schema, &["1", "2"], &[("s", "s", "1", "2")])?;
        let r = labelled_graph(&schema, &["12"], &[("s", "s", "12", "12")])?;
        named_rule(
            &cat,
            &format!("rho_{label}"),
            (&k, &l, &r),
            &[],
            &[("V", "1", "12"), ("V", "2", "12")],
        )
    };
    let stir = {
        let l = labelled_graph(&schema, &["1"], &[("c", "c", "1", "1"), ("s", "s", "1", "1")])?;
        let k = labelled_graph(&schema, &["1"], &[("s", "s", "1", "1")])?;
        let r = labelled_graph(&schema, &["1"], &[("r", "r", "1", "1"), ("s", "s", "1", "1")])?;
        named_rule(&cat, "rho_r", (&k, &l, &r), &[], &[])?
    };
    let rules = vec![dissolve("w")?, dissolve("b")?, stir];
    RewritingSystem::new(cat, rules)
}

/// Node 1 carries the white and brown sugar, node 2 the coffee.
pub fn coffee_g0(sys: &RewritingSystem<PresheafCat>) -> Result<Presheaf> {
    labelled_graph(
        sys.category().schema(),
        &["1", "2"],
        &[
            ("w", "w", "1", "1"),
            ("b", "b", "1", "1"),
            ("c", "c", "2", "2"),
            ("s", "s", "1", "2"),
        ],
    )
}

/// Expected intermediate graphs, up to isomorphism.
pub fn coffee_expected(sys: &RewritingSystem<PresheafCat>) -> Result<[Presheaf; 3]> {
    let s = sys.category().schema();
    Ok([
        labelled_graph(s, &["12"], &[("b", "b", "12", "12"), ("c", "c", "12", "12"), ("s", "s", "12", "12")])?,
        labelled_graph(s, &["12"], &[("c", "c", "12", "12"), ("s", "s", "12", "12")])?,
        labelled_graph(s, &["12"], &[("r", "r", "12", "12"), ("s", "s", "12", "12")])?,
    ])
}

/// `ρw, ρb, ρr` from [`coffee_g0`], each at its unique match.
pub fn coffee_derivation(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    let g0 = coffee_g0(sys)?;
    sys.derive(
        &g0,
        &[
            ("rho_w", MatchSelector::Index(0)),
            ("rho_b", MatchSelector::Index(0)),
            ("rho_r", MatchSelector::Index(0)),
        ],
    )
}

/// A coffee cup with its own `s` loop, and two sugar nodes each pointing at
/// it: every pair of the three steps is independent.
pub fn coffee_independent(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    let g0 = labelled_graph(
        sys.category().schema(),
        &["1", "2", "3"],
        &[
            ("c", "c", "1", "1"),
            ("s", "s0", "1", "1"),
            ("s", "s2", "2", "1"),
            ("s", "s3", "3", "1"),
            ("w", "w", "2", "2"),
            ("b", "b", "3", "3"),
        ],
    )?;
    run_plan(
        sys,
        &g0,
        &[
            ("rho_w", &[("V", "1", "2"), ("V", "2", "1"), ("s", "s", "s2")]),
            ("rho_b", &[("V", "1", "3"), ("V", "2", "1"), ("s", "s", "s3")]),
            ("rho_r", &[("s", "s", "s0")]),
        ],
    )
}

// ------------------------------------------------- node creation / merge

pub fn graph_schema() -> Arc<Schema> {
    Arc::new(Schema::graph())
}

/// `ρ0` adds a node with an edge from the matched one, `ρ1` adds a loop,
/// `ρ2` merges two nodes.
pub fn merge_system() -> Result<RewritingSystem<PresheafCat>> {
    let schema = graph_schema();
    let cat = PresheafCat::from_arc(schema.clone());
    let one = graph(&schema, &["1"], &[])?;
    let two = graph(&schema, &["1", "2"], &[])?;
    let rho0 = named_rule(
        &cat,
        "rho0",
        (&one, &one, &graph(&schema, &["1", "2"], &[("e", "1", "2")])?),
        &[],
        &[],
    )?;
    let rho1 = named_rule(
        &cat,
        "rho1",
        (&one, &one, &graph(&schema, &["1"], &[("l", "1", "1")])?),
        &[],
        &[],
    )?;
    let rho2 = named_rule(
        &cat,
        "rho2",
        (&two, &two, &graph(&schema, &["12"], &[])?),
        &[],
        &[("V", "1", "12"), ("V", "2", "12")],
    )?;
    RewritingSystem::new(cat, vec![rho0, rho1, rho2])
}

fn single_node(sys: &RewritingSystem<PresheafCat>) -> Result<Presheaf> {
    graph(sys.category().schema(), &["1"], &[])
}

/// `ρ0`, then `ρ1` on the new node 2, then `ρ2` merging 1 and 2.
pub fn der_d(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    run_plan(
        sys,
        &single_node(sys)?,
        &[("rho0", &[]), ("rho1", &[("V", "1", "2")]), ("rho2", &[])],
    )
}

/// `ρ0`, then `ρ2`, then `ρ1` on the merged node.
pub fn der_e(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    run_plan(sys, &single_node(sys)?, &[("rho0", &[]), ("rho2", &[]), ("rho1", &[])])
}

/// `ρ0`, then `ρ1` on the original node 1, then `ρ2`.
pub fn der_d_prime(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    run_plan(
        sys,
        &single_node(sys)?,
        &[("rho0", &[]), ("rho1", &[]), ("rho2", &[])],
    )
}

// ------------------------------------------------------ disjunctive loops

/// `λ0` merges two nodes, `λ1` turns an edge into a loop on the merged
/// node, `λ2` deletes a loop.
pub fn disj_system() -> Result<RewritingSystem<PresheafCat>> {
    let schema = graph_schema();
    let cat = PresheafCat::from_arc(schema.clone());
    let two = graph(&schema, &["1", "2"], &[])?;
    let merged = graph(&schema, &["12"], &[])?;
    let lambda0 = named_rule(
        &cat,
        "lambda0",
        (&two, &two, &merged),
        &[],
        &[("V", "1", "12"), ("V", "2", "12")],
    )?;
    let edge = graph(&schema, &["1", "2"], &[("e", "1", "2")])?;
    let lambda1 = named_rule(
        &cat,
        "lambda1",
        (&edge, &edge, &graph(&schema, &["12"], &[("e", "12", "12")])?),
        &[],
        &[("V", "1", "12"), ("V", "2", "12")],
    )?;
    let node = graph(&schema, &["1"], &[])?;
    let lambda2 = named_rule(
        &cat,
        "lambda2",
        (&node, &graph(&schema, &["1"], &[("l", "1", "1")])?, &node),
        &[],
        &[],
    )?;
    RewritingSystem::new(cat, vec![lambda0, lambda1, lambda2])
}

/// Nodes 1 and 2 with the coloured edge `col: 1 → 2` and the plain edge
/// `blk: 2 → 1`.
pub fn disj_g0(sys: &RewritingSystem<PresheafCat>) -> Result<Presheaf> {
    graph(
        sys.category().schema(),
        &["1", "2"],
        &[("col", "1", "2"), ("blk", "2", "1")],
    )
}

/// `λ0`, `λ1` on the coloured edge, `λ2` on the plain loop.
pub fn der_f(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    run_plan(
        sys,
        &disj_g0(sys)?,
        &[
            ("lambda0", &[]),
            ("lambda1", &[("V", "2", "1"), ("E", "e", "col")]),
            ("lambda2", &[("E", "l", "blk")]),
        ],
    )
}

/// `λ1`, `λ2`, `λ0`: the merge moved to the end.
pub fn der_f_prime(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    run_plan(
        sys,
        &disj_g0(sys)?,
        &[
            ("lambda1", &[("E", "e", "col")]),
            ("lambda2", &[("E", "l", "blk")]),
            ("lambda0", &[("V", "2", "1")]),
        ],
    )
}

/// `λ0`, `λ2`, `λ1`.
pub fn der_f_second(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    run_plan(
        sys,
        &disj_g0(sys)?,
        &[
            ("lambda0", &[]),
            ("lambda2", &[("E", "l", "blk")]),
            ("lambda1", &[("V", "2", "1"), ("E", "e", "col")]),
        ],
    )
}

// ------------------------------------------------------- disjoint redexes

/// Three steps of the merge system on pairwise disjoint parts of a discrete
/// graph: a loop on `a`, a new neighbour of `b`, and `c`, `d` merged.
pub fn disjoint_three(sys: &RewritingSystem<PresheafCat>) -> Result<Derivation<PresheafCat>> {
    let g0 = graph(sys.category().schema(), &["a", "b", "c", "d"], &[])?;
    run_plan(
        sys,
        &g0,
        &[
            ("rho1", &[("V", "1", "a")]),
            ("rho0", &[("V", "1", "b")]),
            ("rho2", &[("V", "1", "c"), ("V", "2", "d")]),
        ],
    )
}

/// Three linear steps on distinct nodes, and the same steps in reverse. The
/// edge `x: a → b` keeps `a` and `c` apart, so the two orders are not
/// abstraction equivalent.
pub fn disjoint_linear_pair(
    sys: &RewritingSystem<PresheafCat>,
) -> Result<(Derivation<PresheafCat>, Derivation<PresheafCat>)> {
    let g0 = graph(sys.category().schema(), &["a", "b", "c"], &[("x", "a", "b")])?;
    let forward = run_plan(
        sys,
        &g0,
        &[
            ("rho1", &[("V", "1", "a")]),
            ("rho0", &[("V", "1", "b")]),
            ("rho1", &[("V", "1", "c")]),
        ],
    )?;
    let backward = run_plan(
        sys,
        &g0,
        &[
            ("rho1", &[("V", "1", "c")]),
            ("rho0", &[("V", "1", "b")]),
            ("rho1", &[("V", "1", "a")]),
        ],
    )?;
    Ok((forward, backward))
}

// ------------------------------------------------------------------ poset

/// `a` below everything, `b`, `c` below both of the incomparable tops.
pub fn poset_p5() -> PosetCat {
    PosetCat::new(
        FinitePoset::new(
            &["a", "b", "c", "t1", "t2"],
            &[("a", "b"), ("a", "c"), ("b", "t1"), ("b", "t2"), ("c", "t1"), ("c", "t2")],
        )
        .expect("valid poset"),
    )
}

/// Rules `(id_a, a ≤ t1)` and `(id_a, a ≤ b)`.
pub fn poset_system() -> Result<RewritingSystem<PosetCat>> {
    let cat = poset_p5();
    let id = cat.arrow("a", "a")?;
    let up_t1 = Rule::new(&cat, "up_t1", id.clone(), cat.arrow("a", "t1")?)?;
    let up_b = Rule::new(&cat, "up_b", id, cat.arrow("a", "b")?)?;
    RewritingSystem::new(cat, vec![up_t1, up_b])
}

/// `c ⇒ t1 ⇒ t1`.
pub fn poset_derivation(sys: &RewritingSystem<PosetCat>) -> Result<Derivation<PosetCat>> {
    sys.derive(
        &"c".to_string(),
        &[("up_t1", MatchSelector::Index(0)), ("up_b", MatchSelector::Index(0))],
    )
}

// --------------------------------------------------------------- e-graphs

pub fn egraph_schema() -> Arc<Schema> {
    Arc::new(Schema::egraph())
}

/// A small e-graph: `f: x → y` with `x`, `y` in separate classes, plus a
/// standalone node `z` sharing the class of `y`.
pub fn egraph_sample() -> Result<Presheaf> {
    crate::presheaf::PresheafBuilder::new(&egraph_schema())
        .add("V", "x")
        .add("V", "y")
        .add("V", "z")
        .add("Q", "qx")
        .add("Q", "qy")
        .add("E", "f")
        .set("s", "f", "x")
        .set("t", "f", "y")
        .set("q", "x", "qx")
        .set("q", "y", "qy")
        .set("q", "z", "qy")
        .build()
}
