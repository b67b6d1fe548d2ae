//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use dpo_core::presheaf::{graph, Presheaf, PresheafCat, PresheafMorphism, Schema};
use dpo_core::rewriting::{Derivation, RewritingSystem, Rule};
use dpo_core::Category;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graph_schema() -> Arc<Schema> {
    Arc::new(Schema::graph())
}

/// A random directed multigraph with nodes `n0…` and edges `e0…`.
pub fn random_graph(rng: &mut ChaCha8Rng, schema: &Arc<Schema>, max_nodes: usize, max_edges: usize) -> Presheaf {
    let n = rng.gen_range(1..=max_nodes);
    let nodes: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let m = rng.gen_range(0..=max_edges);
    let edges: Vec<(String, String, String)> = (0..m)
        .map(|i| {
            (
                format!("e{i}"),
                nodes[rng.gen_range(0..n)].clone(),
                nodes[rng.gen_range(0..n)].clone(),
            )
        })
        .collect();
    build(schema, &nodes, &edges)
}

pub fn build(schema: &Arc<Schema>, nodes: &[String], edges: &[(String, String, String)]) -> Presheaf {
    let nodes: Vec<&str> = nodes.iter().map(String::as_str).collect();
    let edges: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(e, s, t)| (e.as_str(), s.as_str(), t.as_str()))
        .collect();
    graph(schema, &nodes, &edges).expect("generated graph is well formed")
}

/// Nodes and edges of a plain graph, as `(nodes, [(edge, src, tgt)])`.
pub fn parts(g: &Presheaf) -> (Vec<String>, Vec<(String, String, String)>) {
    let named = g.named_action();
    let nodes = g.carrier_of("V").unwrap().to_vec();
    let edges = g
        .carrier_of("E")
        .unwrap()
        .iter()
        .map(|e| (e.clone(), named["s"][e].clone(), named["t"][e].clone()))
        .collect();
    (nodes, edges)
}

/// A random left-linear rule: `K ⊆ L` is a random subgraph, `R` adds fresh
/// nodes and edges to `K` and, unless `linear`, may merge nodes of `K`.
pub fn random_rule(rng: &mut ChaCha8Rng, cat: &PresheafCat, name: &str, linear: bool) -> Rule<PresheafCat> {
    let schema = cat.schema().clone();
    let l = random_graph(rng, &schema, 3, 3);
    let (l_nodes, l_edges) = parts(&l);
    let k_nodes: Vec<String> = l_nodes.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
    let k_edges: Vec<_> = l_edges
        .iter()
        .filter(|(_, s, t)| k_nodes.contains(s) && k_nodes.contains(t))
        .filter(|_| rng.gen_bool(0.6))
        .cloned()
        .collect();
    let k = build(&schema, &k_nodes, &k_edges);

    // node classes of R: optionally glue some K nodes onto an earlier one
    let mut rep: BTreeMap<String, String> = BTreeMap::new();
    for (i, x) in k_nodes.iter().enumerate() {
        let target = if !linear && i > 0 && rng.gen_bool(0.3) {
            rep[&k_nodes[rng.gen_range(0..i)]].clone()
        } else {
            x.clone()
        };
        rep.insert(x.clone(), target);
    }
    let mut r_nodes: Vec<String> = rep.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    for i in 0..rng.gen_range(0..=1) {
        r_nodes.push(format!("new{i}"));
    }
    let mut r_edges: Vec<(String, String, String)> = k_edges
        .iter()
        .map(|(e, s, t)| (e.clone(), rep[s].clone(), rep[t].clone()))
        .collect();
    for i in 0..rng.gen_range(0..=1) {
        if r_nodes.is_empty() {
            break;
        }
        let s = r_nodes.choose(rng).unwrap().clone();
        let t = r_nodes.choose(rng).unwrap().clone();
        r_edges.push((format!("fresh{i}"), s, t));
    }
    let r = build(&schema, &r_nodes, &r_edges);
    let lm = PresheafMorphism::by_names(&k, &l, &[]).unwrap();
    let pins: Vec<(&str, &str, &str)> = rep.iter().map(|(x, y)| ("V", x.as_str(), y.as_str())).collect();
    let rm = PresheafMorphism::by_names(&k, &r, &pins).unwrap();
    Rule::new(cat, name, lm, rm).expect("generated rule is left-linear")
}

pub fn random_system(rng: &mut ChaCha8Rng, rules: usize, linear: bool) -> RewritingSystem<PresheafCat> {
    let cat = PresheafCat::from_arc(graph_schema());
    let rules = (0..rules).map(|i| random_rule(rng, &cat, &format!("r{i}"), linear)).collect();
    RewritingSystem::new(cat, rules).unwrap()
}

/// Try to grow a derivation of length `len` by random applicable steps.
pub fn random_derivation(
    rng: &mut ChaCha8Rng,
    sys: &RewritingSystem<PresheafCat>,
    g0: &Presheaf,
    len: usize,
) -> Option<Derivation<PresheafCat>> {
    let cat = sys.category();
    let mut d = Derivation::empty(g0.clone());
    for _ in 0..len {
        let here = d.end(cat).clone();
        let mut options = Vec::new();
        for rule in sys.rules() {
            for m in sys.find_matches(rule, &here, true) {
                options.push((rule.clone(), m));
            }
        }
        let (rule, m) = options.choose(rng)?.clone();
        let step = sys.apply(&rule, &m).ok()?;
        let mut steps = d.steps().to_vec();
        steps.push(step);
        d = Derivation::new(cat, g0.clone(), steps).ok()?;
    }
    Some(d)
}

/// Every natural transformation between two plain graphs, by trying every
/// pair of functions on nodes and edges.
pub fn brute_force_hom(a: &Presheaf, b: &Presheaf) -> BTreeSet<(Vec<String>, Vec<String>)> {
    let (an, ae) = parts(a);
    let (bn, be) = parts(b);
    let src: BTreeMap<&str, (&str, &str)> = be.iter().map(|(e, s, t)| (e.as_str(), (s.as_str(), t.as_str()))).collect();
    let mut out = BTreeSet::new();
    for vmap in all_functions(an.len(), bn.len()) {
        for emap in all_functions(ae.len(), be.len()) {
            let natural = ae.iter().enumerate().all(|(i, (_, s, t))| {
                let (bs, bt) = src[be[emap[i]].0.as_str()];
                let si = an.iter().position(|x| x == s).unwrap();
                let ti = an.iter().position(|x| x == t).unwrap();
                bn[vmap[si]] == bs && bn[vmap[ti]] == bt
            });
            if natural {
                out.insert((
                    vmap.iter().map(|&i| bn[i].clone()).collect(),
                    emap.iter().map(|&i| be[i].0.clone()).collect(),
                ));
            }
        }
    }
    out
}

/// The node and edge images of a morphism in source-carrier order.
pub fn images(f: &PresheafMorphism) -> (Vec<String>, Vec<String>) {
    let m = f.named_map();
    let g = |sort: &str| -> Vec<String> {
        f.source()
            .carrier_of(sort)
            .unwrap()
            .iter()
            .map(|x| m[sort][x].clone())
            .collect()
    };
    (g("V"), g("E"))
}

fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            cur[i] += 1;
            if cur[i] < m {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Partition of `B ⊎ C` generated by `f(a) ~ g(a)`, per sort, computed by
/// repeated relabelling to a fixpoint.
pub fn pushout_partition(f: &PresheafMorphism, g: &PresheafMorphism, sort: &str) -> BTreeSet<BTreeSet<String>> {
    let fm = f.named_map();
    let gm = g.named_map();
    let b = f.target().carrier_of(sort).unwrap();
    let c = g.target().carrier_of(sort).unwrap();
    let mut label: BTreeMap<String, usize> = BTreeMap::new();
    for (i, x) in b.iter().map(|x| format!("B:{x}")).chain(c.iter().map(|x| format!("C:{x}"))).enumerate() {
        label.insert(x, i);
    }
    loop {
        let mut changed = false;
        for a in f.source().carrier_of(sort).unwrap() {
            let l = format!("B:{}", fm[sort][a]);
            let r = format!("C:{}", gm[sort][a]);
            let (x, y) = (label[&l], label[&r]);
            if x != y {
                let (lo, hi) = (x.min(y), x.max(y));
                for v in label.values_mut() {
                    if *v == hi {
                        *v = lo;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (k, v) in label {
        classes.entry(v).or_default().insert(k);
    }
    classes.into_values().collect()
}

/// The partition of `B ⊎ C` induced by a cocone `B → D ← C`.
pub fn cocone_partition(inb: &PresheafMorphism, inc: &PresheafMorphism, sort: &str) -> BTreeSet<BTreeSet<String>> {
    let mut classes: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (tag, f) in [("B", inb), ("C", inc)] {
        for (x, y) in &f.named_map()[sort] {
            classes.entry(y.clone()).or_default().insert(format!("{tag}:{x}"));
        }
    }
    classes.into_values().collect()
}

/// Sub-presheaves of a plain graph: node subsets with every edge whose
/// endpoints survive optionally kept.
pub fn subgraphs(g: &Presheaf) -> Vec<Presheaf> {
    let (nodes, edges) = parts(g);
    let mut out = Vec::new();
    for nmask in 0u32..(1 << nodes.len()) {
        let kept: Vec<String> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| nmask & (1 << i) != 0)
            .map(|(_, n)| n.clone())
            .collect();
        let allowed: Vec<_> = edges
            .iter()
            .filter(|(_, s, t)| kept.contains(s) && kept.contains(t))
            .cloned()
            .collect();
        for emask in 0u32..(1 << allowed.len()) {
            let es: Vec<_> = allowed
                .iter()
                .enumerate()
                .filter(|(i, _)| emask & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect();
            out.push(build(g.schema(), &kept, &es));
        }
    }
    out
}

/// Every subobject `D ⊆ G` with a `k: K → D` making `(l, k, m, incl)` a
/// pushout square, found by exhaustive search.
pub fn brute_force_complements(
    cat: &PresheafCat,
    l: &PresheafMorphism,
    m: &PresheafMorphism,
) -> Vec<(PresheafMorphism, PresheafMorphism)> {
    let g = m.target();
    let ml = cat.compose(l, m).unwrap();
    let mut out = Vec::new();
    for d in subgraphs(g) {
        let incl = PresheafMorphism::by_names(&d, g, &[]).unwrap();
        for k in cat.lifts(&incl, &ml) {
            if is_pushout_oracle(l, &k, m, &incl) {
                out.push((k, incl.clone()));
            }
        }
    }
    out
}

/// Set-level pushout test for a square `f: A → B`, `g: A → C`,
/// `inb: B → D`, `inc: C → D` over plain graphs: it commutes, the cocone
/// identifies exactly the generated classes, and it is jointly surjective.
pub fn is_pushout_oracle(
    f: &PresheafMorphism,
    g: &PresheafMorphism,
    inb: &PresheafMorphism,
    inc: &PresheafMorphism,
) -> bool {
    let (fm, gm, bm, cm) = (f.named_map(), g.named_map(), inb.named_map(), inc.named_map());
    ["V", "E"].iter().all(|sort| {
        let commutes = f
            .source()
            .carrier_of(sort)
            .unwrap()
            .iter()
            .all(|a| bm[*sort][&fm[*sort][a]] == cm[*sort][&gm[*sort][a]]);
        let hit: BTreeSet<&String> = bm[*sort].values().chain(cm[*sort].values()).collect();
        commutes
            && hit.len() == inb.target().carrier_of(sort).unwrap().len()
            && cocone_partition(inb, inc, sort) == pushout_partition(f, g, sort)
    })
}

/// Set-level pullback test: the span `A ← P → B` over `f: A → C ← B: g`
/// pairs up exactly the elements `(a, b)` with `f(a) = g(b)`, once each.
pub fn is_pullback_oracle(
    pa: &PresheafMorphism,
    pb: &PresheafMorphism,
    f: &PresheafMorphism,
    g: &PresheafMorphism,
) -> bool {
    let (am, bm, fm, gm) = (pa.named_map(), pb.named_map(), f.named_map(), g.named_map());
    ["V", "E"].iter().all(|sort| {
        let expected: BTreeSet<(String, String)> = f
            .source()
            .carrier_of(sort)
            .unwrap()
            .iter()
            .flat_map(|a| {
                g.source()
                    .carrier_of(sort)
                    .unwrap()
                    .iter()
                    .filter(|b| fm[*sort][a] == gm[*sort][*b])
                    .map(|b| (a.clone(), b.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        let p = pa.source().carrier_of(sort).unwrap();
        let got: BTreeSet<(String, String)> =
            p.iter().map(|x| (am[*sort][x].clone(), bm[*sort][x].clone())).collect();
        got.len() == p.len() && got == expected
    })
}
