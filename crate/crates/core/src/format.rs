//! JSON formats for instances, objects, morphisms, rule systems,
//! derivations and analysis witnesses.
//!
//! Presheaf objects are `{"carriers": {sort: [ids]}, "action": {arrow:
//! {id: id}}}`, their morphisms `{"from", "to", "map": {sort: {id: id}}}`.
//! Poset objects are element names; their morphisms carry no payload.
//! All maps are ordered, so serialization is deterministic.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::category::Category;
use crate::equivalence::SwitchingSequence;
use crate::error::{Error, Result};
use crate::independence::{IndependencePair, StrongWitness, SwitchResult};
use crate::poset::{FinitePoset, PosetArrow, PosetCat, PosetSpec};
use crate::presheaf::{NamedMap, Presheaf, PresheafCat, PresheafMorphism, Schema, SchemaSpec};
use crate::rewriting::{Derivation, DirectDerivation, RewritingSystem, Rule};

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Format(format!("missing field `{key}`")))
}

/// Instances that can be read from and written to JSON.
pub trait Codec: Category + Sized {
    /// Keys describing the instance itself, merged into system files.
    fn instance_json(&self) -> Map<String, Value>;
    fn instance_from_json(v: &Value) -> Result<Self>;
    fn object_json(&self, o: &Self::Object) -> Value;
    fn object_from_json(&self, v: &Value) -> Result<Self::Object>;
    /// The payload of a morphism, without its endpoints.
    fn morphism_json(&self, f: &Self::Morphism) -> Value;
    fn morphism_from_json(
        &self,
        v: &Value,
        source: &Self::Object,
        target: &Self::Object,
    ) -> Result<Self::Morphism>;
}

/// A schema given either in full or by a built-in name: `"graph"`,
/// `"egraph"`, or `"labelled:a,b,…"`.
pub fn schema_from_json(v: &Value) -> Result<Schema> {
    match v {
        Value::String(s) if s == "graph" => Ok(Schema::graph()),
        Value::String(s) if s == "egraph" => Ok(Schema::egraph()),
        Value::String(s) => match s.strip_prefix("labelled:") {
            Some(labels) => {
                let labels: Vec<&str> = labels.split(',').filter(|l| !l.is_empty()).collect();
                Schema::labelled_graph(&labels)
            }
            None => Err(Error::Format(format!("unknown built-in schema `{s}`"))),
        },
        _ => Schema::from_spec(&serde_json::from_value::<SchemaSpec>(v.clone()).map_err(format_err)?),
    }
}

#[derive(Serialize, Deserialize)]
struct PresheafBody {
    carriers: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    action: NamedMap,
}

impl Codec for PresheafCat {
    fn instance_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("schema".into(), serde_json::to_value(self.schema().to_spec()).expect("spec"));
        m
    }

    fn instance_from_json(v: &Value) -> Result<Self> {
        Ok(PresheafCat::new(schema_from_json(field(v, "schema")?)?))
    }

    fn object_json(&self, o: &Presheaf) -> Value {
        serde_json::to_value(PresheafBody {
            carriers: o.named_carriers(),
            action: o.named_action(),
        })
        .expect("presheaf body")
    }

    fn object_from_json(&self, v: &Value) -> Result<Presheaf> {
        if let Some(s) = v.get("schema") {
            if &schema_from_json(s)? != self.schema().as_ref() {
                return Err(Error::InvalidObject("object is over a different schema".into()));
            }
        }
        let body: PresheafBody = serde_json::from_value(v.clone()).map_err(format_err)?;
        Presheaf::from_named(self.schema().clone(), &body.carriers, &body.action)
    }

    fn morphism_json(&self, f: &PresheafMorphism) -> Value {
        serde_json::to_value(f.named_map()).expect("named map")
    }

    fn morphism_from_json(&self, v: &Value, source: &Presheaf, target: &Presheaf) -> Result<PresheafMorphism> {
        let map: NamedMap = serde_json::from_value(v.clone()).map_err(format_err)?;
        PresheafMorphism::from_named(source, target, &map)
    }
}

impl Codec for PosetCat {
    fn instance_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("poset".into(), serde_json::to_value(self.poset().to_spec()).expect("spec"));
        m
    }

    fn instance_from_json(v: &Value) -> Result<Self> {
        let spec: PosetSpec = serde_json::from_value(field(v, "poset")?.clone()).map_err(format_err)?;
        Ok(PosetCat::new(FinitePoset::from_spec(&spec)?))
    }

    fn object_json(&self, o: &String) -> Value {
        Value::String(o.clone())
    }

    fn object_from_json(&self, v: &Value) -> Result<String> {
        let s = v
            .as_str()
            .ok_or_else(|| Error::Format("poset object must be a string".into()))?;
        if !self.poset().contains(s) {
            return Err(Error::UnknownName(format!("poset element `{s}`")));
        }
        Ok(s.to_string())
    }

    fn morphism_json(&self, _: &PosetArrow) -> Value {
        Value::Null
    }

    fn morphism_from_json(&self, _: &Value, source: &String, target: &String) -> Result<PosetArrow> {
        self.arrow(source, target)
    }
}

/// Which instance a file describes, judged by its top-level keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Presheaf,
    Poset,
}

pub fn instance_kind(v: &Value) -> Result<InstanceKind> {
    if v.get("schema").is_some() {
        Ok(InstanceKind::Presheaf)
    } else if v.get("poset").is_some() {
        Ok(InstanceKind::Poset)
    } else {
        Err(Error::Format("expected a `schema` or `poset` key".into()))
    }
}

/// A stand-alone object file: the object plus its instance keys.
pub fn object_file_json<C: Codec>(cat: &C, o: &C::Object) -> Value {
    let mut m = cat.instance_json();
    match cat.object_json(o) {
        Value::Object(body) => m.extend(body),
        other => {
            m.insert("object".into(), other);
        }
    }
    Value::Object(m)
}

pub fn object_from_file_json<C: Codec>(cat: &C, v: &Value) -> Result<C::Object> {
    match v.get("object") {
        Some(o) => cat.object_from_json(o),
        None => cat.object_from_json(v),
    }
}

fn arrow_json<C: Codec>(cat: &C, f: &C::Morphism, from: &str, to: &str) -> Value {
    json!({ "from": from, "to": to, "map": cat.morphism_json(f) })
}

fn arrow_from_json<C: Codec>(
    cat: &C,
    v: &Value,
    from: (&str, &C::Object),
    to: (&str, &C::Object),
) -> Result<C::Morphism> {
    for (key, expected) in [("from", from.0), ("to", to.0)] {
        if let Some(name) = v.get(key).and_then(Value::as_str) {
            if name != expected {
                return Err(Error::Format(format!("arrow `{key}` is `{name}`, expected `{expected}`")));
            }
        }
    }
    let payload = v.get("map").unwrap_or(&Value::Null);
    cat.morphism_from_json(payload, from.1, to.1)
}

pub fn rule_json<C: Codec>(cat: &C, rule: &Rule<C>) -> Value {
    json!({
        "name": rule.name(),
        "K": cat.object_json(rule.interface(cat)),
        "L": cat.object_json(rule.lhs(cat)),
        "R": cat.object_json(rule.rhs(cat)),
        "l": cat.morphism_json(rule.l()),
        "r": cat.morphism_json(rule.r()),
    })
}

pub fn rule_from_json<C: Codec>(cat: &C, v: &Value) -> Result<Rule<C>> {
    let name = field(v, "name")?
        .as_str()
        .ok_or_else(|| Error::Format("rule name must be a string".into()))?;
    let k = cat.object_from_json(field(v, "K")?)?;
    let l_obj = cat.object_from_json(field(v, "L")?)?;
    let r_obj = cat.object_from_json(field(v, "R")?)?;
    let l = cat.morphism_from_json(v.get("l").unwrap_or(&Value::Null), &k, &l_obj)?;
    let r = cat.morphism_from_json(v.get("r").unwrap_or(&Value::Null), &k, &r_obj)?;
    Rule::new(cat, name, l, r)
}

pub fn system_json<C: Codec>(sys: &RewritingSystem<C>) -> Value {
    let cat = sys.category();
    let mut m = cat.instance_json();
    m.insert(
        "rules".into(),
        Value::Array(sys.rules().iter().map(|r| rule_json(cat, r)).collect()),
    );
    Value::Object(m)
}

pub fn system_from_json<C: Codec>(v: &Value) -> Result<RewritingSystem<C>> {
    let cat = C::instance_from_json(v)?;
    let rules = field(v, "rules")?
        .as_array()
        .ok_or_else(|| Error::Format("`rules` must be an array".into()))?
        .iter()
        .map(|r| rule_from_json(&cat, r))
        .collect::<Result<Vec<_>>>()?;
    RewritingSystem::new(cat, rules)
}

pub fn step_json<C: Codec>(cat: &C, s: &DirectDerivation<C>) -> Value {
    let rule = &s.rule;
    json!({
        "rule": rule.name(),
        "L": cat.object_json(rule.lhs(cat)),
        "K": cat.object_json(rule.interface(cat)),
        "R": cat.object_json(rule.rhs(cat)),
        "G": cat.object_json(s.source(cat)),
        "D": cat.object_json(s.context(cat)),
        "H": cat.object_json(s.target(cat)),
        "l": arrow_json(cat, rule.l(), "K", "L"),
        "r": arrow_json(cat, rule.r(), "K", "R"),
        "m": arrow_json(cat, &s.m, "L", "G"),
        "k": arrow_json(cat, &s.k, "K", "D"),
        "h": arrow_json(cat, &s.h, "R", "H"),
        "f": arrow_json(cat, &s.f, "D", "G"),
        "g": arrow_json(cat, &s.g, "D", "H"),
    })
}

/// Rebuild a step against the rules of `sys`; both squares are re-verified.
pub fn step_from_json<C: Codec>(sys: &RewritingSystem<C>, v: &Value) -> Result<DirectDerivation<C>> {
    let cat = sys.category();
    let name = field(v, "rule")?
        .as_str()
        .ok_or_else(|| Error::Format("step rule must be a string".into()))?;
    let rule = sys.rule(name)?.clone();
    for (key, expected) in [("L", rule.lhs(cat)), ("K", rule.interface(cat)), ("R", rule.rhs(cat))] {
        if let Some(o) = v.get(key) {
            if &cat.object_from_json(o)? != expected {
                return Err(Error::InvalidDerivation(format!(
                    "step object `{key}` differs from rule `{name}`"
                )));
            }
        }
    }
    let g = cat.object_from_json(field(v, "G")?)?;
    let d = cat.object_from_json(field(v, "D")?)?;
    let h = cat.object_from_json(field(v, "H")?)?;
    let (l_obj, k_obj, r_obj) = (rule.lhs(cat).clone(), rule.interface(cat).clone(), rule.rhs(cat).clone());
    let step = DirectDerivation {
        m: arrow_from_json(cat, field(v, "m")?, ("L", &l_obj), ("G", &g))?,
        k: arrow_from_json(cat, field(v, "k")?, ("K", &k_obj), ("D", &d))?,
        h: arrow_from_json(cat, field(v, "h")?, ("R", &r_obj), ("H", &h))?,
        f: arrow_from_json(cat, field(v, "f")?, ("D", &d), ("G", &g))?,
        g: arrow_from_json(cat, field(v, "g")?, ("D", &d), ("H", &h))?,
        rule,
    };
    step.verify(cat)?;
    Ok(step)
}

/// A self-contained derivation file: the system, the start object and
/// every object and arrow of every step.
pub fn derivation_json<C: Codec>(sys: &RewritingSystem<C>, d: &Derivation<C>) -> Value {
    let cat = sys.category();
    json!({
        "system": system_json(sys),
        "start": cat.object_json(d.start()),
        "steps": d.steps().iter().map(|s| step_json(cat, s)).collect::<Vec<_>>(),
    })
}

pub fn derivation_from_json<C: Codec>(v: &Value) -> Result<(RewritingSystem<C>, Derivation<C>)> {
    let sys = system_from_json::<C>(field(v, "system")?)?;
    let d = derivation_in_system(&sys, v)?;
    Ok((sys, d))
}

/// Read only the `start`/`steps` part of a derivation file against `sys`.
pub fn derivation_in_system<C: Codec>(sys: &RewritingSystem<C>, v: &Value) -> Result<Derivation<C>> {
    let cat = sys.category();
    let start = cat.object_from_json(field(v, "start")?)?;
    let steps = field(v, "steps")?
        .as_array()
        .ok_or_else(|| Error::Format("`steps` must be an array".into()))?
        .iter()
        .map(|s| step_from_json(sys, s))
        .collect::<Result<Vec<_>>>()?;
    Derivation::new(cat, start, steps)
}

/// SHA-256 of the canonical JSON of the start object and steps.
pub fn derivation_hash<C: Codec>(cat: &C, d: &Derivation<C>) -> String {
    let v = json!({
        "start": cat.object_json(d.start()),
        "steps": d.steps().iter().map(|s| step_json(cat, s)).collect::<Vec<_>>(),
    });
    format!("{:x}", Sha256::digest(v.to_string().as_bytes()))
}

pub fn pair_json<C: Codec>(cat: &C, p: &IndependencePair<C::Morphism>) -> Value {
    json!({
        "i0": arrow_json(cat, &p.i0, "R0", "D1"),
        "i1": arrow_json(cat, &p.i1, "L1", "D0"),
    })
}

pub fn witness_json<C: Codec>(cat: &C, w: &StrongWitness<C::Morphism>) -> Value {
    json!({
        "P": cat.object_json(cat.source(&w.p0)),
        "p0": arrow_json(cat, &w.p0, "P", "D0"),
        "p1": arrow_json(cat, &w.p1, "P", "D1"),
        "u0": arrow_json(cat, &w.u0, "K0", "P"),
        "u1": arrow_json(cat, &w.u1, "K1", "P"),
        "first_square_pushout": w.first_square_pushout,
        "second_square_pushout": w.second_square_pushout,
        "third_pushout_exists": w.third_pushout_exists,
        "strong": w.is_strong(),
    })
}

pub fn switch_result_json<C: Codec>(sys: &RewritingSystem<C>, s: &SwitchResult<C>) -> Value {
    let cat = sys.category();
    json!({
        "derivation": derivation_json(sys, &s.derivation),
        "pair": pair_json(cat, &s.pair),
        "witness": witness_json(cat, &s.witness),
        "Q0": cat.object_json(cat.target(&s.q0)),
        "Q1": cat.object_json(cat.target(&s.q1)),
        "H1": cat.object_json(cat.target(&s.b0)),
        "q0": arrow_json(cat, &s.q0, "P", "Q0"),
        "q1": arrow_json(cat, &s.q1, "P", "Q1"),
        "j0": arrow_json(cat, &s.j0, "R1", "Q1"),
        "j1": arrow_json(cat, &s.j1, "L0", "Q0"),
        "a0": arrow_json(cat, &s.a0, "Q0", "G0"),
        "a1": arrow_json(cat, &s.a1, "Q1", "H1"),
        "b0": arrow_json(cat, &s.b0, "Q0", "H1"),
        "b1": arrow_json(cat, &s.b1, "Q1", "G2"),
    })
}

pub fn sequence_json<C: Codec>(sys: &RewritingSystem<C>, seq: &SwitchingSequence<C>) -> Value {
    let cat = sys.category();
    json!({
        "steps": seq.steps.iter().map(|s| json!({
            "position": s.position,
            "pair": s.pair_index,
            "derivation": derivation_hash(cat, &s.result),
        })).collect::<Vec<_>>(),
        "positions": seq.positions(),
        "permutation": seq.permutation(),
        "consists_of_inversions": seq.consists_of_inversions(),
        "start": derivation_hash(cat, &seq.start),
        "result": derivation_json(sys, seq.end()),
    })
}

/// Pretty, newline-terminated JSON.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(format_err)
}

/// Convenience for callers holding a schema handle.
pub fn presheaf_cat(schema: &Arc<Schema>) -> PresheafCat {
    PresheafCat::from_arc(schema.clone())
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Render a presheaf as a DOT subgraph body. Sorts with a source and a
/// target arrow (`s`/`t` or `s_x`/`t_x`) are drawn as labelled edges; every
/// other element is a node, and remaining arrows out of node sorts are
/// dashed edges.
pub fn presheaf_dot_body(p: &Presheaf, prefix: &str) -> String {
    let schema = p.schema();
    let ends = |s: usize| -> Option<(usize, usize)> {
        let mut src = None;
        let mut tgt = None;
        for a in schema.proper_arrows() {
            let arrow = &schema.arrows()[a];
            if arrow.source != s {
                continue;
            }
            match arrow.name.as_str() {
                "s" => src = Some(a),
                "t" => tgt = Some(a),
                n if n.starts_with("s_") => src = Some(a),
                n if n.starts_with("t_") => tgt = Some(a),
                _ => {}
            }
        }
        Some((src?, tgt?))
    };
    let node = |s: usize, x: usize| dot_id(&format!("{prefix}{}:{}", schema.sorts()[s], p.carrier(s)[x]));
    let mut out = String::new();
    let edge_sorts: Vec<Option<(usize, usize)>> = (0..schema.sorts().len()).map(ends).collect();
    for (s, sort) in schema.sorts().iter().enumerate() {
        if edge_sorts[s].is_some() {
            continue;
        }
        for (x, id) in p.carrier(s).iter().enumerate() {
            let label = if schema.sorts().len() > 2 && edge_sorts.iter().filter(|e| e.is_none()).count() > 1 {
                format!("{sort}:{id}")
            } else {
                id.clone()
            };
            out.push_str(&format!("  {} [label={}];\n", node(s, x), dot_id(&label)));
        }
    }
    for (s, sort) in schema.sorts().iter().enumerate() {
        match edge_sorts[s] {
            Some((src, tgt)) => {
                let (a, b) = (schema.arrows()[src].target, schema.arrows()[tgt].target);
                for (x, id) in p.carrier(s).iter().enumerate() {
                    out.push_str(&format!(
                        "  {} -> {} [label={}];\n",
                        node(a, p.act(src, x)),
                        node(b, p.act(tgt, x)),
                        dot_id(&format!("{sort}:{id}"))
                    ));
                }
            }
            None => {
                for a in schema.proper_arrows() {
                    let arrow = &schema.arrows()[a];
                    if arrow.source != s {
                        continue;
                    }
                    for x in 0..p.size(s) {
                        out.push_str(&format!(
                            "  {} -> {} [style=dashed, label={}];\n",
                            node(s, x),
                            node(arrow.target, p.act(a, x)),
                            dot_id(&arrow.name)
                        ));
                    }
                }
            }
        }
    }
    out
}

pub fn presheaf_dot(p: &Presheaf, name: &str) -> String {
    format!("digraph {} {{\n{}}}\n", dot_id(name), presheaf_dot_body(p, ""))
}

/// Every object of a derivation as a cluster, in `G0, D0, G1, …` order.
pub fn derivation_dot(cat: &PresheafCat, d: &Derivation<PresheafCat>) -> String {
    let mut objects = vec![("G0".to_string(), d.start().clone())];
    for (i, s) in d.steps().iter().enumerate() {
        objects.push((format!("D{i} ({})", s.rule.name()), s.context(cat).clone()));
        objects.push((format!("G{}", i + 1), s.target(cat).clone()));
    }
    let mut out = String::from("digraph derivation {\n");
    for (k, (label, o)) in objects.iter().enumerate() {
        out.push_str(&format!("subgraph cluster_{k} {{\n  label={};\n", dot_id(label)));
        out.push_str(&presheaf_dot_body(o, &format!("{k}/")));
        out.push_str("}\n");
    }
    out.push_str("}\n");
    out
}
