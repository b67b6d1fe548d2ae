use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-identity or identity arrow of the index category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaArrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite index category `X`, given by an explicit composition table.
///
/// Arrow indices `0..sorts.len()` are the identities, in sort order; the
/// remaining arrows follow in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    name: String,
    sorts: Vec<String>,
    arrows: Vec<SchemaArrow>,
    /// `table[f][g] = Some(g ∘ f)` whenever `target(f) = source(g)`.
    table: Vec<Vec<Option<usize>>>,
    /// Arrows whose action is required to be surjective (e-graph `q: V → Q`).
    surjective: Vec<usize>,
}

/// Serialized form: identities and identity compositions are implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaSpec {
    pub name: String,
    pub sorts: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compose: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surjective: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub name: String,
    pub source: String,
    pub target: String,
}

impl Schema {
    /// Build and validate a schema. `compose` entries `(f, g, h)` state
    /// `g ∘ f = h` for non-identity `f`, `g`.
    pub fn new(
        name: &str,
        sorts: &[&str],
        arrows: &[(&str, &str, &str)],
        compose: &[(&str, &str, &str)],
        surjective: &[&str],
    ) -> Result<Schema> {
        Schema::from_spec(&SchemaSpec {
            name: name.to_string(),
            sorts: sorts.iter().map(|s| s.to_string()).collect(),
            arrows: arrows
                .iter()
                .map(|(n, s, t)| ArrowSpec {
                    name: n.to_string(),
                    source: s.to_string(),
                    target: t.to_string(),
                })
                .collect(),
            compose: compose
                .iter()
                .map(|(f, g, h)| [f.to_string(), g.to_string(), h.to_string()])
                .collect(),
            surjective: surjective.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn from_spec(spec: &SchemaSpec) -> Result<Schema> {
        let bad = |m: String| Error::InvalidSchema(format!("{}: {m}", spec.name));
        let mut seen = BTreeSet::new();
        for s in &spec.sorts {
            if !seen.insert(s.clone()) {
                return Err(bad(format!("duplicate sort `{s}`")));
            }
        }
        let sort_index = |s: &str| {
            spec.sorts
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| bad(format!("unknown sort `{s}`")))
        };
        let mut arrows: Vec<SchemaArrow> = spec
            .sorts
            .iter()
            .enumerate()
            .map(|(i, s)| SchemaArrow {
                name: format!("id_{s}"),
                source: i,
                target: i,
            })
            .collect();
        for a in &spec.arrows {
            if arrows.iter().any(|b| b.name == a.name) {
                return Err(bad(format!("duplicate arrow `{}`", a.name)));
            }
            arrows.push(SchemaArrow {
                name: a.name.clone(),
                source: sort_index(&a.source)?,
                target: sort_index(&a.target)?,
            });
        }
        let n = arrows.len();
        let ids = spec.sorts.len();
        let arrow_index = |name: &str| {
            arrows
                .iter()
                .position(|a| a.name == name)
                .ok_or_else(|| bad(format!("unknown arrow `{name}`")))
        };
        let mut table = vec![vec![None; n]; n];
        for f in 0..n {
            for g in 0..n {
                if arrows[f].target != arrows[g].source {
                    continue;
                }
                if f < ids {
                    table[f][g] = Some(g);
                } else if g < ids {
                    table[f][g] = Some(f);
                }
            }
        }
        for [f, g, h] in &spec.compose {
            let (fi, gi, hi) = (arrow_index(f)?, arrow_index(g)?, arrow_index(h)?);
            if arrows[fi].target != arrows[gi].source {
                return Err(bad(format!("`{g} ∘ {f}` is not composable")));
            }
            if arrows[hi].source != arrows[fi].source || arrows[hi].target != arrows[gi].target {
                return Err(bad(format!("`{h}` has the wrong endpoints for `{g} ∘ {f}`")));
            }
            if fi < ids || gi < ids {
                return Err(bad(format!("identity compositions are implicit (`{f}`, `{g}`)")));
            }
            if table[fi][gi].is_some_and(|x| x != hi) {
                return Err(bad(format!("conflicting entries for `{g} ∘ {f}`")));
            }
            table[fi][gi] = Some(hi);
        }
        for f in 0..n {
            for g in 0..n {
                if arrows[f].target == arrows[g].source && table[f][g].is_none() {
                    return Err(bad(format!(
                        "composition table is not total: `{} ∘ {}` missing",
                        arrows[g].name, arrows[f].name
                    )));
                }
            }
        }
        // associativity: (h ∘ g) ∘ f = h ∘ (g ∘ f)
        for f in 0..n {
            for g in 0..n {
                let Some(gf) = table[f][g] else { continue };
                for h in 0..n {
                    let Some(hg) = table[g][h] else { continue };
                    if table[gf][h] != table[f][hg] {
                        return Err(bad(format!(
                            "composition is not associative on ({}, {}, {})",
                            arrows[f].name, arrows[g].name, arrows[h].name
                        )));
                    }
                }
            }
        }
        let surjective = spec
            .surjective
            .iter()
            .map(|a| arrow_index(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Schema {
            name: spec.name.clone(),
            sorts: spec.sorts.clone(),
            arrows,
            table,
            surjective,
        })
    }

    pub fn to_spec(&self) -> SchemaSpec {
        let ids = self.sorts.len();
        let mut compose = Vec::new();
        for f in ids..self.arrows.len() {
            for g in ids..self.arrows.len() {
                if let Some(h) = self.table[f][g] {
                    compose.push([
                        self.arrows[f].name.clone(),
                        self.arrows[g].name.clone(),
                        self.arrows[h].name.clone(),
                    ]);
                }
            }
        }
        SchemaSpec {
            name: self.name.clone(),
            sorts: self.sorts.clone(),
            arrows: self.arrows[ids..]
                .iter()
                .map(|a| ArrowSpec {
                    name: a.name.clone(),
                    source: self.sorts[a.source].clone(),
                    target: self.sorts[a.target].clone(),
                })
                .collect(),
            compose,
            surjective: self
                .surjective
                .iter()
                .map(|&a| self.arrows[a].name.clone())
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn arrows(&self) -> &[SchemaArrow] {
        &self.arrows
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn identity(&self, sort: usize) -> usize {
        sort
    }

    pub fn is_identity(&self, arrow: usize) -> bool {
        arrow < self.sorts.len()
    }

    /// Non-identity arrows, in declaration order.
    pub fn proper_arrows(&self) -> impl Iterator<Item = usize> + '_ {
        self.sorts.len()..self.arrows.len()
    }

    /// `g ∘ f`, if composable.
    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        self.table[f][g]
    }

    /// A sort is a root when its only incoming arrow is its identity.
    pub fn is_root(&self, sort: usize) -> bool {
        !self.proper_arrows().any(|a| self.arrows[a].target == sort)
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.sorts.len()).filter(|&s| self.is_root(s)).collect()
    }

    pub fn surjective_arrows(&self) -> &[usize] {
        &self.surjective
    }

    /// Sorts on which injectivity decides monicity: every sort that is not
    /// the codomain of a surjectivity-constrained arrow.
    pub fn mono_sorts(&self) -> Vec<usize> {
        (0..self.sorts.len())
            .filter(|&s| !self.surjective.iter().any(|&a| self.arrows[a].target == s))
            .collect()
    }

    /// `E ⇉ V`.
    pub fn graph() -> Schema {
        Schema::new(
            "graph",
            &["E", "V"],
            &[("s", "E", "V"), ("t", "E", "V")],
            &[],
            &[],
        )
        .expect("graph schema is valid")
    }

    /// One edge sort per label, all sharing the node sort `V`.
    pub fn labelled_graph(labels: &[&str]) -> Result<Schema> {
        if labels.is_empty() {
            return Err(Error::InvalidSchema(
                "labelled graph schema needs at least one label".into(),
            ));
        }
        let mut sorts: Vec<&str> = labels.to_vec();
        sorts.push("V");
        let names: Vec<(String, String, String)> = labels
            .iter()
            .flat_map(|l| {
                [
                    (format!("s_{l}"), l.to_string(), "V".to_string()),
                    (format!("t_{l}"), l.to_string(), "V".to_string()),
                ]
            })
            .collect();
        let arrows: Vec<(&str, &str, &str)> = names
            .iter()
            .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
            .collect();
        Schema::new("labelled-graph", &sorts, &arrows, &[], &[])
    }

    /// `E ⇉ V → Q` with `q` surjective: graphs with an equivalence on nodes.
    pub fn egraph() -> Schema {
        Schema::new(
            "egraph",
            &["E", "V", "Q"],
            &[
                ("s", "E", "V"),
                ("t", "E", "V"),
                ("q", "V", "Q"),
                ("qs", "E", "Q"),
                ("qt", "E", "Q"),
            ],
            &[("s", "q", "qs"), ("t", "q", "qt")],
            &["q"],
        )
        .expect("e-graph schema is valid")
    }
}
