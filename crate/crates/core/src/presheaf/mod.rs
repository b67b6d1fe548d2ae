//! Finite presheaves `Set^X` over a finite schema `X`.
//!
//! Carriers are sorted lists of element identities (unique per sort), and
//! every schema arrow acts as a total function between carriers. Graphs,
//! edge-labelled graphs and e-graphs are all instances, differing only in
//! the schema.

mod schema;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use schema::{ArrowSpec, Schema, SchemaArrow, SchemaSpec};

use crate::category::{Category, Cocone, Cospan, Diagram, Span, Square};
use crate::error::{Error, Result};
use search::Search;

/// Per-sort element maps keyed by identity, as used by the JSON formats.
pub type NamedMap = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Clone)]
pub struct Presheaf {
    pub(crate) schema: Arc<Schema>,
    pub(crate) carriers: Vec<Vec<String>>,
    /// `action[a][x]` for every arrow, identities included.
    pub(crate) action: Vec<Vec<usize>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.schema, &other.schema) || self.schema == other.schema)
            && self.carriers == other.carriers
            && self.action == other.action
    }
}

impl Eq for Presheaf {}

impl Presheaf {
    /// Validated constructor over index-based data.
    pub(crate) fn from_parts(
        schema: Arc<Schema>,
        carriers: Vec<Vec<String>>,
        action: Vec<Vec<usize>>,
    ) -> Result<Presheaf> {
        let p = Presheaf {
            schema,
            carriers,
            action,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidObject(m));
        let schema = &self.schema;
        if self.carriers.len() != schema.sorts().len() {
            return bad("carrier count differs from sort count".into());
        }
        for (s, c) in self.carriers.iter().enumerate() {
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("carrier of `{}` is not sorted and unique", schema.sorts()[s]));
            }
        }
        if self.action.len() != schema.arrows().len() {
            return bad("action count differs from arrow count".into());
        }
        for (a, arrow) in schema.arrows().iter().enumerate() {
            let act = &self.action[a];
            if act.len() != self.carriers[arrow.source].len() {
                return bad(format!("action of `{}` is not total", arrow.name));
            }
            if act.iter().any(|&y| y >= self.carriers[arrow.target].len()) {
                return bad(format!("action of `{}` leaves its carrier", arrow.name));
            }
        }
        if !self.is_functorial() {
            return bad("action does not respect the composition table".into());
        }
        self.check_constraints()
    }

    fn is_functorial(&self) -> bool {
        let schema = &self.schema;
        for s in 0..schema.sorts().len() {
            let id = schema.identity(s);
            if self.action[id].iter().enumerate().any(|(x, &y)| x != y) {
                return false;
            }
        }
        for f in 0..schema.arrows().len() {
            for g in 0..schema.arrows().len() {
                let Some(h) = schema.compose(f, g) else { continue };
                let ok = (0..self.carriers[schema.arrows()[f].source].len())
                    .all(|x| self.action[g][self.action[f][x]] == self.action[h][x]);
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Surjectivity constraints declared by the schema (e-graph `V → Q`).
    pub fn check_constraints(&self) -> Result<()> {
        for &a in self.schema.surjective_arrows() {
            let arrow = &self.schema.arrows()[a];
            let hit: BTreeSet<usize> = self.action[a].iter().copied().collect();
            if hit.len() != self.carriers[arrow.target].len() {
                let unused: Vec<&str> = (0..self.carriers[arrow.target].len())
                    .filter(|y| !hit.contains(y))
                    .map(|y| self.carriers[arrow.target][y].as_str())
                    .collect();
                return Err(Error::EgraphConstraintViolation(format!(
                    "`{}` is not surjective: {} unused",
                    arrow.name,
                    unused.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Build from identity-keyed data. Actions of composite arrows may be
    /// omitted when the table determines them.
    pub fn from_named(
        schema: Arc<Schema>,
        carriers: &BTreeMap<String, Vec<String>>,
        action: &NamedMap,
    ) -> Result<Presheaf> {
        for s in carriers.keys() {
            if schema.sort_index(s).is_none() {
                return Err(Error::InvalidObject(format!("unknown sort `{s}`")));
            }
        }
        for a in action.keys() {
            if schema.arrow_index(a).is_none() {
                return Err(Error::InvalidObject(format!("unknown arrow `{a}`")));
            }
        }
        let mut cs: Vec<Vec<String>> = Vec::new();
        for s in schema.sorts() {
            let mut c = carriers.get(s).cloned().unwrap_or_default();
            let before = c.len();
            c.sort();
            c.dedup();
            if c.len() != before {
                return Err(Error::InvalidObject(format!("duplicate element in sort `{s}`")));
            }
            cs.push(c);
        }
        let n = schema.arrows().len();
        let mut act: Vec<Option<Vec<usize>>> = vec![None; n];
        for (s, c) in cs.iter().enumerate() {
            act[schema.identity(s)] = Some((0..c.len()).collect());
        }
        for a in schema.proper_arrows() {
            let arrow = &schema.arrows()[a];
            let Some(m) = action.get(&arrow.name) else {
                if cs[arrow.source].is_empty() {
                    act[a] = Some(Vec::new());
                }
                continue;
            };
            let mut v = Vec::with_capacity(cs[arrow.source].len());
            for x in &cs[arrow.source] {
                let y = m.get(x).ok_or_else(|| {
                    Error::InvalidObject(format!("`{}` undefined on `{x}`", arrow.name))
                })?;
                let yi = cs[arrow.target].binary_search(y).map_err(|_| {
                    Error::InvalidObject(format!(
                        "`{}` sends `{x}` to `{y}`, which is not in sort `{}`",
                        arrow.name,
                        schema.sorts()[arrow.target]
                    ))
                })?;
                v.push(yi);
            }
            if m.len() != v.len() {
                return Err(Error::InvalidObject(format!(
                    "`{}` mentions elements outside its source sort",
                    arrow.name
                )));
            }
            act[a] = Some(v);
        }
        // fill in composites from the table
        loop {
            let mut progress = false;
            for h in schema.proper_arrows() {
                if act[h].is_some() {
                    continue;
                }
                let derived = (0..n).find_map(|f| {
                    (0..n).find_map(|g| {
                        if schema.compose(f, g) != Some(h) || f == h || g == h {
                            return None;
                        }
                        let (af, ag) = (act[f].as_ref()?, act[g].as_ref()?);
                        Some(af.iter().map(|&x| ag[x]).collect::<Vec<_>>())
                    })
                });
                if let Some(v) = derived {
                    act[h] = Some(v);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        let action = act
            .into_iter()
            .enumerate()
            .map(|(a, v)| {
                v.ok_or_else(|| {
                    Error::InvalidObject(format!("no action given for `{}`", schema.arrows()[a].name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Presheaf::from_parts(schema, cs, action)
    }

    /// The empty presheaf.
    pub fn empty(schema: Arc<Schema>) -> Presheaf {
        let carriers = vec![Vec::new(); schema.sorts().len()];
        let action = vec![Vec::new(); schema.arrows().len()];
        Presheaf {
            schema,
            carriers,
            action,
        }
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn carrier(&self, sort: usize) -> &[String] {
        &self.carriers[sort]
    }

    pub fn carrier_of(&self, sort: &str) -> Option<&[String]> {
        self.schema.sort_index(sort).map(|s| self.carriers[s].as_slice())
    }

    pub fn size(&self, sort: usize) -> usize {
        self.carriers[sort].len()
    }

    pub fn total_size(&self) -> usize {
        self.carriers.iter().map(Vec::len).sum()
    }

    pub fn element(&self, sort: &str, id: &str) -> Option<usize> {
        let s = self.schema.sort_index(sort)?;
        self.carriers[s].binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn act(&self, arrow: usize, x: usize) -> usize {
        self.action[arrow][x]
    }

    /// Identity-keyed carriers.
    pub fn named_carriers(&self) -> BTreeMap<String, Vec<String>> {
        self.schema
            .sorts()
            .iter()
            .cloned()
            .zip(self.carriers.iter().cloned())
            .collect()
    }

    /// Identity-keyed action of every non-identity arrow.
    pub fn named_action(&self) -> NamedMap {
        self.schema
            .proper_arrows()
            .map(|a| {
                let arrow = &self.schema.arrows()[a];
                let m = self.carriers[arrow.source]
                    .iter()
                    .zip(&self.action[a])
                    .map(|(x, &y)| (x.clone(), self.carriers[arrow.target][y].clone()))
                    .collect();
                (arrow.name.clone(), m)
            })
            .collect()
    }
}

/// Load-time validation of raw presheaf data: functoriality, totality and
/// the schema's surjectivity constraints.
pub fn check_functoriality(
    schema: &Arc<Schema>,
    carriers: &BTreeMap<String, Vec<String>>,
    action: &NamedMap,
) -> bool {
    Presheaf::from_named(schema.clone(), carriers, action).is_ok()
}

/// Load-time validation of raw morphism data.
pub fn check_naturality(source: &Presheaf, target: &Presheaf, map: &NamedMap) -> bool {
    PresheafMorphism::from_named(source, target, map).is_ok()
}

impl fmt::Display for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let schema = &self.schema;
        write!(f, "{{")?;
        for (s, c) in self.carriers.iter().enumerate() {
            if s > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}:", schema.sorts()[s])?;
            for (x, id) in c.iter().enumerate() {
                write!(f, " {id}")?;
                let outgoing: Vec<String> = schema
                    .proper_arrows()
                    .filter(|&a| schema.arrows()[a].source == s)
                    .map(|a| {
                        let arrow = &schema.arrows()[a];
                        self.carriers[arrow.target][self.action[a][x]].clone()
                    })
                    .collect();
                if !outgoing.is_empty() {
                    write!(f, "({})", outgoing.join(","))?;
                }
            }
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presheaf{self}")
    }
}

/// Incremental construction of presheaves, mostly for fixtures and tests.
#[derive(Debug, Clone)]
pub struct PresheafBuilder {
    schema: Arc<Schema>,
    carriers: BTreeMap<String, Vec<String>>,
    action: NamedMap,
}

impl PresheafBuilder {
    pub fn new(schema: &Arc<Schema>) -> Self {
        PresheafBuilder {
            schema: schema.clone(),
            carriers: BTreeMap::new(),
            action: BTreeMap::new(),
        }
    }

    pub fn add(mut self, sort: &str, id: &str) -> Self {
        self.carriers
            .entry(sort.to_string())
            .or_default()
            .push(id.to_string());
        self
    }

    pub fn set(mut self, arrow: &str, from: &str, to: &str) -> Self {
        self.action
            .entry(arrow.to_string())
            .or_default()
            .insert(from.to_string(), to.to_string());
        self
    }

    pub fn build(self) -> Result<Presheaf> {
        Presheaf::from_named(self.schema, &self.carriers, &self.action)
    }
}

/// A plain directed graph over [`Schema::graph`]: `edges` are `(id, src, tgt)`.
pub fn graph(schema: &Arc<Schema>, nodes: &[&str], edges: &[(&str, &str, &str)]) -> Result<Presheaf> {
    let mut b = PresheafBuilder::new(schema);
    for n in nodes {
        b = b.add("V", n);
    }
    for (e, s, t) in edges {
        b = b.add("E", e).set("s", e, s).set("t", e, t);
    }
    b.build()
}

/// An edge-labelled graph over [`Schema::labelled_graph`]: `edges` are
/// `(label, id, src, tgt)`.
pub fn labelled_graph(
    schema: &Arc<Schema>,
    nodes: &[&str],
    edges: &[(&str, &str, &str, &str)],
) -> Result<Presheaf> {
    let mut b = PresheafBuilder::new(schema);
    for n in nodes {
        b = b.add("V", n);
    }
    for (l, e, s, t) in edges {
        b = b
            .add(l, e)
            .set(&format!("s_{l}"), e, s)
            .set(&format!("t_{l}"), e, t);
    }
    b.build()
}

/// A natural transformation between presheaves over the same schema.
#[derive(Clone, PartialEq, Eq)]
pub struct PresheafMorphism {
    pub(crate) source: Presheaf,
    pub(crate) target: Presheaf,
    pub(crate) maps: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub(crate) fn from_parts(
        source: Presheaf,
        target: Presheaf,
        maps: Vec<Vec<usize>>,
    ) -> Result<PresheafMorphism> {
        let f = PresheafMorphism {
            source,
            target,
            maps,
        };
        if !(Arc::ptr_eq(&f.source.schema, &f.target.schema) || f.source.schema == f.target.schema)
        {
            return Err(Error::InvalidMorphism("schemas differ".into()));
        }
        for (s, m) in f.maps.iter().enumerate() {
            if m.len() != f.source.size(s) || m.iter().any(|&y| y >= f.target.size(s)) {
                return Err(Error::InvalidMorphism(format!(
                    "component on `{}` is not a total function",
                    f.source.schema.sorts()[s]
                )));
            }
        }
        if f.maps.len() != f.source.schema.sorts().len() {
            return Err(Error::InvalidMorphism("component count differs from sort count".into()));
        }
        if !f.is_natural() {
            return Err(Error::InvalidMorphism("naturality square fails".into()));
        }
        Ok(f)
    }

    fn is_natural(&self) -> bool {
        let schema = &self.source.schema;
        schema.proper_arrows().all(|a| {
            let arrow = &schema.arrows()[a];
            (0..self.source.size(arrow.source)).all(|x| {
                self.maps[arrow.target][self.source.action[a][x]]
                    == self.target.action[a][self.maps[arrow.source][x]]
            })
        })
    }

    pub fn check_naturality(&self) -> bool {
        self.is_natural()
    }

    /// Build from a complete identity-keyed map.
    pub fn from_named(source: &Presheaf, target: &Presheaf, map: &NamedMap) -> Result<Self> {
        let schema = &source.schema;
        for s in map.keys() {
            if schema.sort_index(s).is_none() {
                return Err(Error::InvalidMorphism(format!("unknown sort `{s}`")));
            }
        }
        let mut maps = Vec::new();
        for (s, sort) in schema.sorts().iter().enumerate() {
            let empty = BTreeMap::new();
            let m = map.get(sort).unwrap_or(&empty);
            if m.len() != source.size(s) {
                return Err(Error::InvalidMorphism(format!(
                    "component on `{sort}` must list exactly the source elements"
                )));
            }
            let mut v = Vec::new();
            for x in &source.carriers[s] {
                let y = m.get(x).ok_or_else(|| {
                    Error::InvalidMorphism(format!("`{sort}:{x}` is not mapped"))
                })?;
                let yi = target.carriers[s].binary_search(y).map_err(|_| {
                    Error::InvalidMorphism(format!("`{sort}:{y}` is not in the target"))
                })?;
                v.push(yi);
            }
            maps.push(v);
        }
        PresheafMorphism::from_parts(source.clone(), target.clone(), maps)
    }

    /// Build from explicit `(sort, from, to)` entries; unlisted elements go to
    /// the equally named target element.
    pub fn by_names(source: &Presheaf, target: &Presheaf, pairs: &[(&str, &str, &str)]) -> Result<Self> {
        let mut map: NamedMap = BTreeMap::new();
        for (s, sort) in source.schema.sorts().iter().enumerate() {
            let entry = map.entry(sort.clone()).or_default();
            for x in &source.carriers[s] {
                entry.insert(x.clone(), x.clone());
            }
        }
        for (sort, x, y) in pairs {
            let entry = map
                .get_mut(*sort)
                .ok_or_else(|| Error::InvalidMorphism(format!("unknown sort `{sort}`")))?;
            if !entry.contains_key(*x) {
                return Err(Error::InvalidMorphism(format!("`{sort}:{x}` is not in the source")));
            }
            entry.insert(x.to_string(), y.to_string());
        }
        PresheafMorphism::from_named(source, target, &map)
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn component(&self, sort: usize) -> &[usize] {
        &self.maps[sort]
    }

    /// Image of an element, by identity.
    pub fn image_of(&self, sort: &str, id: &str) -> Option<&str> {
        let s = self.source.schema.sort_index(sort)?;
        let x = self.source.element(sort, id)?;
        Some(self.target.carriers[s][self.maps[s][x]].as_str())
    }

    pub fn named_map(&self) -> NamedMap {
        self.source
            .schema
            .sorts()
            .iter()
            .enumerate()
            .map(|(s, sort)| {
                let m = self.source.carriers[s]
                    .iter()
                    .zip(&self.maps[s])
                    .map(|(x, &y)| (x.clone(), self.target.carriers[s][y].clone()))
                    .collect();
                (sort.clone(), m)
            })
            .collect()
    }

    fn injective_on(&self, sort: usize) -> bool {
        let set: BTreeSet<usize> = self.maps[sort].iter().copied().collect();
        set.len() == self.maps[sort].len()
    }

    fn surjective_on(&self, sort: usize) -> bool {
        let set: BTreeSet<usize> = self.maps[sort].iter().copied().collect();
        set.len() == self.target.size(sort)
    }
}

impl fmt::Debug for PresheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let schema = &self.source.schema;
        write!(f, "{} -> {} [", self.source, self.target)?;
        let mut first = true;
        for (s, sort) in schema.sorts().iter().enumerate() {
            for (x, &y) in self.maps[s].iter().enumerate() {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(
                    f,
                    "{sort}:{}↦{}",
                    self.source.carriers[s][x], self.target.carriers[s][y]
                )?;
            }
        }
        write!(f, "]")
    }
}

/// Minimal union-find over `0..n`.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// Union keeping the smaller index as representative.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Quotient of the disjoint union of `parts` by the equivalence generated by
/// `relations[sort]`, pairs of `(part, element)`. Each class is named after
/// its least member in `(part, identity)` order; a name already taken by an
/// earlier class gets primes appended. Returns the quotient and, per part,
/// its injection components.
fn quotient(
    schema: &Arc<Schema>,
    parts: &[&Presheaf],
    relations: &[Vec<((usize, usize), (usize, usize))>],
) -> Result<(Presheaf, Vec<Vec<Vec<usize>>>)> {
    let nsorts = schema.sorts().len();
    let mut carriers = Vec::with_capacity(nsorts);
    // class_of[sort][part][x] = sorted index in the quotient carrier
    let mut class_of: Vec<Vec<Vec<usize>>> = Vec::with_capacity(nsorts);
    let mut members: Vec<Vec<Vec<(usize, usize)>>> = Vec::with_capacity(nsorts);
    for s in 0..nsorts {
        let offsets: Vec<usize> = parts
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.size(s);
                Some(o)
            })
            .collect();
        let total: usize = parts.iter().map(|p| p.size(s)).sum();
        let mut uf = UnionFind::new(total);
        for &((pa, xa), (pb, xb)) in &relations[s] {
            uf.union(offsets[pa] + xa, offsets[pb] + xb);
        }
        let mut roots: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (p, part) in parts.iter().enumerate() {
            for x in 0..part.size(s) {
                roots.entry(uf.find(offsets[p] + x)).or_default().push((p, x));
            }
        }
        // roots are the least global index in each class, so iteration
        // order is representative order
        let mut used = BTreeSet::new();
        let mut named: Vec<(String, Vec<(usize, usize)>)> = Vec::new();
        for (_, class) in roots {
            let (p, x) = class[0];
            let mut name = parts[p].carriers[s][x].clone();
            while used.contains(&name) {
                name.push('\'');
            }
            used.insert(name.clone());
            named.push((name, class));
        }
        named.sort_by(|a, b| a.0.cmp(&b.0));
        let mut co: Vec<Vec<usize>> = parts.iter().map(|p| vec![0; p.size(s)]).collect();
        for (i, (_, class)) in named.iter().enumerate() {
            for &(p, x) in class {
                co[p][x] = i;
            }
        }
        carriers.push(named.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());
        members.push(named.into_iter().map(|(_, c)| c).collect());
        class_of.push(co);
    }
    let mut action = Vec::with_capacity(schema.arrows().len());
    for (a, arrow) in schema.arrows().iter().enumerate() {
        let mut v = Vec::with_capacity(members[arrow.source].len());
        for class in &members[arrow.source] {
            let mut image = None;
            for &(p, x) in class {
                let y = class_of[arrow.target][p][parts[p].action[a][x]];
                if image.is_some_and(|i| i != y) {
                    return Err(Error::Invariant(format!(
                        "quotient is not well defined along `{}`",
                        arrow.name
                    )));
                }
                image = Some(y);
            }
            v.push(image.expect("classes are non-empty"));
        }
        action.push(v);
    }
    let injections = (0..parts.len())
        .map(|p| (0..nsorts).map(|s| class_of[s][p].clone()).collect())
        .collect();
    let q = Presheaf {
        schema: schema.clone(),
        carriers,
        action,
    };
    if !q.is_functorial() {
        return Err(Error::Invariant("quotient is not functorial".into()));
    }
    Ok((q, injections))
}

/// The category `Set^X` for a fixed schema, with `M` the componentwise
/// injective morphisms.
#[derive(Debug, Clone)]
pub struct PresheafCat {
    schema: Arc<Schema>,
}

impl PresheafCat {
    pub fn new(schema: Schema) -> Self {
        PresheafCat {
            schema: Arc::new(schema),
        }
    }

    pub fn from_arc(schema: Arc<Schema>) -> Self {
        PresheafCat { schema }
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn builder(&self) -> PresheafBuilder {
        PresheafBuilder::new(&self.schema)
    }

    fn same_schema(&self, p: &Presheaf) -> bool {
        Arc::ptr_eq(&self.schema, &p.schema) || *self.schema == *p.schema
    }

    /// Componentwise set pullback, without the schema's surjectivity check.
    fn raw_pullback(
        &self,
        f: &PresheafMorphism,
        g: &PresheafMorphism,
    ) -> Result<(Presheaf, Vec<Vec<usize>>, Vec<Vec<usize>>)> {
        if f.target != g.target {
            return Err(Error::EndpointMismatch("pullback legs have different targets".into()));
        }
        let (a, b) = (&f.source, &g.source);
        let nsorts = self.schema.sorts().len();
        let mut carriers = Vec::with_capacity(nsorts);
        let mut pairs_by_sort: Vec<Vec<(usize, usize)>> = Vec::with_capacity(nsorts);
        for s in 0..nsorts {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for x in 0..a.size(s) {
                for y in 0..b.size(s) {
                    if f.maps[s][x] == g.maps[s][y] {
                        pairs.push((x, y));
                    }
                }
            }
            let short = |&(x, y): &(usize, usize)| {
                let (nx, ny) = (&a.carriers[s][x], &b.carriers[s][y]);
                if nx == ny {
                    nx.clone()
                } else {
                    format!("{nx}|{ny}")
                }
            };
            let mut names: Vec<String> = pairs.iter().map(short).collect();
            let distinct: BTreeSet<&String> = names.iter().collect();
            if distinct.len() != names.len() {
                names = pairs
                    .iter()
                    .map(|&(x, y)| format!("({},{})", a.carriers[s][x], b.carriers[s][y]))
                    .collect();
            }
            let mut order: Vec<usize> = (0..pairs.len()).collect();
            order.sort_by(|&i, &j| names[i].cmp(&names[j]));
            carriers.push(order.iter().map(|&i| names[i].clone()).collect::<Vec<_>>());
            pairs_by_sort.push(order.iter().map(|&i| pairs[i]).collect());
        }
        let mut action = Vec::new();
        for (ai, arrow) in self.schema.arrows().iter().enumerate() {
            let target_pairs = &pairs_by_sort[arrow.target];
            let v = pairs_by_sort[arrow.source]
                .iter()
                .map(|&(x, y)| {
                    let img = (a.action[ai][x], b.action[ai][y]);
                    target_pairs
                        .iter()
                        .position(|&p| p == img)
                        .expect("pullback is closed under the action")
                })
                .collect();
            action.push(v);
        }
        let p = Presheaf {
            schema: self.schema.clone(),
            carriers,
            action,
        };
        let left = pairs_by_sort.iter().map(|ps| ps.iter().map(|&(x, _)| x).collect()).collect();
        let right = pairs_by_sort.iter().map(|ps| ps.iter().map(|&(_, y)| y).collect()).collect();
        Ok((p, left, right))
    }

    fn check_square(&self, sq: &Square<PresheafMorphism>) -> bool {
        crate::category::square_endpoints_match(self, sq) && self.commutes(sq)
    }
}

impl Category for PresheafCat {
    type Object = Presheaf;
    type Morphism = PresheafMorphism;

    fn source<'a>(&self, f: &'a PresheafMorphism) -> &'a Presheaf {
        &f.source
    }

    fn target<'a>(&self, f: &'a PresheafMorphism) -> &'a Presheaf {
        &f.target
    }

    fn identity(&self, a: &Presheaf) -> PresheafMorphism {
        PresheafMorphism {
            source: a.clone(),
            target: a.clone(),
            maps: a.carriers.iter().map(|c| (0..c.len()).collect()).collect(),
        }
    }

    fn compose(&self, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<PresheafMorphism> {
        if f.target != g.source {
            return Err(Error::EndpointMismatch(format!(
                "cannot compose: {} is not {}",
                f.target, g.source
            )));
        }
        Ok(PresheafMorphism {
            source: f.source.clone(),
            target: g.target.clone(),
            maps: f
                .maps
                .iter()
                .zip(&g.maps)
                .map(|(fm, gm)| fm.iter().map(|&x| gm[x]).collect())
                .collect(),
        })
    }

    fn hom(&self, a: &Presheaf, b: &Presheaf) -> Vec<PresheafMorphism> {
        Search::new(a, b)
            .run(true)
            .into_iter()
            .map(|maps| PresheafMorphism {
                source: a.clone(),
                target: b.clone(),
                maps,
            })
            .collect()
    }

    fn lifts(&self, along: &PresheafMorphism, target: &PresheafMorphism) -> Vec<PresheafMorphism> {
        if along.target != target.target {
            return Vec::new();
        }
        let allowed = |s: usize, x: usize, v: usize| along.maps[s][v] == target.maps[s][x];
        Search::new(&target.source, &along.source)
            .allowed(&allowed)
            .run(true)
            .into_iter()
            .map(|maps| PresheafMorphism {
                source: target.source.clone(),
                target: along.source.clone(),
                maps,
            })
            .collect()
    }

    fn lift_along_mono(
        &self,
        mono: &PresheafMorphism,
        target: &PresheafMorphism,
    ) -> Option<PresheafMorphism> {
        if mono.target != target.target {
            return None;
        }
        let mut maps = Vec::new();
        for (s, tm) in target.maps.iter().enumerate() {
            let mut v = Vec::with_capacity(tm.len());
            for &y in tm {
                let mut pre = (0..mono.maps[s].len()).filter(|&x| mono.maps[s][x] == y);
                let x = pre.next()?;
                if pre.next().is_some() {
                    return None;
                }
                v.push(x);
            }
            maps.push(v);
        }
        PresheafMorphism::from_parts(target.source.clone(), mono.source.clone(), maps).ok()
    }

    fn isos_under(
        &self,
        a: &Presheaf,
        b: &Presheaf,
        pins: &[(PresheafMorphism, PresheafMorphism)],
    ) -> Vec<PresheafMorphism> {
        let nsorts = self.schema.sorts().len();
        if (0..nsorts).any(|s| a.size(s) != b.size(s)) {
            return Vec::new();
        }
        let mut search = Search::new(a, b).injective();
        let mut consistent = true;
        'pins: for (p, q) in pins {
            if &p.target != a || &q.target != b || p.source != q.source {
                consistent = false;
                break;
            }
            for s in 0..nsorts {
                for x in 0..p.source.size(s) {
                    if !search.fix(s, p.maps[s][x], q.maps[s][x]) {
                        consistent = false;
                        break 'pins;
                    }
                }
            }
        }
        search
            .run(consistent)
            .into_iter()
            .map(|maps| PresheafMorphism {
                source: a.clone(),
                target: b.clone(),
                maps,
            })
            .collect()
    }

    fn is_mono(&self, f: &PresheafMorphism) -> bool {
        self.schema.mono_sorts().into_iter().all(|s| f.injective_on(s))
    }

    fn is_epi(&self, f: &PresheafMorphism) -> bool {
        (0..self.schema.sorts().len()).all(|s| f.surjective_on(s))
    }

    fn is_iso(&self, f: &PresheafMorphism) -> bool {
        (0..self.schema.sorts().len()).all(|s| f.injective_on(s) && f.surjective_on(s))
    }

    fn is_in_m(&self, f: &PresheafMorphism) -> bool {
        (0..self.schema.sorts().len()).all(|s| f.injective_on(s))
    }

    fn inverse(&self, f: &PresheafMorphism) -> Option<PresheafMorphism> {
        if !self.is_iso(f) {
            return None;
        }
        let maps = f
            .maps
            .iter()
            .map(|m| {
                let mut inv = vec![0; m.len()];
                for (x, &y) in m.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Some(PresheafMorphism {
            source: f.target.clone(),
            target: f.source.clone(),
            maps,
        })
    }

    fn pullback(
        &self,
        f: &PresheafMorphism,
        g: &PresheafMorphism,
    ) -> Result<Span<PresheafMorphism>> {
        let (p, left, right) = self.raw_pullback(f, g)?;
        p.check_constraints()?;
        Ok(Span {
            left: PresheafMorphism {
                source: p.clone(),
                target: f.source.clone(),
                maps: left,
            },
            right: PresheafMorphism {
                source: p,
                target: g.source.clone(),
                maps: right,
            },
        })
    }

    fn pushout(
        &self,
        f: &PresheafMorphism,
        g: &PresheafMorphism,
    ) -> Result<Cospan<PresheafMorphism>> {
        if f.source != g.source {
            return Err(Error::EndpointMismatch("pushout legs have different sources".into()));
        }
        let a = &f.source;
        let relations: Vec<Vec<_>> = (0..self.schema.sorts().len())
            .map(|s| {
                (0..a.size(s))
                    .map(|x| ((0, f.maps[s][x]), (1, g.maps[s][x])))
                    .collect()
            })
            .collect();
        let (d, mut inj) = quotient(&self.schema, &[&f.target, &g.target], &relations)?;
        d.check_constraints()?;
        let right = inj.pop().expect("two injections");
        let left = inj.pop().expect("two injections");
        Ok(Cospan {
            left: PresheafMorphism {
                source: f.target.clone(),
                target: d.clone(),
                maps: left,
            },
            right: PresheafMorphism {
                source: g.target.clone(),
                target: d,
                maps: right,
            },
        })
    }

    fn pushout_complement(
        &self,
        l: &PresheafMorphism,
        m: &PresheafMorphism,
    ) -> Result<(PresheafMorphism, PresheafMorphism)> {
        if !self.is_in_m(l) {
            return Err(Error::NotInM("left leg of the rule is not in M".into()));
        }
        if l.target != m.source {
            return Err(Error::EndpointMismatch("match does not start at the rule's left-hand side".into()));
        }
        let schema = &self.schema;
        let (lhs, host) = (&m.source, &m.target);
        let nsorts = schema.sorts().len();
        let mut deleted: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nsorts];
        for s in 0..nsorts {
            let kept_in_l: BTreeSet<usize> = l.maps[s].iter().copied().collect();
            for x in 0..lhs.size(s) {
                if kept_in_l.contains(&x) {
                    continue;
                }
                for y in 0..lhs.size(s) {
                    if y != x && m.maps[s][x] == m.maps[s][y] {
                        return Err(Error::IdentificationViolation(format!(
                            "match identifies deleted `{}:{}` with `{}:{}`",
                            schema.sorts()[s],
                            lhs.carriers[s][x],
                            schema.sorts()[s],
                            lhs.carriers[s][y]
                        )));
                    }
                }
                deleted[s].insert(m.maps[s][x]);
            }
        }
        for a in schema.proper_arrows() {
            let arrow = &schema.arrows()[a];
            for e in 0..host.size(arrow.source) {
                if deleted[arrow.source].contains(&e) {
                    continue;
                }
                let y = host.action[a][e];
                if deleted[arrow.target].contains(&y) {
                    return Err(Error::DanglingViolation(format!(
                        "kept `{}:{}` has `{}` pointing to deleted `{}:{}`",
                        schema.sorts()[arrow.source],
                        host.carriers[arrow.source][e],
                        arrow.name,
                        schema.sorts()[arrow.target],
                        host.carriers[arrow.target][y]
                    )));
                }
            }
        }
        // D: the kept part of G, with the restricted action
        let kept: Vec<Vec<usize>> = (0..nsorts)
            .map(|s| (0..host.size(s)).filter(|x| !deleted[s].contains(x)).collect())
            .collect();
        let index_in_kept = |s: usize, x: usize| kept[s].binary_search(&x).expect("kept element");
        let carriers: Vec<Vec<String>> = kept
            .iter()
            .enumerate()
            .map(|(s, ks)| ks.iter().map(|&x| host.carriers[s][x].clone()).collect())
            .collect();
        let action = schema
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, arrow)| {
                kept[arrow.source]
                    .iter()
                    .map(|&x| index_in_kept(arrow.target, host.action[a][x]))
                    .collect()
            })
            .collect();
        let context = Presheaf {
            schema: schema.clone(),
            carriers,
            action,
        };
        context.check_constraints()?;
        let f = PresheafMorphism {
            source: context.clone(),
            target: host.clone(),
            maps: kept.clone(),
        };
        let k = PresheafMorphism {
            source: l.source.clone(),
            target: context,
            maps: (0..nsorts)
                .map(|s| {
                    l.maps[s]
                        .iter()
                        .map(|&x| index_in_kept(s, m.maps[s][x]))
                        .collect()
                })
                .collect(),
        };
        let sq = Square::new(l.clone(), k.clone(), m.clone(), f.clone());
        if !self.verify_pushout(&sq) {
            return Err(Error::Invariant(
                "constructed pushout complement does not verify as a pushout".into(),
            ));
        }
        Ok((k, f))
    }

    fn verify_pushout(&self, sq: &Square<PresheafMorphism>) -> bool {
        if !self.check_square(sq) {
            return false;
        }
        let Ok(po) = self.pushout(&sq.top, &sq.left) else {
            return false;
        };
        let canonical = Square::new(sq.top.clone(), sq.left.clone(), po.left, po.right);
        self.pushout_mediator(&canonical, &sq.right, &sq.bottom)
            .map(|u| self.is_iso(&u))
            .unwrap_or(false)
    }

    fn verify_pullback(&self, sq: &Square<PresheafMorphism>) -> bool {
        if !self.check_square(sq) {
            return false;
        }
        let Ok((p, left, right)) = self.raw_pullback(&sq.right, &sq.bottom) else {
            return false;
        };
        let canonical = Square::new(
            PresheafMorphism {
                source: p.clone(),
                target: sq.right.source.clone(),
                maps: left,
            },
            PresheafMorphism {
                source: p,
                target: sq.bottom.source.clone(),
                maps: right,
            },
            sq.right.clone(),
            sq.bottom.clone(),
        );
        self.pullback_mediator(&canonical, &sq.top, &sq.left)
            .map(|u| self.is_iso(&u))
            .unwrap_or(false)
    }

    fn pushout_mediator(
        &self,
        sq: &Square<PresheafMorphism>,
        via_right: &PresheafMorphism,
        via_bottom: &PresheafMorphism,
    ) -> Result<PresheafMorphism> {
        let corner = &sq.right.target;
        if via_right.source != sq.right.source || via_bottom.source != sq.bottom.source {
            return Err(Error::EndpointMismatch("cocone does not fit the square".into()));
        }
        if via_right.target != via_bottom.target {
            return Err(Error::EndpointMismatch("cocone legs have different targets".into()));
        }
        let mut maps = Vec::new();
        for s in 0..self.schema.sorts().len() {
            let mut v: Vec<Option<usize>> = vec![None; corner.size(s)];
            let legs = [(&sq.right, via_right), (&sq.bottom, via_bottom)];
            for (into_corner, out) in legs {
                for (x, &d) in into_corner.maps[s].iter().enumerate() {
                    let y = out.maps[s][x];
                    match v[d] {
                        Some(prev) if prev != y => {
                            return Err(Error::Invariant(
                                "cocone is not compatible with the square".into(),
                            ))
                        }
                        _ => v[d] = Some(y),
                    }
                }
            }
            let v = v
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Invariant("square corner is not jointly covered".into()))?;
            maps.push(v);
        }
        PresheafMorphism::from_parts(corner.clone(), via_right.target.clone(), maps)
    }

    fn pullback_mediator(
        &self,
        sq: &Square<PresheafMorphism>,
        to_b: &PresheafMorphism,
        to_c: &PresheafMorphism,
    ) -> Result<PresheafMorphism> {
        let apex = &sq.top.source;
        if to_b.target != sq.top.target || to_c.target != sq.left.target {
            return Err(Error::EndpointMismatch("cone does not fit the square".into()));
        }
        if to_b.source != to_c.source {
            return Err(Error::EndpointMismatch("cone legs have different sources".into()));
        }
        let mut maps = Vec::new();
        for s in 0..self.schema.sorts().len() {
            let mut v = Vec::with_capacity(to_b.source.size(s));
            for y in 0..to_b.source.size(s) {
                let (b, c) = (to_b.maps[s][y], to_c.maps[s][y]);
                let mut hits = (0..apex.size(s))
                    .filter(|&a| sq.top.maps[s][a] == b && sq.left.maps[s][a] == c);
                let a = hits
                    .next()
                    .ok_or_else(|| Error::Invariant("cone does not factor through the apex".into()))?;
                if hits.next().is_some() {
                    return Err(Error::Invariant("apex is not a pullback".into()));
                }
                v.push(a);
            }
            maps.push(v);
        }
        PresheafMorphism::from_parts(to_b.source.clone(), apex.clone(), maps)
    }

    fn colimit(&self, diagram: &Diagram<Presheaf, PresheafMorphism>) -> Result<Cocone<Self>> {
        for o in &diagram.objects {
            if !self.same_schema(o) {
                return Err(Error::EndpointMismatch("diagram object over another schema".into()));
            }
        }
        let mut relations = vec![Vec::new(); self.schema.sorts().len()];
        for (i, j, h) in &diagram.arrows {
            let (Some(src), Some(tgt)) = (diagram.objects.get(*i), diagram.objects.get(*j)) else {
                return Err(Error::EndpointMismatch("diagram arrow index out of range".into()));
            };
            if &h.source != src || &h.target != tgt {
                return Err(Error::EndpointMismatch("diagram arrow endpoints disagree".into()));
            }
            for (s, rel) in relations.iter_mut().enumerate() {
                for x in 0..src.size(s) {
                    rel.push(((*i, x), (*j, h.maps[s][x])));
                }
            }
        }
        let parts: Vec<&Presheaf> = diagram.objects.iter().collect();
        let (apex, inj) = quotient(&self.schema, &parts, &relations)?;
        let injections = inj
            .into_iter()
            .zip(&diagram.objects)
            .map(|(maps, o)| PresheafMorphism {
                source: o.clone(),
                target: apex.clone(),
                maps,
            })
            .collect();
        Ok(Cocone { apex, injections })
    }

    fn describe_object(&self, a: &Presheaf) -> String {
        a.to_string()
    }
}
