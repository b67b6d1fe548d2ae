//! Finite posets as thin categories, with `M` the isomorphisms.
//!
//! Pushouts are least upper bounds and pullbacks greatest lower bounds; both
//! may be missing, which is what makes this instance interesting.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{Category, Cospan, Span, Square};
use crate::error::{Error, Result};

/// JSON shape of a poset: elements and generating `x ≤ y` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<[String; 2]>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    elements: Vec<String>,
    index: BTreeMap<String, usize>,
    leq: Vec<Vec<bool>>,
    generators: Vec<[String; 2]>,
}

impl FinitePoset {
    /// Build from generating pairs; the order is their reflexive-transitive
    /// closure, which must be antisymmetric.
    pub fn new(elements: &[&str], leq: &[(&str, &str)]) -> Result<Self> {
        FinitePoset::from_spec(&PosetSpec {
            elements: elements.iter().map(|s| s.to_string()).collect(),
            leq: leq.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        })
    }

    pub fn from_spec(spec: &PosetSpec) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, e) in spec.elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidObject(format!("duplicate poset element `{e}`")));
            }
        }
        let n = spec.elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for [a, b] in &spec.leq {
            let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) else {
                return Err(Error::InvalidObject(format!("unknown element in `{a} ≤ {b}`")));
            };
            leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidObject(format!(
                        "`{}` and `{}` are below each other",
                        spec.elements[i], spec.elements[j]
                    )));
                }
            }
        }
        Ok(FinitePoset {
            elements: spec.elements.clone(),
            index,
            leq,
            generators: spec.leq.clone(),
        })
    }

    pub fn to_spec(&self) -> PosetSpec {
        PosetSpec {
            elements: self.elements.clone(),
            leq: self.generators.clone(),
        }
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn contains(&self, x: &str) -> bool {
        self.index.contains_key(x)
    }

    pub fn leq(&self, x: &str, y: &str) -> bool {
        match (self.index.get(x), self.index.get(y)) {
            (Some(&i), Some(&j)) => self.leq[i][j],
            _ => false,
        }
    }

    pub fn upper_bounds(&self, x: &str, y: &str) -> Vec<&str> {
        self.elements
            .iter()
            .filter(|z| self.leq(x, z) && self.leq(y, z))
            .map(String::as_str)
            .collect()
    }

    pub fn lower_bounds(&self, x: &str, y: &str) -> Vec<&str> {
        self.elements
            .iter()
            .filter(|z| self.leq(z, x) && self.leq(z, y))
            .map(String::as_str)
            .collect()
    }

    pub fn lub(&self, x: &str, y: &str) -> Option<&str> {
        let ub = self.upper_bounds(x, y);
        ub.iter().copied().find(|z| ub.iter().all(|w| self.leq(z, w)))
    }

    pub fn glb(&self, x: &str, y: &str) -> Option<&str> {
        let lb = self.lower_bounds(x, y);
        lb.iter().copied().find(|z| lb.iter().all(|w| self.leq(w, z)))
    }
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinitePoset{:?}", self.elements)
    }
}

/// The unique arrow `source ≤ target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetArrow {
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone)]
pub struct PosetCat {
    poset: Arc<FinitePoset>,
}

impl PosetCat {
    pub fn new(poset: FinitePoset) -> Self {
        PosetCat {
            poset: Arc::new(poset),
        }
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn arrow(&self, x: &str, y: &str) -> Result<PosetArrow> {
        if !self.poset.contains(x) || !self.poset.contains(y) {
            return Err(Error::UnknownName(format!("poset element `{x}` or `{y}`")));
        }
        if !self.poset.leq(x, y) {
            return Err(Error::InvalidMorphism(format!("`{x}` is not below `{y}`")));
        }
        Ok(PosetArrow {
            source: x.to_string(),
            target: y.to_string(),
        })
    }

    fn square_shape(&self, sq: &Square<PosetArrow>) -> bool {
        crate::category::square_endpoints_match(self, sq)
    }
}

impl Category for PosetCat {
    type Object = String;
    type Morphism = PosetArrow;

    fn source<'a>(&self, f: &'a PosetArrow) -> &'a String {
        &f.source
    }

    fn target<'a>(&self, f: &'a PosetArrow) -> &'a String {
        &f.target
    }

    fn identity(&self, a: &String) -> PosetArrow {
        PosetArrow {
            source: a.clone(),
            target: a.clone(),
        }
    }

    fn compose(&self, f: &PosetArrow, g: &PosetArrow) -> Result<PosetArrow> {
        if f.target != g.source {
            return Err(Error::EndpointMismatch(format!(
                "cannot compose {}≤{} with {}≤{}",
                f.source, f.target, g.source, g.target
            )));
        }
        Ok(PosetArrow {
            source: f.source.clone(),
            target: g.target.clone(),
        })
    }

    fn hom(&self, a: &String, b: &String) -> Vec<PosetArrow> {
        self.arrow(a, b).into_iter().collect()
    }

    fn isos_under(&self, a: &String, b: &String, pins: &[(PosetArrow, PosetArrow)]) -> Vec<PosetArrow> {
        let fits = pins
            .iter()
            .all(|(p, q)| &p.target == a && &q.target == b && p.source == q.source);
        if a == b && fits {
            vec![self.identity(a)]
        } else {
            Vec::new()
        }
    }

    fn is_mono(&self, _: &PosetArrow) -> bool {
        true
    }

    fn is_epi(&self, _: &PosetArrow) -> bool {
        true
    }

    fn is_iso(&self, f: &PosetArrow) -> bool {
        f.source == f.target
    }

    fn is_in_m(&self, f: &PosetArrow) -> bool {
        self.is_iso(f)
    }

    fn inverse(&self, f: &PosetArrow) -> Option<PosetArrow> {
        self.is_iso(f).then(|| f.clone())
    }

    fn pullback(&self, f: &PosetArrow, g: &PosetArrow) -> Result<Span<PosetArrow>> {
        if f.target != g.target {
            return Err(Error::EndpointMismatch("pullback legs have different targets".into()));
        }
        let p = self.poset.glb(&f.source, &g.source).ok_or_else(|| {
            Error::NoPullback(format!("`{}` and `{}` have no meet", f.source, g.source))
        })?;
        Ok(Span {
            left: self.arrow(p, &f.source)?,
            right: self.arrow(p, &g.source)?,
        })
    }

    fn pushout(&self, f: &PosetArrow, g: &PosetArrow) -> Result<Cospan<PosetArrow>> {
        if f.source != g.source {
            return Err(Error::EndpointMismatch("pushout legs have different sources".into()));
        }
        let d = self.poset.lub(&f.target, &g.target).ok_or_else(|| {
            Error::NoPushout(format!(
                "upper bounds of `{}` and `{}` are {:?}, with no least one",
                f.target,
                g.target,
                self.poset.upper_bounds(&f.target, &g.target)
            ))
        })?;
        Ok(Cospan {
            left: self.arrow(&f.target, d)?,
            right: self.arrow(&g.target, d)?,
        })
    }

    fn pushout_complement(&self, l: &PosetArrow, m: &PosetArrow) -> Result<(PosetArrow, PosetArrow)> {
        if !self.is_in_m(l) {
            return Err(Error::NotInM("left leg of the rule is not an identity".into()));
        }
        if l.target != m.source {
            return Err(Error::EndpointMismatch("match does not start at the rule's left-hand side".into()));
        }
        Ok((self.arrow(&l.source, &m.target)?, self.identity(&m.target)))
    }

    fn verify_pushout(&self, sq: &Square<PosetArrow>) -> bool {
        self.square_shape(sq)
            && self.poset.lub(&sq.top.target, &sq.left.target) == Some(sq.right.target.as_str())
    }

    fn verify_pullback(&self, sq: &Square<PosetArrow>) -> bool {
        self.square_shape(sq)
            && self.poset.glb(&sq.right.source, &sq.bottom.source) == Some(sq.top.source.as_str())
    }

    fn pushout_mediator(
        &self,
        sq: &Square<PosetArrow>,
        via_right: &PosetArrow,
        via_bottom: &PosetArrow,
    ) -> Result<PosetArrow> {
        if via_right.source != sq.right.source
            || via_bottom.source != sq.bottom.source
            || via_right.target != via_bottom.target
        {
            return Err(Error::EndpointMismatch("cocone does not fit the square".into()));
        }
        self.arrow(&sq.right.target, &via_right.target)
            .map_err(|_| Error::Invariant("square corner is not below the cocone".into()))
    }

    fn pullback_mediator(
        &self,
        sq: &Square<PosetArrow>,
        to_b: &PosetArrow,
        to_c: &PosetArrow,
    ) -> Result<PosetArrow> {
        if to_b.target != sq.top.target || to_c.target != sq.left.target || to_b.source != to_c.source {
            return Err(Error::EndpointMismatch("cone does not fit the square".into()));
        }
        self.arrow(&to_b.source, &sq.top.source)
            .map_err(|_| Error::Invariant("cone is not below the square apex".into()))
    }

    fn describe_object(&self, a: &String) -> String {
        a.clone()
    }
}
