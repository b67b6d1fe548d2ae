//! DPO rules, matches, direct derivations and derivations.

use std::sync::Arc;

use crate::category::{Category, Square};
use crate::error::{Error, Result};

/// A rule `L <-l- K -r-> R` with `l ∈ M`.
#[derive(Debug, Clone)]
pub struct Rule<C: Category> {
    name: String,
    l: C::Morphism,
    r: C::Morphism,
    linear: bool,
}

impl<C: Category> Rule<C> {
    pub fn new(cat: &C, name: &str, l: C::Morphism, r: C::Morphism) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidRule {
            rule: name.to_string(),
            reason: reason.to_string(),
        };
        if cat.source(&l) != cat.source(&r) {
            return Err(invalid("legs do not share an interface"));
        }
        if !cat.is_in_m(&l) {
            return Err(invalid("left leg is not in M"));
        }
        let linear = cat.is_in_m(&r);
        Ok(Rule {
            name: name.to_string(),
            l,
            r,
            linear,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn l(&self) -> &C::Morphism {
        &self.l
    }

    pub fn r(&self) -> &C::Morphism {
        &self.r
    }

    /// Both legs in `M`.
    pub fn is_linear(&self) -> bool {
        self.linear
    }

    pub fn lhs<'a>(&'a self, cat: &C) -> &'a C::Object {
        cat.target(&self.l)
    }

    pub fn interface<'a>(&'a self, cat: &C) -> &'a C::Object {
        cat.source(&self.l)
    }

    pub fn rhs<'a>(&'a self, cat: &C) -> &'a C::Object {
        cat.target(&self.r)
    }
}

/// How a plan step picks its match.
#[derive(Debug, Clone)]
pub enum MatchSelector<M> {
    /// Position in the [`RewritingSystem::find_matches`] order.
    Index(usize),
    Morphism(M),
}

/// A category instance together with a finite set of left-linear rules.
#[derive(Debug, Clone)]
pub struct RewritingSystem<C: Category> {
    category: C,
    rules: Vec<Arc<Rule<C>>>,
    mono_matches_only: bool,
}

impl<C: Category> RewritingSystem<C> {
    pub fn new(category: C, rules: Vec<Rule<C>>) -> Result<Self> {
        for (i, a) in rules.iter().enumerate() {
            if rules[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidRule {
                    rule: a.name.clone(),
                    reason: "duplicate rule name".into(),
                });
            }
        }
        Ok(RewritingSystem {
            category,
            rules: rules.into_iter().map(Arc::new).collect(),
            mono_matches_only: false,
        })
    }

    pub fn with_mono_matches_only(mut self, on: bool) -> Self {
        self.mono_matches_only = on;
        self
    }

    pub fn category(&self) -> &C {
        &self.category
    }

    pub fn rules(&self) -> &[Arc<Rule<C>>] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Result<&Arc<Rule<C>>> {
        self.rules
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownName(format!("rule `{name}`")))
    }

    pub fn is_linear(&self) -> bool {
        self.rules.iter().all(|r| r.linear)
    }

    /// All matches `L → G` in hom-set order, optionally only those where the
    /// gluing conditions hold.
    pub fn find_matches(
        &self,
        rule: &Rule<C>,
        g: &C::Object,
        require_applicable: bool,
    ) -> Vec<C::Morphism> {
        let cat = &self.category;
        cat.hom(rule.lhs(cat), g)
            .into_iter()
            .filter(|m| !self.mono_matches_only || cat.is_mono(m))
            .filter(|m| !require_applicable || cat.pushout_complement(&rule.l, m).is_ok())
            .collect()
    }

    /// One DPO step: pushout complement of `(l, m)`, then pushout of `r`
    /// along `k`.
    pub fn apply(&self, rule: &Arc<Rule<C>>, m: &C::Morphism) -> Result<DirectDerivation<C>> {
        let cat = &self.category;
        if cat.source(m) != rule.lhs(cat) {
            return Err(Error::EndpointMismatch(format!(
                "match for `{}` does not start at its left-hand side",
                rule.name
            )));
        }
        if self.mono_matches_only && !cat.is_mono(m) {
            return Err(Error::InvalidMorphism(format!(
                "match for `{}` is not mono",
                rule.name
            )));
        }
        let (k, f) = cat.pushout_complement(&rule.l, m)?;
        let po = cat.pushout(&k, &rule.r)?;
        let step = DirectDerivation {
            rule: rule.clone(),
            m: m.clone(),
            k,
            h: po.right,
            f,
            g: po.left,
        };
        step.verify(cat)?;
        Ok(step)
    }

    pub fn apply_named(&self, rule: &str, m: &C::Morphism) -> Result<DirectDerivation<C>> {
        let rule = self.rule(rule)?.clone();
        self.apply(&rule, m)
    }

    /// Chain a plan of `(rule name, selector)` steps from `g0`.
    pub fn derive(
        &self,
        g0: &C::Object,
        plan: &[(&str, MatchSelector<C::Morphism>)],
    ) -> Result<Derivation<C>> {
        let mut current = g0.clone();
        let mut steps = Vec::with_capacity(plan.len());
        for (name, selector) in plan {
            let rule = self.rule(name)?.clone();
            let m = match selector {
                MatchSelector::Index(i) => {
                    let matches = self.find_matches(&rule, &current, false);
                    let available = matches.len();
                    matches
                        .into_iter()
                        .nth(*i)
                        .ok_or(Error::MatchSelectorOutOfRange {
                            index: *i,
                            available,
                        })?
                }
                MatchSelector::Morphism(m) => m.clone(),
            };
            if self.category.target(&m) != &current {
                return Err(Error::EndpointMismatch(format!(
                    "match for `{name}` does not land in the current object"
                )));
            }
            let step = self.apply(&rule, &m)?;
            current = step.target(&self.category).clone();
            steps.push(step);
        }
        Ok(Derivation {
            start: g0.clone(),
            steps,
        })
    }
}

/// One double-pushout diagram
///
/// ```text
///   L <-l-- K --r-> R
///   m|     k|      |h
///   v       v      v
///   G <-f-- D --g-> H
/// ```
#[derive(Debug, Clone)]
pub struct DirectDerivation<C: Category> {
    pub rule: Arc<Rule<C>>,
    pub m: C::Morphism,
    pub k: C::Morphism,
    pub h: C::Morphism,
    pub f: C::Morphism,
    pub g: C::Morphism,
}

impl<C: Category> DirectDerivation<C> {
    pub fn source<'a>(&'a self, cat: &C) -> &'a C::Object {
        cat.target(&self.m)
    }

    pub fn context<'a>(&'a self, cat: &C) -> &'a C::Object {
        cat.source(&self.f)
    }

    pub fn target<'a>(&'a self, cat: &C) -> &'a C::Object {
        cat.target(&self.h)
    }

    pub fn left_square(&self) -> Square<C::Morphism> {
        Square::new(self.rule.l.clone(), self.k.clone(), self.m.clone(), self.f.clone())
    }

    pub fn right_square(&self) -> Square<C::Morphism> {
        Square::new(self.rule.r.clone(), self.k.clone(), self.h.clone(), self.g.clone())
    }

    /// Both squares are pushouts, the left one also a pullback, and `f ∈ M`.
    pub fn verify(&self, cat: &C) -> Result<()> {
        let name = self.rule.name();
        if !cat.verify_pushout(&self.left_square()) {
            return Err(Error::Invariant(format!("left square of `{name}` is not a pushout")));
        }
        if !cat.verify_pullback(&self.left_square()) {
            return Err(Error::Invariant(format!("left square of `{name}` is not a pullback")));
        }
        if !cat.verify_pushout(&self.right_square()) {
            return Err(Error::Invariant(format!("right square of `{name}` is not a pushout")));
        }
        if !cat.is_in_m(&self.f) {
            return Err(Error::Invariant(format!("context arrow of `{name}` is not in M")));
        }
        Ok(())
    }
}

/// A chain of direct derivations, possibly empty.
#[derive(Debug, Clone)]
pub struct Derivation<C: Category> {
    start: C::Object,
    steps: Vec<DirectDerivation<C>>,
}

impl<C: Category> Derivation<C> {
    pub fn empty(g: C::Object) -> Self {
        Derivation {
            start: g,
            steps: Vec::new(),
        }
    }

    pub fn new(cat: &C, start: C::Object, steps: Vec<DirectDerivation<C>>) -> Result<Self> {
        let mut current = &start;
        for (i, s) in steps.iter().enumerate() {
            if s.source(cat) != current {
                return Err(Error::InvalidDerivation(format!(
                    "step {i} does not start where the previous one ends"
                )));
            }
            current = s.target(cat);
        }
        Ok(Derivation { start, steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> &C::Object {
        &self.start
    }

    pub fn end<'a>(&'a self, cat: &C) -> &'a C::Object {
        self.steps.last().map_or(&self.start, |s| s.target(cat))
    }

    pub fn steps(&self) -> &[DirectDerivation<C>] {
        &self.steps
    }

    pub fn step(&self, i: usize) -> &DirectDerivation<C> {
        &self.steps[i]
    }

    /// `G_0, …, G_n`.
    pub fn objects(&self, cat: &C) -> Vec<C::Object> {
        std::iter::once(self.start.clone())
            .chain(self.steps.iter().map(|s| s.target(cat).clone()))
            .collect()
    }

    pub fn rule_names(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.rule.name()).collect()
    }

    pub fn prefix(&self, n: usize) -> Self {
        Derivation {
            start: self.start.clone(),
            steps: self.steps[..n.min(self.steps.len())].to_vec(),
        }
    }

    /// Replace steps `i, i+1` with `pair`, which must span the same objects.
    pub fn splice(&self, cat: &C, i: usize, pair: &Derivation<C>) -> Result<Self> {
        if i + 2 > self.steps.len() || pair.len() != 2 {
            return Err(Error::InvalidDerivation("splice out of range".into()));
        }
        let mut steps = self.steps[..i].to_vec();
        steps.extend(pair.steps.iter().cloned());
        steps.extend(self.steps[i + 2..].iter().cloned());
        Derivation::new(cat, self.start.clone(), steps)
    }

    /// Steps `i, i+1` as a stand-alone two-step derivation.
    pub fn window(&self, cat: &C, i: usize) -> Result<Self> {
        if i + 2 > self.steps.len() {
            return Err(Error::InvalidDerivation(format!("no steps {i}, {}", i + 1)));
        }
        Ok(Derivation {
            start: self.steps[i].source(cat).clone(),
            steps: self.steps[i..i + 2].to_vec(),
        })
    }

    pub fn verify(&self, cat: &C) -> Result<()> {
        self.steps.iter().try_for_each(|s| s.verify(cat))
    }
}

/// Isomorphisms `φ_{G_i}` and `φ_{D_i}` witnessing abstraction equivalence.
#[derive(Debug, Clone)]
pub struct AbstractionFamily<M> {
    pub objects: Vec<M>,
    pub contexts: Vec<M>,
}

/// Search for a family of isomorphisms between two derivations of the same
/// rule sequence that commutes with every arrow of every step.
///
/// The family is determined by its first component: each `φ_{D_i}` is the
/// lift of `φ_{G_i} ∘ f_i` through the mono `f′_i`, and each `φ_{G_{i+1}}`
/// is the mediator out of the pushout `H_i`.
pub fn abstraction_equivalent<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    e: &Derivation<C>,
) -> Option<AbstractionFamily<C::Morphism>> {
    if d.len() != e.len() {
        return None;
    }
    for (a, b) in d.steps.iter().zip(&e.steps) {
        if a.rule.name() != b.rule.name() || a.rule.l != b.rule.l || a.rule.r != b.rule.r {
            return None;
        }
    }
    let pins: Vec<_> = match (d.steps.first(), e.steps.first()) {
        (Some(a), Some(b)) => vec![(a.m.clone(), b.m.clone())],
        _ => Vec::new(),
    };
    cat.isos_under(&d.start, &e.start, &pins)
        .into_iter()
        .find_map(|phi| extend_family(cat, d, e, phi))
}

fn extend_family<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    e: &Derivation<C>,
    phi0: C::Morphism,
) -> Option<AbstractionFamily<C::Morphism>> {
    let mut objects = vec![phi0];
    let mut contexts = Vec::new();
    for (a, b) in d.steps.iter().zip(&e.steps) {
        let phi_g = objects.last().expect("non-empty");
        if cat.compose(&a.m, phi_g).ok()? != b.m {
            return None;
        }
        let phi_d = cat.lift_along_mono(&b.f, &cat.compose(&a.f, phi_g).ok()?)?;
        if !cat.is_iso(&phi_d) || cat.compose(&a.k, &phi_d).ok()? != b.k {
            return None;
        }
        let via_bottom = cat.compose(&phi_d, &b.g).ok()?;
        let next = cat.pushout_mediator(&a.right_square(), &b.h, &via_bottom).ok()?;
        if !cat.is_iso(&next) {
            return None;
        }
        contexts.push(phi_d);
        objects.push(next);
    }
    Some(AbstractionFamily { objects, contexts })
}
