use std::any::Any;

use serde::Serialize;

use crate::category::{Category, Cocone, Diagram};
use crate::error::{Error, Result};
use crate::independence::{independence_pairs, is_strong};
use crate::presheaf::{PresheafCat, PresheafMorphism};
use crate::rewriting::{abstraction_equivalent, Derivation, RewritingSystem};

use super::{apply_switch_at, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "OK")]
    Ok,
    MultiplePairs,
    NonStrongPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositionReport {
    pub position: usize,
    pub pairs: usize,
    pub strong: Vec<bool>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WellSwitchingReport {
    pub positions: Vec<PositionReport>,
}

impl WellSwitchingReport {
    pub fn all_ok(&self) -> bool {
        self.positions.iter().all(|p| p.verdict == Verdict::Ok)
    }
}

/// For each pair of consecutive steps: how many independence pairs, and
/// whether each is strong.
pub fn check_well_switching_on<C: Category>(cat: &C, d: &Derivation<C>) -> WellSwitchingReport {
    let positions = (0..d.len().saturating_sub(1))
        .map(|i| {
            let (s0, s1) = (d.step(i), d.step(i + 1));
            let strong: Vec<bool> = independence_pairs(cat, s0, s1)
                .iter()
                .map(|p| is_strong(cat, s0, s1, p))
                .collect();
            let verdict = if strong.iter().any(|s| !s) {
                Verdict::NonStrongPair
            } else if strong.len() > 1 {
                Verdict::MultiplePairs
            } else {
                Verdict::Ok
            };
            PositionReport {
                position: i,
                pairs: strong.len(),
                strong,
                verdict,
            }
        })
        .collect();
    WellSwitchingReport { positions }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleRootReport {
    pub rule: String,
    /// Every element of the left-hand side is reachable from a root element.
    pub covered: bool,
    /// Elements of the left-hand side not reachable from roots, as `sort:id`.
    pub uncovered: Vec<String>,
    /// The right leg is injective on every root sort.
    pub mono_on_roots: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootReport {
    pub rules: Vec<RuleRootReport>,
    pub root_preserving: bool,
}

/// Per-rule root coverage of `L` and injectivity of `r` on root sorts.
pub fn check_root_preserving<C: Category>(system: &RewritingSystem<C>) -> Result<RootReport> {
    let cat = (system.category() as &dyn Any)
        .downcast_ref::<PresheafCat>()
        .ok_or(Error::NotPresheafInstance)?;
    let schema = cat.schema();
    let roots = schema.roots();
    let mut rules = Vec::new();
    for rule in system.rules() {
        let l = (rule.l() as &dyn Any)
            .downcast_ref::<PresheafMorphism>()
            .ok_or(Error::NotPresheafInstance)?;
        let r = (rule.r() as &dyn Any)
            .downcast_ref::<PresheafMorphism>()
            .ok_or(Error::NotPresheafInstance)?;
        let lhs = l.target();
        let mut uncovered = Vec::new();
        for (s, sort) in schema.sorts().iter().enumerate() {
            for x in 0..lhs.size(s) {
                let hit = schema.arrows().iter().enumerate().any(|(a, arrow)| {
                    arrow.target == s
                        && roots.contains(&arrow.source)
                        && (0..lhs.size(arrow.source)).any(|y| lhs.act(a, y) == x)
                });
                if !hit {
                    uncovered.push(format!("{sort}:{}", lhs.carrier(s)[x]));
                }
            }
        }
        let mono_on_roots = roots.iter().all(|&s| {
            let comp = r.component(s);
            let mut seen = comp.to_vec();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == comp.len()
        });
        rules.push(RuleRootReport {
            rule: rule.name().to_string(),
            covered: uncovered.is_empty(),
            uncovered,
            mono_on_roots,
        });
    }
    let root_preserving = rules.iter().all(|r| r.covered && r.mono_on_roots);
    Ok(RootReport {
        rules,
        root_preserving,
    })
}

/// Colimit of the zig-zag `G0 ← D0 → G1 ← D1 → … → Gn`. Object `2i` of the
/// diagram is `G_i`, object `2i+1` is `D_i`.
pub fn derivation_colimit<C: Category>(cat: &C, d: &Derivation<C>) -> Result<Cocone<C>> {
    let mut objects = vec![d.start().clone()];
    let mut arrows = Vec::new();
    for (i, s) in d.steps().iter().enumerate() {
        objects.push(s.context(cat).clone());
        objects.push(s.target(cat).clone());
        arrows.push((2 * i + 1, 2 * i, s.f.clone()));
        arrows.push((2 * i + 1, 2 * i + 2, s.g.clone()));
    }
    cat.colimit(&Diagram { objects, arrows })
}

/// Search for an isomorphism `ξ` between the two derivation colimits that
/// sends the image of every match and co-match of `d` to that of the step
/// `σ` assigns it to in `d2`.
pub fn check_consistent_permutation<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    d2: &Derivation<C>,
    sigma: &Permutation,
) -> Result<Option<C::Morphism>> {
    if d.len() != d2.len() || sigma.len() != d.len() {
        return Err(Error::InvalidDerivation("lengths differ".into()));
    }
    for i in 0..d.len() {
        if d.step(i).rule.name() != d2.step(sigma.apply(i)).rule.name() {
            return Err(Error::InvalidDerivation(format!(
                "step {i} and its image {} apply different rules",
                sigma.apply(i)
            )));
        }
    }
    let c1 = derivation_colimit(cat, d)?;
    let c2 = derivation_colimit(cat, d2)?;
    let mut pins = Vec::new();
    for i in 0..d.len() {
        let j = sigma.apply(i);
        let (a, b) = (d.step(i), d2.step(j));
        pins.push((
            cat.compose(&a.m, &c1.injections[2 * i])?,
            cat.compose(&b.m, &c2.injections[2 * j])?,
        ));
        pins.push((
            cat.compose(&a.h, &c1.injections[2 * i + 2])?,
            cat.compose(&b.h, &c2.injections[2 * j + 2])?,
        ));
    }
    Ok(cat.isos_under(&c1.apex, &c2.apex, &pins).into_iter().next())
}

/// Run the switching sequences `⟨0⟩⟨1⟩⟨0⟩` and `⟨1⟩⟨0⟩⟨1⟩` on a three-step
/// derivation and compare the results. Each switch must have exactly one
/// independence pair.
pub fn consistency_probe<C: Category>(cat: &C, d: &Derivation<C>) -> Result<bool> {
    if d.len() != 3 {
        return Err(Error::InvalidDerivation(format!(
            "the probe needs exactly three steps, got {}",
            d.len()
        )));
    }
    let run = |sequence: usize, positions: [usize; 3]| -> Result<Derivation<C>> {
        let mut current = d.clone();
        for (switch, &position) in positions.iter().enumerate() {
            let blocked = |reason: String| Error::SequenceBlocked {
                sequence,
                switch,
                position,
                reason,
            };
            let pairs = independence_pairs(cat, current.step(position), current.step(position + 1));
            match pairs.len() {
                0 => return Err(blocked("steps are not sequentially independent".into())),
                1 => {}
                n => return Err(blocked(format!("{n} independence pairs, choice is ambiguous"))),
            }
            current = apply_switch_at(cat, &current, position, &pairs[0])
                .map_err(|e| blocked(e.to_string()))?;
        }
        Ok(current)
    };
    let a = run(0, [0, 1, 0])?;
    let b = run(1, [1, 0, 1])?;
    Ok(abstraction_equivalent(cat, &a, &b).is_some())
}
