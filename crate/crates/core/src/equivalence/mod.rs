//! Switching sequences, switch equivalence and canonical switching
//! sequences, plus system-level diagnostics.

mod diagnostics;
mod permutation;

use std::collections::{HashMap, VecDeque};

pub use diagnostics::{
    check_consistent_permutation, check_root_preserving, check_well_switching_on,
    consistency_probe, derivation_colimit, PositionReport, RootReport, RuleRootReport, Verdict,
    WellSwitchingReport,
};
pub use permutation::{consists_of_inversions, Permutation};

use crate::category::Category;
use crate::error::{Error, Result};
use crate::independence::{independence_pairs, pair_is_valid, switch, IndependencePair};
use crate::rewriting::{abstraction_equivalent, Derivation};

/// One switch `D_{k-1} ⇝⟨i⟩ D_k`.
#[derive(Debug, Clone)]
pub struct SwitchingStep<C: Category> {
    pub position: usize,
    /// Index of the pair in the `independence_pairs` order at that point.
    pub pair_index: usize,
    pub pair: IndependencePair<C::Morphism>,
    pub result: Derivation<C>,
}

#[derive(Debug, Clone)]
pub struct SwitchingSequence<C: Category> {
    pub start: Derivation<C>,
    pub steps: Vec<SwitchingStep<C>>,
}

impl<C: Category> SwitchingSequence<C> {
    pub fn empty(start: Derivation<C>) -> Self {
        SwitchingSequence {
            start,
            steps: Vec::new(),
        }
    }

    pub fn positions(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.position).collect()
    }

    /// `ν_{1,m} = ν_m ∘ … ∘ ν_1`.
    pub fn permutation(&self) -> Permutation {
        Permutation::of_switches(self.start.len(), &self.positions())
    }

    pub fn consists_of_inversions(&self) -> bool {
        consists_of_inversions(self.start.len(), &self.positions())
    }

    pub fn end(&self) -> &Derivation<C> {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Replace steps `i, i+1` of `d` by their switch along `pair`.
pub fn apply_switch_at<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    i: usize,
    pair: &IndependencePair<C::Morphism>,
) -> Result<Derivation<C>> {
    if i + 2 > d.len() {
        return Err(Error::InvalidDerivation(format!(
            "no steps {i}, {} in a derivation of length {}",
            i + 1,
            d.len()
        )));
    }
    let (s0, s1) = (d.step(i), d.step(i + 1));
    if independence_pairs(cat, s0, s1).is_empty() {
        return Err(Error::NotIndependent(i, i + 1));
    }
    if !pair_is_valid(cat, s0, s1, pair) {
        return Err(Error::PairInvalid(format!("not an independence pair for steps {i}, {}", i + 1)));
    }
    let switched = switch(cat, s0, s1, pair)?;
    d.splice(cat, i, &switched.derivation)
}

/// Like [`apply_switch_at`], choosing the pair by its index.
pub fn apply_switch_at_index<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    i: usize,
    pair_index: usize,
) -> Result<(Derivation<C>, IndependencePair<C::Morphism>)> {
    if i + 2 > d.len() {
        return Err(Error::InvalidDerivation(format!("no steps {i}, {}", i + 1)));
    }
    let pairs = independence_pairs(cat, d.step(i), d.step(i + 1));
    if pairs.is_empty() {
        return Err(Error::NotIndependent(i, i + 1));
    }
    let pair = pairs.get(pair_index).cloned().ok_or_else(|| {
        Error::PairInvalid(format!("pair {pair_index} of {} at position {i}", pairs.len()))
    })?;
    Ok((apply_switch_at(cat, d, i, &pair)?, pair))
}

/// Every derivation reachable by one switch, in (position, pair) order.
/// Non-switchable pairs are skipped.
pub fn switch_moves<C: Category>(cat: &C, d: &Derivation<C>) -> Vec<SwitchingStep<C>> {
    let mut out = Vec::new();
    for i in 0..d.len().saturating_sub(1) {
        let pairs = independence_pairs(cat, d.step(i), d.step(i + 1));
        for (pair_index, pair) in pairs.into_iter().enumerate() {
            if let Ok(result) = apply_switch_at(cat, d, i, &pair) {
                out.push(SwitchingStep {
                    position: i,
                    pair_index,
                    pair,
                    result,
                });
            }
        }
    }
    out
}

fn same_rule_multiset<C: Category>(d: &Derivation<C>, e: &Derivation<C>) -> bool {
    let mut a = d.rule_names();
    let mut b = e.rule_names();
    a.sort();
    b.sort();
    a == b
}

/// Breadth-first search for a switching sequence from `d` to a derivation
/// abstraction equivalent to `e`, of at most `bound` switches. Visited states
/// are deduplicated up to abstraction equivalence, bucketed by rule sequence.
pub fn switch_equivalent<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    e: &Derivation<C>,
    bound: usize,
) -> Option<SwitchingSequence<C>> {
    if d.len() != e.len() || !same_rule_multiset(d, e) {
        return None;
    }
    let key = |x: &Derivation<C>| -> Vec<String> {
        x.rule_names().into_iter().map(str::to_string).collect()
    };
    let mut visited: HashMap<Vec<String>, Vec<Derivation<C>>> = HashMap::new();
    visited.entry(key(d)).or_default().push(d.clone());
    let mut queue = VecDeque::new();
    queue.push_back(SwitchingSequence::empty(d.clone()));
    while let Some(seq) = queue.pop_front() {
        let here = seq.end();
        if here.rule_names() == e.rule_names() && abstraction_equivalent(cat, here, e).is_some() {
            return Some(seq);
        }
        if seq.len() >= bound {
            continue;
        }
        for step in switch_moves(cat, here) {
            let bucket = visited.entry(key(&step.result)).or_default();
            if bucket
                .iter()
                .any(|seen| abstraction_equivalent(cat, seen, &step.result).is_some())
            {
                continue;
            }
            bucket.push(step.result.clone());
            let mut next = seq.clone();
            next.steps.push(step);
            queue.push_back(next);
        }
    }
    None
}

/// The greedy switching sequence from `d` towards `e` along `sigma`: each
/// move switches the adjacent inversion of the remaining permutation with
/// the largest index.
pub fn canonical_sequence_along<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    e: &Derivation<C>,
    sigma: &Permutation,
) -> Result<SwitchingSequence<C>> {
    if sigma.len() != d.len() {
        return Err(Error::InvalidDerivation("permutation length differs from derivation".into()));
    }
    let mut seq = SwitchingSequence::empty(d.clone());
    let mut remaining = sigma.clone();
    while let Some(&k) = remaining.adjacent_inversions().last() {
        let here = seq.end().clone();
        let pairs = independence_pairs(cat, here.step(k), here.step(k + 1));
        let unavailable = |reason: String| Error::GreedySwitchUnavailable { position: k, reason };
        if pairs.is_empty() {
            return Err(unavailable("steps are not sequentially independent".into()));
        }
        let after = remaining.after(&Permutation::transposition(d.len(), k));
        let budget = after.inversions().len();
        let mut chosen = None;
        let mut last_err = None;
        for (pair_index, pair) in pairs.iter().enumerate() {
            match apply_switch_at(cat, &here, k, pair) {
                Ok(result) => {
                    // with several pairs, keep one from which the target is
                    // still reachable
                    if pairs.len() == 1 || switch_equivalent(cat, &result, e, budget).is_some() {
                        chosen = Some((pair_index, pair.clone(), result));
                        break;
                    }
                }
                Err(err) => last_err = Some(err),
            }
        }
        let Some((pair_index, pair, result)) = chosen else {
            let reason = match last_err {
                Some(err) if pairs.len() == 1 => err.to_string(),
                _ => format!("none of the {} pairs keeps the target reachable", pairs.len()),
            };
            return Err(unavailable(reason));
        };
        seq.steps.push(SwitchingStep {
            position: k,
            pair_index,
            pair,
            result,
        });
        remaining = after;
    }
    if abstraction_equivalent(cat, seq.end(), e).is_none() {
        return Err(Error::NotEquivalent(
            "greedy sequence does not end abstraction equivalent to the target".into(),
        ));
    }
    Ok(seq)
}

/// Find a witness permutation by search, then build the greedy sequence.
pub fn canonical_sequence<C: Category>(
    cat: &C,
    d: &Derivation<C>,
    e: &Derivation<C>,
    bound: usize,
) -> Result<SwitchingSequence<C>> {
    let witness = switch_equivalent(cat, d, e, bound).ok_or_else(|| {
        Error::NotEquivalent(format!("no switching sequence of length ≤ {bound}"))
    })?;
    canonical_sequence_along(cat, d, e, &witness.permutation())
}

/// Default search bound: enough for any inversion-only sequence.
pub fn default_bound(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}
