//! Sequential independence, strong independence pairs and the switch of two
//! consecutive direct derivations.

use crate::category::{Category, Square};
use crate::error::{Error, Result};
use crate::rewriting::{Derivation, DirectDerivation};

/// Arrows `i0: R0 → D1` and `i1: L1 → D0` with `f1 ∘ i0 = h0` and
/// `g0 ∘ i1 = m1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependencePair<M> {
    pub i0: M,
    pub i1: M,
}

/// Everything computed by the strong test.
#[derive(Debug, Clone)]
pub struct StrongWitness<M> {
    /// `p0: P → D0`, `p1: P → D1`, the pullback of `g0` and `f1`.
    pub p0: M,
    pub p1: M,
    /// `u0: K0 → P` with `p0 ∘ u0 = k0`, `p1 ∘ u0 = i0 ∘ r0`.
    pub u0: M,
    /// `u1: K1 → P` with `p0 ∘ u1 = i1 ∘ l1`, `p1 ∘ u1 = k1`.
    pub u1: M,
    /// The square `(r0, u0, i0, p1)` is a pushout.
    pub first_square_pushout: bool,
    /// The square `(l1, u1, i1, p0)` is a pushout.
    pub second_square_pushout: bool,
    /// The pushout of `r1` along `u1` exists.
    pub third_pushout_exists: bool,
}

impl<M> StrongWitness<M> {
    pub fn is_strong(&self) -> bool {
        self.first_square_pushout && self.second_square_pushout && self.third_pushout_exists
    }
}

/// The switched pair of steps together with the intermediate data.
#[derive(Debug, Clone)]
pub struct SwitchResult<C: Category> {
    /// Two steps: the second rule first, then the first rule.
    pub derivation: Derivation<C>,
    /// Independence pair of the switched steps.
    pub pair: IndependencePair<C::Morphism>,
    pub witness: StrongWitness<C::Morphism>,
    pub q0: C::Morphism,
    pub q1: C::Morphism,
    pub j0: C::Morphism,
    pub j1: C::Morphism,
    pub a0: C::Morphism,
    pub a1: C::Morphism,
    pub b0: C::Morphism,
    pub b1: C::Morphism,
}

/// All independence pairs of two consecutive steps. `i0` is forced because
/// `f1` is mono; `i1` ranges over the lifts of `m1` through `g0`.
pub fn independence_pairs<C: Category>(
    cat: &C,
    s0: &DirectDerivation<C>,
    s1: &DirectDerivation<C>,
) -> Vec<IndependencePair<C::Morphism>> {
    if s0.target(cat) != s1.source(cat) {
        return Vec::new();
    }
    let Some(i0) = cat.lift_along_mono(&s1.f, &s0.h) else {
        return Vec::new();
    };
    cat.lifts(&s0.g, &s1.m)
        .into_iter()
        .map(|i1| IndependencePair { i0: i0.clone(), i1 })
        .collect()
}

/// Check the two defining equations of a pair.
pub fn pair_is_valid<C: Category>(
    cat: &C,
    s0: &DirectDerivation<C>,
    s1: &DirectDerivation<C>,
    pair: &IndependencePair<C::Morphism>,
) -> bool {
    cat.compose(&pair.i0, &s1.f).is_ok_and(|x| x == s0.h)
        && cat.compose(&pair.i1, &s0.g).is_ok_and(|x| x == s1.m)
}

/// Build the pullback `P` of `g0` and `f1`, the mediators `u0`, `u1`, and run
/// the three strong-pair checks.
pub fn strong_witness<C: Category>(
    cat: &C,
    s0: &DirectDerivation<C>,
    s1: &DirectDerivation<C>,
    pair: &IndependencePair<C::Morphism>,
) -> Result<StrongWitness<C::Morphism>> {
    if !pair_is_valid(cat, s0, s1, pair) {
        return Err(Error::PairInvalid("pair equations do not hold".into()));
    }
    let span = cat.pullback(&s0.g, &s1.f)?;
    let (p0, p1) = (span.left, span.right);
    let pb = Square::new(p0.clone(), p1.clone(), s0.g.clone(), s1.f.clone());
    let (r0, l1) = (s0.rule.r(), s1.rule.l());
    let u0 = cat.pullback_mediator(&pb, &s0.k, &cat.compose(r0, &pair.i0)?)?;
    let u1 = cat.pullback_mediator(&pb, &cat.compose(l1, &pair.i1)?, &s1.k)?;
    let first = Square::new(r0.clone(), u0.clone(), pair.i0.clone(), p1.clone());
    let second = Square::new(l1.clone(), u1.clone(), pair.i1.clone(), p0.clone());
    Ok(StrongWitness {
        first_square_pushout: cat.verify_pushout(&first),
        second_square_pushout: cat.verify_pushout(&second),
        third_pushout_exists: cat.pushout(&u1, s1.rule.r()).is_ok(),
        p0,
        p1,
        u0,
        u1,
    })
}

pub fn is_strong<C: Category>(
    cat: &C,
    s0: &DirectDerivation<C>,
    s1: &DirectDerivation<C>,
    pair: &IndependencePair<C::Morphism>,
) -> bool {
    strong_witness(cat, s0, s1, pair).is_ok_and(|w| w.is_strong())
}

/// The switch along a strong pair: `Q0 = l0 +_{K0} P`, `Q1 = r1 +_{K1} P`,
/// `H1 = Q0 +_P Q1`, then the rule of `s1` applied at `f0 ∘ i1` with
/// context `Q0`, followed by the rule of `s0` with context `Q1`.
pub fn switch<C: Category>(
    cat: &C,
    s0: &DirectDerivation<C>,
    s1: &DirectDerivation<C>,
    pair: &IndependencePair<C::Morphism>,
) -> Result<SwitchResult<C>> {
    let w = strong_witness(cat, s0, s1, pair)?;
    if !w.is_strong() {
        if w.first_square_pushout && w.second_square_pushout {
            return Err(Error::NoPushout(
                "the second rule's right leg has no pushout along the pullback mediator".into(),
            ));
        }
        return Err(Error::NotStrong(
            "a pullback-mediated square is not a pushout".into(),
        ));
    }
    let (l0, r1) = (s0.rule.l(), s1.rule.r());

    let po0 = cat.pushout(&w.u0, l0)?;
    let (q0, j1) = (po0.left, po0.right);
    let sq0 = Square::new(w.u0.clone(), l0.clone(), q0.clone(), j1.clone());
    let a0 = cat.pushout_mediator(&sq0, &cat.compose(&w.p0, &s0.f)?, &s0.m)?;

    let po1 = cat.pushout(&w.u1, r1)?;
    let (q1, j0) = (po1.left, po1.right);
    let sq1 = Square::new(w.u1.clone(), r1.clone(), q1.clone(), j0.clone());
    let b1 = cat.pushout_mediator(&sq1, &cat.compose(&w.p1, &s1.g)?, &s1.h)?;

    let po2 = cat.pushout(&q0, &q1)?;
    let (b0, a1) = (po2.left, po2.right);

    let e0 = DirectDerivation {
        rule: s1.rule.clone(),
        m: cat.compose(&pair.i1, &s0.f)?,
        k: cat.compose(&w.u1, &q0)?,
        h: cat.compose(&j0, &a1)?,
        f: a0.clone(),
        g: b0.clone(),
    };
    let e1 = DirectDerivation {
        rule: s0.rule.clone(),
        m: cat.compose(&j1, &b0)?,
        k: cat.compose(&w.u0, &q1)?,
        h: cat.compose(&pair.i0, &s1.g)?,
        f: a1.clone(),
        g: b1.clone(),
    };
    e0.verify(cat)?;
    e1.verify(cat)?;
    let derivation = Derivation::new(cat, s0.source(cat).clone(), vec![e0, e1])?;
    if derivation.end(cat) != s1.target(cat) {
        return Err(Error::Invariant("switch does not end where the original does".into()));
    }
    Ok(SwitchResult {
        derivation,
        pair: IndependencePair {
            i0: j0.clone(),
            i1: j1.clone(),
        },
        witness: w,
        q0,
        q1,
        j0,
        j1,
        a0,
        a1,
        b0,
        b1,
    })
}

/// Is `candidate` a switch of `(s0, s1)`: rules reversed, same endpoints,
/// and pairs on both sides satisfying the four switch equations.
pub fn verify_switch<C: Category>(
    cat: &C,
    s0: &DirectDerivation<C>,
    s1: &DirectDerivation<C>,
    candidate: &Derivation<C>,
) -> bool {
    if candidate.len() != 2 {
        return false;
    }
    let (e0, e1) = (candidate.step(0), candidate.step(1));
    if e0.rule.name() != s1.rule.name() || e1.rule.name() != s0.rule.name() {
        return false;
    }
    if candidate.start() != s0.source(cat) || candidate.end(cat) != s1.target(cat) {
        return false;
    }
    let ours = independence_pairs(cat, s0, s1);
    let theirs = independence_pairs(cat, e0, e1);
    let eq = |a: &C::Morphism, b: &C::Morphism, c: &C::Morphism| {
        cat.compose(b, c).is_ok_and(|x| &x == a)
    };
    ours.iter().any(|p| {
        eq(&e0.m, &p.i1, &s0.f)
            && eq(&e1.h, &p.i0, &s1.g)
            && theirs
                .iter()
                .any(|q| eq(&s0.m, &q.i1, &e0.f) && eq(&s1.h, &q.i0, &e1.g))
    })
}
