//! The contract every concrete category instance implements.
//!
//! Rewriting, independence and equivalence are written once against
//! [`Category`]; the presheaf and poset modules supply the instances.
//! All values are immutable and every operation is a pure function of its
//! arguments, so instances are `Send + Sync` and freely shareable.

use std::fmt;

use crate::error::{Error, Result};

/// A finite category with a distinguished class `M` of monomorphisms.
pub trait Category: Clone + fmt::Debug + Send + Sync + 'static {
    type Object: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;
    type Morphism: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    fn source<'a>(&self, f: &'a Self::Morphism) -> &'a Self::Object;
    fn target<'a>(&self, f: &'a Self::Morphism) -> &'a Self::Object;
    fn identity(&self, a: &Self::Object) -> Self::Morphism;

    /// `g ∘ f`: first `f`, then `g`.
    fn compose(&self, f: &Self::Morphism, g: &Self::Morphism) -> Result<Self::Morphism>;

    /// Every morphism `a → b`, complete, duplicate-free, deterministically ordered.
    fn hom(&self, a: &Self::Object, b: &Self::Object) -> Vec<Self::Morphism>;

    /// All `x: A → B` with `along ∘ x = target`, where `along: B → C` and
    /// `target: A → C`.
    fn lifts(&self, along: &Self::Morphism, target: &Self::Morphism) -> Vec<Self::Morphism> {
        self.hom(self.source(target), self.source(along))
            .into_iter()
            .filter(|x| {
                self.compose(x, along)
                    .map(|c| &c == target)
                    .unwrap_or(false)
            })
            .collect()
    }

    /// The unique lift through a mono, computed directly rather than searched.
    fn lift_along_mono(
        &self,
        mono: &Self::Morphism,
        target: &Self::Morphism,
    ) -> Option<Self::Morphism> {
        self.lifts(mono, target).into_iter().next()
    }

    /// Isomorphisms `φ: a → b` with `φ ∘ p = q` for every pin `(p, q)`.
    fn isos_under(
        &self,
        a: &Self::Object,
        b: &Self::Object,
        pins: &[(Self::Morphism, Self::Morphism)],
    ) -> Vec<Self::Morphism>;

    fn is_mono(&self, f: &Self::Morphism) -> bool;
    fn is_epi(&self, f: &Self::Morphism) -> bool;
    fn is_iso(&self, f: &Self::Morphism) -> bool;
    fn is_in_m(&self, f: &Self::Morphism) -> bool;
    fn inverse(&self, f: &Self::Morphism) -> Option<Self::Morphism>;

    /// Pullback of a cospan `f: A → C ← B: g`, as a span `A ← P → B`.
    fn pullback(&self, f: &Self::Morphism, g: &Self::Morphism) -> Result<Span<Self::Morphism>>;

    /// Pushout of a span `B ← A → C` (`f: A → B`, `g: A → C`), as a cospan
    /// `B → D ← C`. Partial: some instances lack pushouts.
    fn pushout(&self, f: &Self::Morphism, g: &Self::Morphism)
        -> Result<Cospan<Self::Morphism>>;

    /// Pushout complement of `l: K → L` (in `M`) and `m: L → G`: returns
    /// `(k: K → D, f: D → G)` with `f ∈ M` making a pushout square.
    fn pushout_complement(
        &self,
        l: &Self::Morphism,
        m: &Self::Morphism,
    ) -> Result<(Self::Morphism, Self::Morphism)>;

    fn verify_pushout(&self, sq: &Square<Self::Morphism>) -> bool;
    fn verify_pullback(&self, sq: &Square<Self::Morphism>) -> bool;

    /// Mediating arrow out of the corner of a pushout square `sq` into the
    /// cocone `(via_right: B → X, via_bottom: C → X)`.
    fn pushout_mediator(
        &self,
        sq: &Square<Self::Morphism>,
        via_right: &Self::Morphism,
        via_bottom: &Self::Morphism,
    ) -> Result<Self::Morphism>;

    /// Mediating arrow into the apex of a pullback square `sq` from the cone
    /// `(to_b: Y → B, to_c: Y → C)`.
    fn pullback_mediator(
        &self,
        sq: &Square<Self::Morphism>,
        to_b: &Self::Morphism,
        to_c: &Self::Morphism,
    ) -> Result<Self::Morphism>;

    /// Colimit of a finite diagram. Only some instances support it.
    fn colimit(&self, diagram: &Diagram<Self::Object, Self::Morphism>) -> Result<Cocone<Self>> {
        let _ = diagram;
        Err(Error::Unsupported(
            "colimits of arbitrary diagrams are not available for this instance".into(),
        ))
    }

    /// Short human-readable rendering, used in reports.
    fn describe_object(&self, a: &Self::Object) -> String {
        format!("{a:?}")
    }

    /// Composition with endpoint checking over a whole chain, left to right.
    fn compose_all(&self, chain: &[&Self::Morphism]) -> Result<Self::Morphism> {
        let (first, rest) = chain
            .split_first()
            .ok_or_else(|| Error::EndpointMismatch("empty composition chain".into()))?;
        rest.iter()
            .try_fold((*first).clone(), |acc, g| self.compose(&acc, g))
    }

    /// Do both squares' diagonals agree?
    fn commutes(&self, sq: &Square<Self::Morphism>) -> bool {
        match (
            self.compose(&sq.top, &sq.right),
            self.compose(&sq.left, &sq.bottom),
        ) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    fn is_isomorphic(&self, a: &Self::Object, b: &Self::Object) -> bool {
        !self.isos_under(a, b, &[]).is_empty()
    }
}

/// `A ← apex → B`, stored as the two legs out of the apex.
#[derive(Debug, Clone, PartialEq)]
pub struct Span<M> {
    pub left: M,
    pub right: M,
}

/// `B → apex ← C`, stored as the two legs into the apex.
#[derive(Debug, Clone, PartialEq)]
pub struct Cospan<M> {
    pub left: M,
    pub right: M,
}

/// A square
///
/// ```text
///   A --top--> B
///   |          |
///  left      right
///   v          v
///   C -bottom-> D
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Square<M> {
    pub top: M,
    pub left: M,
    pub right: M,
    pub bottom: M,
}

impl<M> Square<M> {
    pub fn new(top: M, left: M, right: M, bottom: M) -> Self {
        Square {
            top,
            left,
            right,
            bottom,
        }
    }
}

/// A finite diagram: objects indexed by position, arrows between positions.
#[derive(Debug, Clone)]
pub struct Diagram<O, M> {
    pub objects: Vec<O>,
    pub arrows: Vec<(usize, usize, M)>,
}

/// Colimit object with one injection per diagram object.
pub struct Cocone<C: Category> {
    pub apex: C::Object,
    pub injections: Vec<C::Morphism>,
}

impl<C: Category> fmt::Debug for Cocone<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cocone")
            .field("apex", &self.apex)
            .field("injections", &self.injections.len())
            .finish()
    }
}

impl<C: Category> Clone for Cocone<C> {
    fn clone(&self) -> Self {
        Cocone {
            apex: self.apex.clone(),
            injections: self.injections.clone(),
        }
    }
}

/// Check that a square is well-formed: the four endpoint equalities hold.
pub fn square_endpoints_match<C: Category>(cat: &C, sq: &Square<C::Morphism>) -> bool {
    cat.source(&sq.top) == cat.source(&sq.left)
        && cat.target(&sq.top) == cat.source(&sq.right)
        && cat.target(&sq.left) == cat.source(&sq.bottom)
        && cat.target(&sq.right) == cat.target(&sq.bottom)
}
