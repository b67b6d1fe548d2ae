use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `0..n`, stored as the image list: position `i` goes to
/// `self[i]`.
///
/// Switching sequences compose as `ν_{1,m} = ν_m ∘ … ∘ ν_1`: the step
/// originally at position `i` ends up at `ν_{1,m}(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Format(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// `⟨k, k+1⟩` on `0..n`.
    pub fn transposition(n: usize, k: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(k, k + 1);
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn after(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut v = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            v[j] = i;
        }
        Permutation(v)
    }

    /// `{(i, j) | i < j, σ(j) < σ(i)}`.
    pub fn inversions(&self) -> BTreeSet<(usize, usize)> {
        let n = self.0.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.0[j] < self.0[i])
            .collect()
    }

    /// Positions `k` with `(k, k+1)` an inversion.
    pub fn adjacent_inversions(&self) -> Vec<usize> {
        (0..self.0.len().saturating_sub(1))
            .filter(|&k| self.0[k + 1] < self.0[k])
            .collect()
    }

    /// Composition of transpositions `⟨k_1⟩, ⟨k_2⟩, …` applied in order.
    pub fn of_switches(n: usize, positions: &[usize]) -> Permutation {
        positions
            .iter()
            .fold(Permutation::identity(n), |acc, &k| {
                Permutation::transposition(n, k).after(&acc)
            })
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Does every switch `ν_k = ⟨p_k, p_k+1⟩` form an inversion for the
/// remaining composite `ν_{k,m}`?
pub fn consists_of_inversions(n: usize, positions: &[usize]) -> bool {
    (0..positions.len()).all(|k| {
        let rest = Permutation::of_switches(n, &positions[k..]);
        rest.inversions().contains(&(positions[k], positions[k] + 1))
    })
}
