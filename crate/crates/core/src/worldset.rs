//! Fixed-universe bitsets over world indices.

use smallvec::{smallvec, SmallVec};

const BITS: usize = 64;

/// A set of world indices `0..n`. All sets taking part in one operation must
/// have been created for the same `n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct WorldSet {
    words: SmallVec<[u64; 2]>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(BITS)
}

impl WorldSet {
    pub fn empty(n: usize) -> Self {
        WorldSet {
            words: smallvec![0; word_count(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * BITS;
            let count = (n - lo).min(BITS);
            *w = if count == BITS {
                u64::MAX
            } else {
                (1u64 << count) - 1
            };
        }
        s
    }

    /// Builds a set from the low `n` bits of `mask` (`n <= 64`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= BITS);
        let mut s = Self::empty(n);
        if let Some(w) = s.words.first_mut() {
            *w = mask;
        }
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / BITS)
            .is_some_and(|w| w & (1u64 << (i % BITS)) != 0)
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / BITS] |= 1u64 << (i % BITS);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / BITS] &= !(1u64 << (i % BITS));
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &WorldSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &WorldSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.subtract(other);
        out
    }

    /// Complement relative to `0..n`.
    pub fn complement(&self, n: usize) -> WorldSet {
        let mut out = WorldSet::full(n);
        out.subtract(self);
        out
    }

    /// Smallest member.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * BITS + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * BITS + bit)
                }
            })
        })
    }
}
