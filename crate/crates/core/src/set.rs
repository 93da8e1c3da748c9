//! Finite sets of atom (or point) indices.

use std::fmt;

use smallvec::SmallVec;

const BITS: usize = 64;

/// A subset of `{0, …, n-1}` stored as a bit set.
///
/// Trailing zero words are trimmed so that equality and hashing only depend on
/// the members.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet {
    words: SmallVec<[u64; 2]>,
}

impl AtomSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        (0..n).collect()
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::empty();
        s.insert(i);
        s
    }

    /// Members are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self { words: SmallVec::from_elem(mask, 1) };
        s.trim();
        s
    }

    /// Lowest word as a mask; only meaningful for sets below index 64.
    pub fn low_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) {
        let (w, b) = (i / BITS, i % BITS);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn remove(&mut self, i: usize) {
        let (w, b) = (i / BITS, i % BITS);
        if let Some(word) = self.words.get_mut(w) {
            *word &= !(1 << b);
        }
        self.trim();
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / BITS).is_some_and(|w| w & (1 << (i % BITS)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Largest member plus one.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            Some(w) => (self.words.len() - 1) * BITS + (BITS - w.leading_zeros() as usize),
            None => 0,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0))
            .collect();
        Self { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let n = self.words.len().min(other.words.len());
        let mut s = Self { words: (0..n).map(|i| self.words[i] & other.words[i]).collect() };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = Self {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    /// Complement inside `{0, …, n-1}`.
    pub fn complement(&self, n: usize) -> Self {
        Self::full(n).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * BITS + b)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// All subsets of `self`, in binary-counting order over the members.
    ///
    /// Panics if `self` has more than 63 members.
    pub fn subsets(&self) -> impl Iterator<Item = AtomSet> + '_ {
        let members: Vec<usize> = self.iter().collect();
        assert!(members.len() < 64, "too many members to enumerate subsets");
        (0u64..(1u64 << members.len())).map(move |mask| {
            members
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &i)| i)
                .collect()
        })
    }
}

impl FromIterator<usize> for AtomSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Self::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let a: AtomSet = [0, 3, 70].into_iter().collect();
        let b: AtomSet = [3, 4].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert!(a.contains(70));
        assert_eq!(a.union(&b).len(), 4);
        assert_eq!(a.intersection(&b), AtomSet::singleton(3));
        assert_eq!(a.difference(&b), [0, 70].into_iter().collect());
        assert_eq!(a.bound(), 71);
        assert_eq!(AtomSet::full(3).complement(3), AtomSet::empty());
        assert_eq!(b.subsets().count(), 4);
    }

    #[test]
    fn trimming_keeps_equality_canonical() {
        let mut a = AtomSet::singleton(100);
        a.remove(100);
        assert_eq!(a, AtomSet::empty());
        assert!(a.is_empty());
    }

    proptest! {
        #[test]
        fn boolean_identities(x in any::<u64>(), y in any::<u64>(), z in any::<u64>()) {
            let (a, b, c) = (AtomSet::from_mask(x), AtomSet::from_mask(y), AtomSet::from_mask(z));
            prop_assert_eq!(a.union(&b).low_mask(), x | y);
            prop_assert_eq!(a.intersection(&b).low_mask(), x & y);
            prop_assert_eq!(a.difference(&b).low_mask(), x & !y);
            prop_assert_eq!(a.union(&b).complement(64), a.complement(64).intersection(&b.complement(64)));
            prop_assert_eq!(a.intersection(&b.union(&c)), a.intersection(&b).union(&a.intersection(&c)));
            prop_assert_eq!(a.is_subset(&b), x & !y == 0);
            prop_assert_eq!(a.iter().collect::<AtomSet>(), a);
        }
    }
}
