//! Fixed-universe bitsets over item ids.

/// A set of item ids drawn from `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowSet {
    words: Vec<u64>,
    universe: usize,
}

impl RowSet {
    pub fn empty(universe: usize) -> Self {
        RowSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for w in &mut s.words {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_flags(flags: &[bool]) -> Self {
        let mut s = Self::empty(flags.len());
        for (i, &f) in flags.iter().enumerate() {
            if f {
                s.insert(i);
            }
        }
        s
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for i in ids {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.universe % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &RowSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersection(&self, other: &RowSet) -> RowSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union_with(&mut self, other: &RowSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection_len(&self, other: &RowSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &RowSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Ascending ids.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    proptest! {
        #[test]
        fn behaves_like_btreeset(
            a in prop::collection::btree_set(0usize..200, 0..80),
            b in prop::collection::btree_set(0usize..200, 0..80),
        ) {
            let ra = RowSet::from_ids(200, a.iter().copied());
            let rb = RowSet::from_ids(200, b.iter().copied());
            let inter: BTreeSet<usize> = a.intersection(&b).copied().collect();
            prop_assert_eq!(ra.intersection(&rb).iter().collect::<BTreeSet<_>>(), inter.clone());
            prop_assert_eq!(ra.intersection_len(&rb), inter.len());
            prop_assert_eq!(ra.len(), a.len());
            prop_assert_eq!(ra.is_subset(&rb), a.is_subset(&b));
            let mut u = ra.clone();
            u.union_with(&rb);
            prop_assert_eq!(u.iter().collect::<BTreeSet<_>>(), a.union(&b).copied().collect::<BTreeSet<_>>());
        }
    }

    #[test]
    fn full_respects_universe() {
        assert_eq!(RowSet::full(70).len(), 70);
        assert_eq!(RowSet::full(64).len(), 64);
        assert_eq!(RowSet::full(0).len(), 0);
    }
}
