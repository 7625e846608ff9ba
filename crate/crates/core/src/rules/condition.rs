use serde::{Deserialize, Serialize};

use crate::data::DiscretizedDataset;
use crate::rowset::RowSet;

/// `attribute == category` on a discretized dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub attr: usize,
    pub code: u32,
}

/// A conjunction of literals with at most one literal per attribute.
///
/// Literals are kept sorted by attribute index, so equal conditions compare
/// and hash equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    literals: Vec<Literal>,
}

impl Condition {
    pub fn empty() -> Self {
        Condition::default()
    }

    /// Panics if two literals constrain the same attribute.
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        assert!(
            literals.windows(2).all(|w| w[0].attr != w[1].attr),
            "at most one literal per attribute"
        );
        Condition { literals }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn code_of(&self, attr: usize) -> Option<u32> {
        self.literals
            .binary_search_by_key(&attr, |l| l.attr)
            .ok()
            .map(|i| self.literals[i].code)
    }

    pub fn has_attr(&self, attr: usize) -> bool {
        self.code_of(attr).is_some()
    }

    pub fn is_subset_of(&self, other: &Condition) -> bool {
        self.literals.iter().all(|l| other.code_of(l.attr) == Some(l.code))
    }

    pub fn is_proper_subset_of(&self, other: &Condition) -> bool {
        self.len() < other.len() && self.is_subset_of(other)
    }

    pub fn without(&self, attr: usize) -> Condition {
        Condition {
            literals: self.literals.iter().copied().filter(|l| l.attr != attr).collect(),
        }
    }

    /// Keep only literals whose attribute passes `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(usize) -> bool) -> Condition {
        Condition {
            literals: self.literals.iter().copied().filter(|l| keep(l.attr)).collect(),
        }
    }

    pub fn matches(&self, dataset: &DiscretizedDataset, item: usize) -> bool {
        self.literals.iter().all(|l| dataset.code(item, l.attr) == l.code)
    }

    /// Deterministic rendering sorted by attribute name: `[a:x, b:y]`.
    pub fn canonical_key(&self, dataset: &DiscretizedDataset) -> String {
        let mut parts: Vec<(&str, &str)> = self
            .literals
            .iter()
            .map(|l| {
                (
                    dataset.attributes[l.attr].name.as_str(),
                    dataset.category_label(l.attr, l.code),
                )
            })
            .collect();
        parts.sort();
        let body: Vec<String> = parts.iter().map(|(a, v)| format!("{a}:{v}")).collect();
        format!("[{}]", body.join(", "))
    }

    pub fn attribute_names(&self, dataset: &DiscretizedDataset) -> Vec<String> {
        let mut names: Vec<String> = self
            .literals
            .iter()
            .map(|l| dataset.attributes[l.attr].name.clone())
            .collect();
        names.sort();
        names
    }
}

/// Per-category row sets, for fast condition support.
#[derive(Debug, Clone)]
pub struct ItemIndex {
    universe: usize,
    by_attr: Vec<Vec<RowSet>>,
}

impl ItemIndex {
    pub fn new(dataset: &DiscretizedDataset) -> Self {
        let n = dataset.len();
        let by_attr = dataset
            .attributes
            .iter()
            .zip(&dataset.codes)
            .map(|(spec, codes)| {
                let mut sets = vec![RowSet::empty(n); spec.categories.len()];
                for (i, &c) in codes.iter().enumerate() {
                    sets[c as usize].insert(i);
                }
                sets
            })
            .collect();
        ItemIndex { universe: n, by_attr }
    }

    pub fn literal_rows(&self, literal: Literal) -> &RowSet {
        &self.by_attr[literal.attr][literal.code as usize]
    }

    pub fn rows(&self, condition: &Condition) -> RowSet {
        let mut lits = condition.literals().iter();
        let Some(first) = lits.next() else {
            return RowSet::full(self.universe);
        };
        let mut rows = self.literal_rows(*first).clone();
        for l in lits {
            rows.intersect_with(self.literal_rows(*l));
        }
        rows
    }
}
