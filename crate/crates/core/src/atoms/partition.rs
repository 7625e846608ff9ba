use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::discrim::ItemsetCollection;

/// Membership pattern over the itemsets of one collection; bit `i` is set
/// when the atom's items belong to itemset `i`. Serialized as a `0`/`1` string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(pub Vec<bool>);

impl Signature {
    pub fn popcount(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0.get(i).copied().unwrap_or(false)
    }

    pub fn shared_bits(&self, other: &Signature) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| **a && **b).count()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad signature bit `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Signature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomItem {
    pub id: usize,
    pub protected: bool,
    /// Predicted beneficial by the model the collection was mined on.
    pub beneficial: bool,
}

/// A maximal inseparable subset: the items sharing one exact membership
/// pattern over the collection's itemsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub signature: Signature,
    /// Ascending by id.
    pub items: Vec<AtomItem>,
    pub protected_count: usize,
    pub nonprotected_count: usize,
    pub beneficial_protected: usize,
    pub beneficial_nonprotected: usize,
    /// Risk difference over the atom's own items; 0 when a group is absent.
    pub rd_local: f64,
}

impl Atom {
    pub fn count(&self) -> usize {
        self.items.len()
    }

    pub fn item_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().map(|i| i.id)
    }
}

/// Partition the union of a collection's member sets by membership pattern.
///
/// Atoms come out ordered by their smallest item id.
pub fn compute_atoms(collection: &ItemsetCollection, predictions: &[bool]) -> Vec<Atom> {
    let k = collection.itemsets.len();
    let mut membership: BTreeMap<usize, (bool, Vec<bool>)> = BTreeMap::new();
    for (i, set) in collection.itemsets.iter().enumerate() {
        for (ids, protected) in [(&set.members_protected, true), (&set.members_nonprotected, false)] {
            for &id in ids {
                membership
                    .entry(id)
                    .or_insert_with(|| (protected, vec![false; k]))
                    .1[i] = true;
            }
        }
    }

    let mut atoms: Vec<Atom> = Vec::new();
    let mut by_signature: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    for (id, (protected, bits)) in membership {
        let slot = *by_signature.entry(bits.clone()).or_insert_with(|| {
            atoms.push(Atom {
                signature: Signature(bits),
                items: Vec::new(),
                protected_count: 0,
                nonprotected_count: 0,
                beneficial_protected: 0,
                beneficial_nonprotected: 0,
                rd_local: 0.0,
            });
            atoms.len() - 1
        });
        let beneficial = predictions[id];
        let atom = &mut atoms[slot];
        atom.items.push(AtomItem { id, protected, beneficial });
        if protected {
            atom.protected_count += 1;
            atom.beneficial_protected += beneficial as usize;
        } else {
            atom.nonprotected_count += 1;
            atom.beneficial_nonprotected += beneficial as usize;
        }
    }
    for atom in &mut atoms {
        atom.rd_local = if atom.protected_count == 0 || atom.nonprotected_count == 0 {
            0.0
        } else {
            atom.beneficial_protected as f64 / atom.protected_count as f64
                - atom.beneficial_nonprotected as f64 / atom.nonprotected_count as f64
        };
    }
    atoms
}
