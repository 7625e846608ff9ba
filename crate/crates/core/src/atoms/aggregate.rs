use serde::{Deserialize, Serialize};

use super::partition::{Atom, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantMark {
    pub protected: bool,
    pub beneficial: bool,
    pub count: usize,
}

/// Count glyph replacing the dots of a crowded atom. Marks are ordered
/// protected/beneficial, protected/non-beneficial, non-protected/beneficial,
/// non-protected/non-beneficial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedGlyph {
    pub signature: Signature,
    pub marks: [QuadrantMark; 4],
}

impl AggregatedGlyph {
    pub fn total(&self) -> usize {
        self.marks.iter().map(|m| m.count).sum()
    }
}

/// `None` (draw every dot) when the atom fits the budget.
pub fn aggregate_items(atom: &Atom, dot_budget: usize) -> Option<AggregatedGlyph> {
    assert!(dot_budget >= 1, "dot budget must be positive");
    if atom.count() <= dot_budget {
        return None;
    }
    let mark = |protected, beneficial, count| QuadrantMark {
        protected,
        beneficial,
        count,
    };
    Some(AggregatedGlyph {
        signature: atom.signature.clone(),
        marks: [
            mark(true, true, atom.beneficial_protected),
            mark(true, false, atom.protected_count - atom.beneficial_protected),
            mark(false, true, atom.beneficial_nonprotected),
            mark(false, false, atom.nonprotected_count - atom.beneficial_nonprotected),
        ],
    })
}
