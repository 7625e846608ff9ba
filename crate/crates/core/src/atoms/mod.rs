//! Atom partition of a collection and its ripple-set geometry.

mod aggregate;
mod layout;
mod outline;
mod partition;

pub use aggregate::{aggregate_items, AggregatedGlyph, QuadrantMark};
pub use layout::{layout_rippleset, AtomCircle, Dot, DotFill, DotShape, LayoutOptions, RippleGeometry};
pub use outline::{outline_set, point_in_polygon, Outline, DEFAULT_OUTLINE_MARGIN};
pub use partition::{compute_atoms, Atom, AtomItem, Signature};
