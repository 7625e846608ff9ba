//! Discovery of discriminatory itemsets in classifier outputs.
//!
//! A dataset is validated against a role schema and discretized; frequent
//! conditions are mined once and then filtered per model by risk difference,
//! conditioned on resolving attributes. Results are grouped into collections,
//! laid out as ripple sets, compared across models and repaired by
//! reject-option flips.

pub mod atoms;
pub mod causal;
pub mod data;
pub mod discrim;
pub mod error;
pub mod export;
pub mod mitigation;
pub mod pipeline;
pub mod rowset;
pub mod rules;

pub use error::{DataError, Error, Group, MiningError, MitigationError, Result};
