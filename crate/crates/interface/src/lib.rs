//! Batch audits and the HTTP session service over `discrim-core`.

pub mod cli;
pub mod engine;
pub mod server;
