//! Enumerators, generators, reference oracles and law suites for the
//! `mendler` crate.

pub mod enumerate;
pub mod fuzz;
pub mod generate;
mod mutation;
pub mod oracle;

pub use mutation::{Mutation, UnknownMutation};
pub mod laws;
