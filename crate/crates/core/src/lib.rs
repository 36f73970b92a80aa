//! Modular datatypes with Mendler-style folds.
//!
//! [`kernel`] has signatures, terms and folds; [`indexed`] and [`mutual`]
//! lift the same machinery to derivation trees and to pairs of mutually
//! recursive sorts. [`arith`] and [`lang`] are the two worked languages.

pub mod arith;
pub mod indexed;
pub mod kernel;
pub mod lang;
pub mod mutual;
pub mod sexp;
