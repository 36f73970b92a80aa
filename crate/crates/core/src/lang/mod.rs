//! The case-study language: mutually recursive declarations and
//! expressions with first-class environments, its small-step semantics and
//! typing as mutual derivations, and subject reduction as a mutual fold.

pub mod concrete;
mod encode;
mod matching;
mod preservation;
mod step;
mod syntax;
mod typing;

use crate::indexed::InvalidDerivation;
use crate::sexp::ParseError;

pub use encode::*;
pub use matching::patmatch;
pub use preservation::*;
pub use step::*;
pub use syntax::*;
pub use typing::*;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LangError {
    #[error("{0} is not a value")]
    NotAValue(Exp),
    #[error("duplicate binding for `{0}` in a pattern")]
    DuplicateBinding(Ident),
    #[error("unbound variable `{0}`")]
    Unbound(Ident),
    #[error("ill-typed: {0}")]
    IllTyped(String),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] InvalidDerivation),
}
