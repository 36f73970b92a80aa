//! Signature functors, their fixpoints, and conventional and Mendler folds.

mod algebra;
pub mod church;
mod coproduct;
mod signature;
mod term;

#[cfg(test)]
mod tests;

pub(crate) use algebra::fresh_nonce;
pub use algebra::{
    check_uniqueness, fold_c, lift, mendler, mfold, step_with, Algebra, Handle, Lifted, MendlerAlgebra, MendlerFn,
    Uniqueness,
};
pub use coproduct::{Coproduct, SumAlgebra, Summand};
pub(crate) use signature::{check_slots, SlotShape};
pub use signature::{fmap, Constructor, Name, Node, Payload, PayloadType, Signature, SlotKind};
pub use term::Term;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("malformed `{ctor}` node: {reason}")]
    Malformed { ctor: String, reason: String },
    #[error("constructor `{ctor}` is not part of signature `{signature}`")]
    UnknownConstructor { signature: String, ctor: String },
    #[error("duplicate constructor `{0}`")]
    DuplicateConstructor(String),
    #[error("unsupported carrier: {0}")]
    UnsupportedCarrier(String),
    #[error("invalid term JSON: {0}")]
    Json(String),
}
