//! The fold-carrying term representation: a term *is* the procedure that
//! runs an arbitrary Mendler algebra over it.
//!
//! Rust has no rank-2 values, so the carrier is erased to `Box<dyn Any>` and
//! restored by the typed entry point [`FoldTerm::mfold`].

use std::any::Any;
use std::fmt;
use std::sync::Arc;

use super::{fold_c, step_with, Handle, KernelError, MendlerAlgebra, Node, Signature, Term};

type Erased = Box<dyn Any>;

type Runner = dyn Fn(&dyn MendlerAlgebra<Erased>) -> Erased + Send + Sync;

#[derive(Clone)]
pub struct FoldTerm(Arc<Runner>);

impl fmt::Debug for FoldTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FoldTerm({})", reflect(self))
    }
}

struct Erase<'a, C>(&'a dyn MendlerAlgebra<C>);

impl<C: 'static> MendlerAlgebra<Erased> for Erase<'_, C> {
    fn step<'h>(&self, rec: &dyn Fn(Handle<'h>) -> Erased, node: Node<Handle<'h>>) -> Erased {
        let typed = |h: Handle<'h>| *rec(h).downcast::<C>().expect("carrier type is fixed per fold");
        Box::new(self.0.step(&typed, node))
    }
}

struct OutAlgebra;

impl MendlerAlgebra<Node<FoldTerm>> for OutAlgebra {
    fn step<'h>(&self, rec: &dyn Fn(Handle<'h>) -> Node<FoldTerm>, node: Node<Handle<'h>>) -> Node<FoldTerm> {
        node.map(|h| FoldTerm::in_unchecked(rec(h)))
    }
}

impl FoldTerm {
    /// `in x = λ f. f.step(fold f, x)`.
    pub fn in_(sig: &Signature, node: Node<FoldTerm>) -> Result<FoldTerm, KernelError> {
        sig.check_node(&node)?;
        Ok(FoldTerm::in_unchecked(node))
    }

    fn in_unchecked(node: Node<FoldTerm>) -> FoldTerm {
        FoldTerm(Arc::new(move |alg: &dyn MendlerAlgebra<Erased>| {
            step_with(alg, &|child: &FoldTerm| (child.0)(alg), &node)
        }))
    }

    /// Running the term on the algebra is the fold.
    pub fn mfold<C: 'static>(&self, m: &dyn MendlerAlgebra<C>) -> C {
        *(self.0)(&Erase(m)).downcast::<C>().expect("carrier type is fixed per fold")
    }

    /// `out` is itself a fold: the step rebuilds each handle's result with `in`.
    pub fn out_(&self) -> Node<FoldTerm> {
        self.mfold(&OutAlgebra)
    }
}

/// Tree term to fold-carrying term.
pub fn reify(t: &Term) -> FoldTerm {
    fold_c(&|n: Node<FoldTerm>| FoldTerm::in_unchecked(n), t)
}

/// Fold-carrying term to tree term, by running the rebuild algebra.
pub fn reflect(f: &FoldTerm) -> Term {
    struct Rebuild;
    impl MendlerAlgebra<Term> for Rebuild {
        fn step<'h>(&self, rec: &dyn Fn(Handle<'h>) -> Term, node: Node<Handle<'h>>) -> Term {
            Term::in_unchecked(node.map(rec))
        }
    }
    f.mfold(&Rebuild)
}
