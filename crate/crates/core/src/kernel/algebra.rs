use std::marker::PhantomData;

use super::{KernelError, Node, Term};

/// A conventional algebra: a structure map `F C -> C`.
pub trait Algebra<C> {
    fn apply(&self, node: Node<C>) -> C;
}

impl<C, F> Algebra<C> for F
where
    F: Fn(Node<C>) -> C,
{
    fn apply(&self, node: Node<C>) -> C {
        self(node)
    }
}

/// The catamorphism: `fold alg (in n) = alg (fmap (fold alg) n)`.
pub fn fold_c<C, A>(alg: &A, t: &Term) -> C
where
    A: Algebra<C> + ?Sized,
{
    alg.apply(t.out_().map_ref(|child| fold_c(alg, child)))
}

#[cfg(debug_assertions)]
static NONCE: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(1);

#[cfg(debug_assertions)]
pub(crate) fn fresh_nonce() -> u64 {
    NONCE.fetch_add(1, std::sync::atomic::Ordering::Relaxed)
}

#[cfg(not(debug_assertions))]
pub(crate) fn fresh_nonce() -> u64 {
    0
}

/// An opaque recursive position handed to a Mendler step.
///
/// A handle has no observers; the only thing a step can do with it is pass
/// it to the recursion procedure it received alongside. The invariant
/// lifetime `'h` ties the handle to that one step invocation. Debug builds
/// also stamp each step with a nonce and panic on cross-step use.
pub struct Handle<'h> {
    pub(crate) slot: usize,
    #[cfg(debug_assertions)]
    pub(crate) nonce: u64,
    _brand: PhantomData<fn(&'h ()) -> &'h ()>,
}

impl Clone for Handle<'_> {
    fn clone(&self) -> Self {
        *self
    }
}

impl Copy for Handle<'_> {}

impl std::fmt::Debug for Handle<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Handle(..)")
    }
}

impl<'h> Handle<'h> {
    #[allow(unused_variables)]
    pub(crate) fn new(slot: usize, nonce: u64) -> Self {
        Handle {
            slot,
            #[cfg(debug_assertions)]
            nonce,
            _brand: PhantomData,
        }
    }

    #[allow(unused_variables)]
    #[inline]
    pub(crate) fn check(&self, nonce: u64) -> usize {
        #[cfg(debug_assertions)]
        assert_eq!(self.nonce, nonce, "Mendler handle used outside the step that received it");
        self.slot
    }
}

/// A Mendler algebra: one iteration step, quantified over the type of
/// recursive positions.
pub trait MendlerAlgebra<C> {
    fn step<'h>(&self, rec: &dyn Fn(Handle<'h>) -> C, node: Node<Handle<'h>>) -> C;
}

/// A Mendler algebra given by a closure.
pub struct MendlerFn<F>(F);

/// Wraps a closure as a Mendler algebra. The closure must be generic in the
/// handle lifetime, which the bound below forces at the definition site.
pub fn mendler<C, F>(f: F) -> MendlerFn<F>
where
    F: for<'h> Fn(&dyn Fn(Handle<'h>) -> C, Node<Handle<'h>>) -> C,
{
    MendlerFn(f)
}

impl<C, F> MendlerAlgebra<C> for MendlerFn<F>
where
    F: for<'h> Fn(&dyn Fn(Handle<'h>) -> C, Node<Handle<'h>>) -> C,
{
    fn step<'h>(&self, rec: &dyn Fn(Handle<'h>) -> C, node: Node<Handle<'h>>) -> C {
        (self.0)(rec, node)
    }
}

/// Runs one step of `m` on `node`, answering recursive calls with `rec`
/// applied to the real child. With `rec = mfold m` this is the right-hand
/// side of the Mendler computation rule.
pub fn step_with<A, C, M>(m: &M, rec: &dyn Fn(&A) -> C, node: &Node<A>) -> C
where
    M: MendlerAlgebra<C> + ?Sized,
{
    let nonce = fresh_nonce();
    let mut slot = 0usize;
    let handles = node.map_ref(|_| {
        slot += 1;
        Handle::new(slot - 1, nonce)
    });
    m.step(&|h: Handle<'_>| rec(&node.rec()[h.check(nonce)]), handles)
}

/// Mendler iteration: `mfold m (in n) = m.step(mfold m, n)`.
pub fn mfold<C, M>(m: &M, t: &Term) -> C
where
    M: MendlerAlgebra<C> + ?Sized,
{
    step_with(m, &|child: &Term| mfold(m, child), t.out_())
}

/// The canonical Mendler algebra of a conventional one:
/// `step rec n = alg (fmap rec n)`.
#[derive(Clone, Debug)]
pub struct Lifted<A>(pub A);

pub fn lift<A>(alg: A) -> Lifted<A> {
    Lifted(alg)
}

impl<C, A: Algebra<C>> MendlerAlgebra<C> for Lifted<A> {
    fn step<'h>(&self, rec: &dyn Fn(Handle<'h>) -> C, node: Node<Handle<'h>>) -> C {
        self.0.apply(node.map(rec))
    }
}

/// Outcome of a sampled uniqueness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    /// `h` satisfied the hypothesis and agreed with the fold on every sample.
    Holds { checked: usize },
    /// `h (in x) = step h x` fails at this sample.
    HypothesisViolation { sample: Term },
    /// The hypothesis held everywhere, yet `h` and the fold disagree here.
    UniquenessViolation { sample: Term },
}

/// Sampled form of the uniqueness law for Mendler folds: any `h` with
/// `h (in x) = step h x` must coincide with `mfold`.
///
/// The hypothesis is checked on all samples before agreement is checked, so
/// a broken `h` is reported as a hypothesis violation. A carrier whose
/// equality is not reflexive on the samples (e.g. NaN floats) is rejected.
pub fn check_uniqueness<C, M>(m: &M, h: &dyn Fn(&Term) -> C, samples: &[Term]) -> Result<Uniqueness, KernelError>
where
    C: PartialEq,
    M: MendlerAlgebra<C> + ?Sized,
{
    for t in samples {
        let ht = h(t);
        #[allow(clippy::eq_op)]
        if ht != ht {
            return Err(KernelError::UnsupportedCarrier(format!("carrier equality is not reflexive at {t}")));
        }
        if ht != step_with(m, h, t.out_()) {
            return Ok(Uniqueness::HypothesisViolation { sample: t.clone() });
        }
    }
    for t in samples {
        if h(t) != mfold(m, t) {
            return Ok(Uniqueness::UniquenessViolation { sample: t.clone() });
        }
    }
    Ok(Uniqueness::Holds { checked: samples.len() })
}
