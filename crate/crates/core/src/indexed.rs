//! Inductively defined relations as derivation trees.
//!
//! An [`IndexedSignature`] lists rules; a rule instance fixes its parameters,
//! from which the signature computes the premise and conclusion indices and
//! decides the side conditions. A [`Derivation`] is a tree of rule instances
//! whose child conclusions line up with the parent's premises.

use std::fmt::{self, Debug};
use std::sync::Arc;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::kernel::{fresh_nonce, Handle};

/// The indices a rule instance mentions: one per recursive premise, plus the
/// conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance<K> {
    pub premises: Vec<K>,
    pub conclusion: K,
}

/// Rule parameter types name the rule they instantiate.
pub trait RuleName {
    fn rule_name(&self) -> &'static str;
}

pub trait IndexedSignature {
    type Index: Clone + PartialEq + Debug + Serialize;
    /// A rule name together with its instantiated parameters.
    type Rule: Clone + PartialEq + Debug + Serialize + RuleName;

    /// Tag written into exported derivations, if the relation has one.
    const FAMILY: Option<&'static str> = None;

    fn name(&self) -> &str;

    /// Evaluates the rule's index expressions under its parameters and
    /// decides its side conditions. `Err` carries the failing condition.
    fn instantiate(&self, rule: &Self::Rule) -> Result<Instance<Self::Index>, String>;

    /// `true` only if `rule` instantiates to exactly these premise and
    /// conclusion indices. An optional shortcut for signatures whose
    /// indices are costly to build; `false` falls back to [`instantiate`].
    ///
    /// [`instantiate`]: IndexedSignature::instantiate
    fn matches(&self, _rule: &Self::Rule, _premises: &[&Self::Index], _conclusion: &Self::Index) -> bool {
        false
    }

    /// Deep checks of evidence carried in the parameters (e.g. derivations of
    /// other relations). Only [`validate`] calls this.
    fn validate_evidence(&self, _rule: &Self::Rule) -> Result<(), String> {
        Ok(())
    }
}

/// One rule instance whose recursive premises are witnessed by `A`s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DNode<R, K, A> {
    pub rule: R,
    pub premises: Vec<(K, A)>,
    pub conclusion: K,
}

impl<R, K, A> DNode<R, K, A> {
    pub fn new(rule: R, premises: Vec<(K, A)>, conclusion: K) -> Self {
        DNode { rule, premises, conclusion }
    }

    /// The indexed functor map: indices stay, witnesses are mapped at their
    /// premise index.
    pub fn map<B>(self, mut f: impl FnMut(&K, A) -> B) -> DNode<R, K, B> {
        DNode {
            rule: self.rule,
            premises: self
                .premises
                .into_iter()
                .map(|(k, a)| {
                    let b = f(&k, a);
                    (k, b)
                })
                .collect(),
            conclusion: self.conclusion,
        }
    }

    pub fn map_ref<B>(&self, mut f: impl FnMut(&K, &A) -> B) -> DNode<R, K, B>
    where
        R: Clone,
        K: Clone,
    {
        DNode {
            rule: self.rule.clone(),
            premises: self.premises.iter().map(|(k, a)| (k.clone(), f(k, a))).collect(),
            conclusion: self.conclusion.clone(),
        }
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &A> {
        self.premises.iter().map(|(_, a)| a)
    }
}

pub fn ifmap<R, K, A, B>(f: impl FnMut(&K, A) -> B, n: DNode<R, K, A>) -> DNode<R, K, B> {
    n.map(f)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid derivation: rule `{rule}` at path {path:?} concluding {index}: {reason}")]
pub struct InvalidDerivation {
    /// Premise positions from the root to the failing node.
    pub path: Vec<usize>,
    pub rule: String,
    pub index: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("wrong index: expected {expected}, derivation concludes {found}")]
pub struct IndexMismatch {
    pub expected: String,
    pub found: String,
}

pub(crate) fn show<K: Serialize + Debug>(k: &K) -> String {
    serde_json::to_string(k).unwrap_or_else(|_| format!("{k:?}"))
}

type Layer<S> = DNode<<S as IndexedSignature>::Rule, <S as IndexedSignature>::Index, Derivation<S>>;

/// A finite derivation tree. Only obtainable through [`din`], so every node
/// satisfied its rule when it was built.
pub struct Derivation<S: IndexedSignature>(Arc<Layer<S>>);

impl<S: IndexedSignature> Clone for Derivation<S> {
    fn clone(&self) -> Self {
        Derivation(self.0.clone())
    }
}

impl<S: IndexedSignature> PartialEq for Derivation<S> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl<S: IndexedSignature> Debug for Derivation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.rule)?;
        if !self.0.premises.is_empty() {
            f.debug_list().entries(self.0.witnesses()).finish()?;
        }
        Ok(())
    }
}

impl<S: IndexedSignature> Derivation<S> {
    pub fn conclusion(&self) -> &S::Index {
        &self.0.conclusion
    }

    pub fn rule(&self) -> &S::Rule {
        &self.0.rule
    }

    pub fn node(&self) -> &Layer<S> {
        &self.0
    }

    pub fn children(&self) -> impl Iterator<Item = &Derivation<S>> {
        self.0.witnesses()
    }

    pub fn size(&self) -> usize {
        1 + self.children().map(Derivation::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map(Derivation::depth).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("derivations always serialize")
    }
}

/// `{"family"?, "rule", "index", "params", "premises"}`.
impl<S: IndexedSignature> Serialize for Derivation<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let node = self.node();
        let mut map = serializer.serialize_map(None)?;
        if let Some(family) = S::FAMILY {
            map.serialize_entry("family", family)?;
        }
        map.serialize_entry("rule", node.rule.rule_name())?;
        map.serialize_entry("index", &node.conclusion)?;
        map.serialize_entry("params", &node.rule)?;
        let premises: Vec<&Derivation<S>> = node.witnesses().collect();
        map.serialize_entry("premises", &premises)?;
        map.end()
    }
}

/// Checks one node against its rule: side conditions, premise indices,
/// conclusion index, and the conclusions of the immediate children.
pub(crate) fn check_local<S, A>(
    sig: &S,
    node: &DNode<S::Rule, S::Index, A>,
    child_conclusion: impl Fn(&A) -> &S::Index,
) -> Result<(), String>
where
    S: IndexedSignature,
{
    let fast = match &node.premises[..] {
        [] => sig.matches(&node.rule, &[], &node.conclusion),
        [(k1, _)] => sig.matches(&node.rule, &[k1], &node.conclusion),
        [(k1, _), (k2, _)] => sig.matches(&node.rule, &[k1, k2], &node.conclusion),
        _ => false,
    };
    if fast && node.premises.iter().all(|(k, a)| child_conclusion(a) == k) {
        return Ok(());
    }
    let inst = sig.instantiate(&node.rule)?;
    if inst.conclusion != node.conclusion {
        return Err(format!("rule concludes {}, node claims {}", show(&inst.conclusion), show(&node.conclusion)));
    }
    if inst.premises.len() != node.premises.len() {
        return Err(format!("rule has {} premises, node has {}", inst.premises.len(), node.premises.len()));
    }
    for (i, (want, (k, a))) in inst.premises.iter().zip(&node.premises).enumerate() {
        if want != k {
            return Err(format!("premise {i} should be at {}, node has {}", show(want), show(k)));
        }
        let got = child_conclusion(a);
        if got != k {
            return Err(format!("premise {i} expects {}, child concludes {}", show(k), show(got)));
        }
    }
    Ok(())
}

/// Rolls one checked layer into a derivation.
pub fn din<S: IndexedSignature>(sig: &S, node: Layer<S>) -> Result<Derivation<S>, InvalidDerivation> {
    match check_local(sig, &node, Derivation::conclusion) {
        Ok(()) => Ok(Derivation(Arc::new(node))),
        Err(reason) => Err(InvalidDerivation {
            path: vec![],
            rule: node.rule.rule_name().to_string(),
            index: show(&node.conclusion),
            reason,
        }),
    }
}

/// Unrolls one layer; inverse of [`din`].
pub fn dout<S: IndexedSignature>(d: &Derivation<S>) -> &Layer<S> {
    d.node()
}

/// Full recursive check, including evidence carried in parameters. Reports
/// the first failing node in pre-order.
pub fn validate<S: IndexedSignature>(sig: &S, d: &Derivation<S>) -> Result<(), InvalidDerivation> {
    fn go<S: IndexedSignature>(sig: &S, d: &Derivation<S>, path: &mut Vec<usize>) -> Result<(), InvalidDerivation> {
        let node = d.node();
        let local = sig.validate_evidence(&node.rule).and_then(|()| check_local(sig, node, Derivation::conclusion));
        if let Err(reason) = local {
            return Err(InvalidDerivation {
                path: path.clone(),
                rule: node.rule.rule_name().to_string(),
                index: show(&node.conclusion),
                reason,
            });
        }
        for (i, child) in d.children().enumerate() {
            path.push(i);
            go(sig, child, path)?;
            path.pop();
        }
        Ok(())
    }
    go(sig, d, &mut Vec::new())
}

/// An indexed Mendler algebra: the step sees premise indices but reaches
/// premise witnesses only through `rec`.
pub trait IndexedMendlerAlgebra<S: IndexedSignature, D> {
    fn step<'h>(
        &self,
        rec: &dyn Fn(&S::Index, Handle<'h>) -> D,
        w: &S::Index,
        node: DNode<S::Rule, S::Index, Handle<'h>>,
    ) -> D;
}

/// One step of `m` at `node`, answering `rec(k, h)` with `rec` on the real
/// witness. Panics if the step passes a handle at an index other than its
/// premise index.
pub fn istep_with<S, D, A, M>(
    m: &M,
    rec: &dyn Fn(&S::Index, &A) -> D,
    w: &S::Index,
    node: &DNode<S::Rule, S::Index, A>,
) -> D
where
    S: IndexedSignature,
    M: IndexedMendlerAlgebra<S, D> + ?Sized,
{
    let nonce = fresh_nonce();
    let mut slot = 0usize;
    let handles = node.map_ref(|_, _| {
        slot += 1;
        Handle::new(slot - 1, nonce)
    });
    let call = |k: &S::Index, h: Handle<'_>| {
        let (want, a) = &node.premises[h.check(nonce)];
        assert!(want == k, "recursive call at {} for a premise at {}", show(k), show(want));
        rec(k, a)
    };
    m.step(&call, w, handles)
}

/// Indexed Mendler iteration over a derivation concluding at `w`.
pub fn ifold<S, D, M>(m: &M, w: &S::Index, d: &Derivation<S>) -> Result<D, IndexMismatch>
where
    S: IndexedSignature,
    M: IndexedMendlerAlgebra<S, D> + ?Sized,
{
    if d.conclusion() != w {
        return Err(IndexMismatch { expected: show(w), found: show(d.conclusion()) });
    }
    Ok(ifold_at(m, d))
}

fn ifold_at<S, D, M>(m: &M, d: &Derivation<S>) -> D
where
    S: IndexedSignature,
    M: IndexedMendlerAlgebra<S, D> + ?Sized,
{
    istep_with(m, &|_, child: &Derivation<S>| ifold_at(m, child), d.conclusion(), d.node())
}
