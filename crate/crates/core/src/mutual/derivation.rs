//! Mutually defined relations: two judgment families whose rules may have
//! premises in either family.

use std::fmt::{self, Debug};
use std::sync::Arc;

use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::Serialize;

use super::{Component, Handle1, Handle2, WrongComponent};
use crate::indexed::{show, IndexMismatch, InvalidDerivation, RuleName};
use crate::kernel::{fresh_nonce, Handle};

/// A premise of a mutual rule: the index it sits at and its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BiPremise<K1, K2, A1, A2> {
    First(K1, A1),
    Second(K2, A2),
}

/// Premise index of either family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum BiIndex<K1, K2> {
    First(K1),
    Second(K2),
}

impl<K1, K2, A1, A2> BiPremise<K1, K2, A1, A2> {
    pub fn component(&self) -> Component {
        match self {
            BiPremise::First(..) => Component::First,
            BiPremise::Second(..) => Component::Second,
        }
    }

    pub fn index(&self) -> BiIndex<&K1, &K2> {
        match self {
            BiPremise::First(k, _) => BiIndex::First(k),
            BiPremise::Second(k, _) => BiIndex::Second(k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiInstance<K1, K2, C> {
    pub premises: Vec<BiIndex<K1, K2>>,
    pub conclusion: C,
}

pub trait IndexedBiSignature {
    type Index1: Clone + PartialEq + Debug + Serialize;
    type Index2: Clone + PartialEq + Debug + Serialize;
    type Rule1: Clone + PartialEq + Debug + Serialize + RuleName;
    type Rule2: Clone + PartialEq + Debug + Serialize + RuleName;

    const FAMILY1: Option<&'static str> = None;
    const FAMILY2: Option<&'static str> = None;

    fn name(&self) -> &str;

    #[allow(clippy::type_complexity)]
    fn instantiate1(&self, rule: &Self::Rule1) -> Result<BiInstance<Self::Index1, Self::Index2, Self::Index1>, String>;
    #[allow(clippy::type_complexity)]
    fn instantiate2(&self, rule: &Self::Rule2) -> Result<BiInstance<Self::Index1, Self::Index2, Self::Index2>, String>;

    fn validate_evidence1(&self, _rule: &Self::Rule1) -> Result<(), String> {
        Ok(())
    }

    fn validate_evidence2(&self, _rule: &Self::Rule2) -> Result<(), String> {
        Ok(())
    }
}

/// One rule instance of a mutual relation, concluding at a `C` index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HNode<R, C, K1, K2, A1, A2> {
    pub rule: R,
    pub premises: Vec<BiPremise<K1, K2, A1, A2>>,
    pub conclusion: C,
}

impl<R, C, K1, K2, A1, A2> HNode<R, C, K1, K2, A1, A2> {
    pub fn new(rule: R, premises: Vec<BiPremise<K1, K2, A1, A2>>, conclusion: C) -> Self {
        HNode { rule, premises, conclusion }
    }

    /// The indexed bi-functor map.
    pub fn map<B1, B2>(
        self,
        mut f1: impl FnMut(&K1, A1) -> B1,
        mut f2: impl FnMut(&K2, A2) -> B2,
    ) -> HNode<R, C, K1, K2, B1, B2> {
        HNode {
            rule: self.rule,
            premises: self
                .premises
                .into_iter()
                .map(|p| match p {
                    BiPremise::First(k, a) => {
                        let b = f1(&k, a);
                        BiPremise::First(k, b)
                    }
                    BiPremise::Second(k, a) => {
                        let b = f2(&k, a);
                        BiPremise::Second(k, b)
                    }
                })
                .collect(),
            conclusion: self.conclusion,
        }
    }

    pub fn map_ref<B1, B2>(
        &self,
        mut f1: impl FnMut(&K1, &A1) -> B1,
        mut f2: impl FnMut(&K2, &A2) -> B2,
    ) -> HNode<R, C, K1, K2, B1, B2>
    where
        R: Clone,
        C: Clone,
        K1: Clone,
        K2: Clone,
    {
        HNode {
            rule: self.rule.clone(),
            premises: self
                .premises
                .iter()
                .map(|p| match p {
                    BiPremise::First(k, a) => BiPremise::First(k.clone(), f1(k, a)),
                    BiPremise::Second(k, a) => BiPremise::Second(k.clone(), f2(k, a)),
                })
                .collect(),
            conclusion: self.conclusion.clone(),
        }
    }
}

pub fn hfmap<R, C, K1, K2, A1, A2, B1, B2>(
    f1: impl FnMut(&K1, A1) -> B1,
    f2: impl FnMut(&K2, A2) -> B2,
    n: HNode<R, C, K1, K2, A1, A2>,
) -> HNode<R, C, K1, K2, B1, B2> {
    n.map(f1, f2)
}

pub type Layer1<S> = HNode<
    <S as IndexedBiSignature>::Rule1,
    <S as IndexedBiSignature>::Index1,
    <S as IndexedBiSignature>::Index1,
    <S as IndexedBiSignature>::Index2,
    Derivation1<S>,
    Derivation2<S>,
>;

pub type Layer2<S> = HNode<
    <S as IndexedBiSignature>::Rule2,
    <S as IndexedBiSignature>::Index2,
    <S as IndexedBiSignature>::Index1,
    <S as IndexedBiSignature>::Index2,
    Derivation1<S>,
    Derivation2<S>,
>;

/// A derivation in the first family.
pub struct Derivation1<S: IndexedBiSignature>(Arc<Layer1<S>>);

/// A derivation in the second family.
pub struct Derivation2<S: IndexedBiSignature>(Arc<Layer2<S>>);

macro_rules! derivation_common {
    ($d:ident, $layer:ident, $index:ident, $rule:ident, $family:ident) => {
        impl<S: IndexedBiSignature> Clone for $d<S> {
            fn clone(&self) -> Self {
                $d(self.0.clone())
            }
        }

        impl<S: IndexedBiSignature> PartialEq for $d<S> {
            fn eq(&self, other: &Self) -> bool {
                Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
            }
        }

        impl<S: IndexedBiSignature> Debug for $d<S> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", self.0.rule)?;
                if !self.0.premises.is_empty() {
                    let mut list = f.debug_list();
                    for p in &self.0.premises {
                        match p {
                            BiPremise::First(_, d) => list.entry(d),
                            BiPremise::Second(_, d) => list.entry(d),
                        };
                    }
                    list.finish()?;
                }
                Ok(())
            }
        }

        impl<S: IndexedBiSignature> $d<S> {
            pub fn conclusion(&self) -> &S::$index {
                &self.0.conclusion
            }

            pub fn rule(&self) -> &S::$rule {
                &self.0.rule
            }

            pub fn node(&self) -> &$layer<S> {
                &self.0
            }

            pub fn size(&self) -> usize {
                1 + self
                    .0
                    .premises
                    .iter()
                    .map(|p| match p {
                        BiPremise::First(_, d) => d.size(),
                        BiPremise::Second(_, d) => d.size(),
                    })
                    .sum::<usize>()
            }

            pub fn depth(&self) -> usize {
                1 + self
                    .0
                    .premises
                    .iter()
                    .map(|p| match p {
                        BiPremise::First(_, d) => d.depth(),
                        BiPremise::Second(_, d) => d.depth(),
                    })
                    .max()
                    .unwrap_or(0)
            }

            pub fn to_json(&self) -> serde_json::Value {
                serde_json::to_value(self).expect("derivations always serialize")
            }
        }

        impl<S: IndexedBiSignature> Serialize for $d<S> {
            fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
                let node = self.node();
                let mut map = serializer.serialize_map(None)?;
                if let Some(family) = S::$family {
                    map.serialize_entry("family", family)?;
                }
                map.serialize_entry("rule", node.rule.rule_name())?;
                map.serialize_entry("index", &node.conclusion)?;
                map.serialize_entry("params", &node.rule)?;
                map.serialize_entry("premises", &PremiseList(&node.premises))?;
                map.end()
            }
        }
    };
}

derivation_common!(Derivation1, Layer1, Index1, Rule1, FAMILY1);
derivation_common!(Derivation2, Layer2, Index2, Rule2, FAMILY2);

type DRef<'a, S> = BiPremise<(), (), &'a Derivation1<S>, &'a Derivation2<S>>;

struct PremiseList<'a, S: IndexedBiSignature>(&'a [BiPremise<S::Index1, S::Index2, Derivation1<S>, Derivation2<S>>]);

impl<S: IndexedBiSignature> Serialize for PremiseList<'_, S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for p in self.0 {
            match p {
                BiPremise::First(_, d) => seq.serialize_element(d)?,
                BiPremise::Second(_, d) => seq.serialize_element(d)?,
            }
        }
        seq.end()
    }
}

fn premise_refs<S: IndexedBiSignature>(
    premises: &[BiPremise<S::Index1, S::Index2, Derivation1<S>, Derivation2<S>>],
) -> Vec<DRef<'_, S>> {
    premises
        .iter()
        .map(|p| match p {
            BiPremise::First(_, d) => BiPremise::First((), d),
            BiPremise::Second(_, d) => BiPremise::Second((), d),
        })
        .collect()
}

fn check_premises<S: IndexedBiSignature>(
    want: &[BiIndex<S::Index1, S::Index2>],
    premises: &[BiPremise<S::Index1, S::Index2, Derivation1<S>, Derivation2<S>>],
) -> Result<(), String> {
    if want.len() != premises.len() {
        return Err(format!("rule has {} premises, node has {}", want.len(), premises.len()));
    }
    for (i, (w, p)) in want.iter().zip(premises).enumerate() {
        match (w, p) {
            (BiIndex::First(w), BiPremise::First(k, d)) => {
                if w != k {
                    return Err(format!("premise {i} should be at {}, node has {}", show(w), show(k)));
                }
                if d.conclusion() != k {
                    return Err(format!("premise {i} expects {}, child concludes {}", show(k), show(d.conclusion())));
                }
            }
            (BiIndex::Second(w), BiPremise::Second(k, d)) => {
                if w != k {
                    return Err(format!("premise {i} should be at {}, node has {}", show(w), show(k)));
                }
                if d.conclusion() != k {
                    return Err(format!("premise {i} expects {}, child concludes {}", show(k), show(d.conclusion())));
                }
            }
            _ => return Err(format!("premise {i} is in the wrong family")),
        }
    }
    Ok(())
}

fn check_local1<S: IndexedBiSignature>(sig: &S, node: &Layer1<S>) -> Result<(), String> {
    let inst = sig.instantiate1(&node.rule)?;
    if inst.conclusion != node.conclusion {
        return Err(format!("rule concludes {}, node claims {}", show(&inst.conclusion), show(&node.conclusion)));
    }
    check_premises(&inst.premises, &node.premises)
}

fn check_local2<S: IndexedBiSignature>(sig: &S, node: &Layer2<S>) -> Result<(), String> {
    let inst = sig.instantiate2(&node.rule)?;
    if inst.conclusion != node.conclusion {
        return Err(format!("rule concludes {}, node claims {}", show(&inst.conclusion), show(&node.conclusion)));
    }
    check_premises(&inst.premises, &node.premises)
}

pub fn din1<S: IndexedBiSignature>(sig: &S, node: Layer1<S>) -> Result<Derivation1<S>, InvalidDerivation> {
    match check_local1(sig, &node) {
        Ok(()) => Ok(Derivation1(Arc::new(node))),
        Err(reason) => Err(InvalidDerivation {
            path: vec![],
            rule: node.rule.rule_name().to_string(),
            index: show(&node.conclusion),
            reason,
        }),
    }
}

pub fn din2<S: IndexedBiSignature>(sig: &S, node: Layer2<S>) -> Result<Derivation2<S>, InvalidDerivation> {
    match check_local2(sig, &node) {
        Ok(()) => Ok(Derivation2(Arc::new(node))),
        Err(reason) => Err(InvalidDerivation {
            path: vec![],
            rule: node.rule.rule_name().to_string(),
            index: show(&node.conclusion),
            reason,
        }),
    }
}

pub fn dout1<S: IndexedBiSignature>(d: &Derivation1<S>) -> &Layer1<S> {
    d.node()
}

pub fn dout2<S: IndexedBiSignature>(d: &Derivation2<S>) -> &Layer2<S> {
    d.node()
}

fn validate_at<S: IndexedBiSignature>(sig: &S, d: DRef<'_, S>, path: &mut Vec<usize>) -> Result<(), InvalidDerivation> {
    let (local, rule, index, premises) = match d {
        BiPremise::First((), d) => {
            let n = d.node();
            let local = sig.validate_evidence1(&n.rule).and_then(|()| check_local1(sig, n));
            (local, n.rule.rule_name(), show(&n.conclusion), &n.premises)
        }
        BiPremise::Second((), d) => {
            let n = d.node();
            let local = sig.validate_evidence2(&n.rule).and_then(|()| check_local2(sig, n));
            (local, n.rule.rule_name(), show(&n.conclusion), &n.premises)
        }
    };
    if let Err(reason) = local {
        return Err(InvalidDerivation { path: path.clone(), rule: rule.to_string(), index, reason });
    }
    for (i, child) in premise_refs::<S>(premises).into_iter().enumerate() {
        path.push(i);
        validate_at(sig, child, path)?;
        path.pop();
    }
    Ok(())
}

/// Full recursive check of a first-family derivation.
pub fn validate1<S: IndexedBiSignature>(sig: &S, d: &Derivation1<S>) -> Result<(), InvalidDerivation> {
    validate_at(sig, BiPremise::First((), d), &mut Vec::new())
}

/// Full recursive check of a second-family derivation.
pub fn validate2<S: IndexedBiSignature>(sig: &S, d: &Derivation2<S>) -> Result<(), InvalidDerivation> {
    validate_at(sig, BiPremise::Second((), d), &mut Vec::new())
}

pub type HandleLayer1<'h, S> = HNode<
    <S as IndexedBiSignature>::Rule1,
    <S as IndexedBiSignature>::Index1,
    <S as IndexedBiSignature>::Index1,
    <S as IndexedBiSignature>::Index2,
    Handle1<'h>,
    Handle2<'h>,
>;

pub type HandleLayer2<'h, S> = HNode<
    <S as IndexedBiSignature>::Rule2,
    <S as IndexedBiSignature>::Index2,
    <S as IndexedBiSignature>::Index1,
    <S as IndexedBiSignature>::Index2,
    Handle1<'h>,
    Handle2<'h>,
>;

/// One value carrying the steps for both families of a mutual relation.
pub trait IndexedBiMendlerAlgebra<S: IndexedBiSignature, D1, D2> {
    fn step1<'h>(
        &self,
        rec1: &dyn Fn(&S::Index1, Handle1<'h>) -> D1,
        rec2: &dyn Fn(&S::Index2, Handle2<'h>) -> D2,
        w: &S::Index1,
        node: HandleLayer1<'h, S>,
    ) -> D1;

    fn step2<'h>(
        &self,
        rec1: &dyn Fn(&S::Index1, Handle1<'h>) -> D1,
        rec2: &dyn Fn(&S::Index2, Handle2<'h>) -> D2,
        w: &S::Index2,
        node: HandleLayer2<'h, S>,
    ) -> D2;
}

type Rec1<'a, S, A1, D1> = &'a dyn Fn(&<S as IndexedBiSignature>::Index1, &A1) -> D1;
type Rec2<'a, S, A2, D2> = &'a dyn Fn(&<S as IndexedBiSignature>::Index2, &A2) -> D2;

fn handles<'h, R: Clone, C: Clone, K1: Clone, K2: Clone, A1, A2>(
    node: &HNode<R, C, K1, K2, A1, A2>,
    nonce: u64,
) -> HNode<R, C, K1, K2, Handle1<'h>, Handle2<'h>> {
    let mut slot = 0usize;
    let mut next = || {
        slot += 1;
        Handle::new(slot - 1, nonce)
    };
    HNode {
        rule: node.rule.clone(),
        premises: node
            .premises
            .iter()
            .map(|p| match p {
                BiPremise::First(k, _) => BiPremise::First(k.clone(), Handle1(next())),
                BiPremise::Second(k, _) => BiPremise::Second(k.clone(), Handle2(next())),
            })
            .collect(),
        conclusion: node.conclusion.clone(),
    }
}

fn resolve1<'n, K1: PartialEq + Serialize + Debug, K2, A1, A2>(
    premises: &'n [BiPremise<K1, K2, A1, A2>],
    k: &K1,
    slot: usize,
) -> &'n A1 {
    match &premises[slot] {
        BiPremise::First(want, a) => {
            assert!(want == k, "recursive call at {} for a premise at {}", show(k), show(want));
            a
        }
        BiPremise::Second(..) => unreachable!("first-family handle names a second-family premise"),
    }
}

fn resolve2<'n, K1, K2: PartialEq + Serialize + Debug, A1, A2>(
    premises: &'n [BiPremise<K1, K2, A1, A2>],
    k: &K2,
    slot: usize,
) -> &'n A2 {
    match &premises[slot] {
        BiPremise::Second(want, a) => {
            assert!(want == k, "recursive call at {} for a premise at {}", show(k), show(want));
            a
        }
        BiPremise::First(..) => unreachable!("second-family handle names a first-family premise"),
    }
}

/// One first-family step of `m`, with recursive calls answered on the real
/// premise witnesses.
pub fn hstep_with_1<S, D1, D2, A1, A2, M>(
    m: &M,
    rec1: Rec1<'_, S, A1, D1>,
    rec2: Rec2<'_, S, A2, D2>,
    w: &S::Index1,
    node: &HNode<S::Rule1, S::Index1, S::Index1, S::Index2, A1, A2>,
) -> D1
where
    S: IndexedBiSignature,
    M: IndexedBiMendlerAlgebra<S, D1, D2> + ?Sized,
{
    let nonce = fresh_nonce();
    let hs = handles(node, nonce);
    let r1 = |k: &S::Index1, h: Handle1<'_>| rec1(k, resolve1(&node.premises, k, h.0.check(nonce)));
    let r2 = |k: &S::Index2, h: Handle2<'_>| rec2(k, resolve2(&node.premises, k, h.0.check(nonce)));
    m.step1(&r1, &r2, w, hs)
}

/// One second-family step of `m`.
pub fn hstep_with_2<S, D1, D2, A1, A2, M>(
    m: &M,
    rec1: Rec1<'_, S, A1, D1>,
    rec2: Rec2<'_, S, A2, D2>,
    w: &S::Index2,
    node: &HNode<S::Rule2, S::Index2, S::Index1, S::Index2, A1, A2>,
) -> D2
where
    S: IndexedBiSignature,
    M: IndexedBiMendlerAlgebra<S, D1, D2> + ?Sized,
{
    let nonce = fresh_nonce();
    let hs = handles(node, nonce);
    let r1 = |k: &S::Index1, h: Handle1<'_>| rec1(k, resolve1(&node.premises, k, h.0.check(nonce)));
    let r2 = |k: &S::Index2, h: Handle2<'_>| rec2(k, resolve2(&node.premises, k, h.0.check(nonce)));
    m.step2(&r1, &r2, w, hs)
}

fn hfold_at_1<S, D1, D2, M>(m: &M, d: &Derivation1<S>) -> D1
where
    S: IndexedBiSignature,
    M: IndexedBiMendlerAlgebra<S, D1, D2> + ?Sized,
{
    hstep_with_1(m, &|_, c| hfold_at_1(m, c), &|_, c| hfold_at_2(m, c), d.conclusion(), d.node())
}

fn hfold_at_2<S, D1, D2, M>(m: &M, d: &Derivation2<S>) -> D2
where
    S: IndexedBiSignature,
    M: IndexedBiMendlerAlgebra<S, D1, D2> + ?Sized,
{
    hstep_with_2(m, &|_, c| hfold_at_1(m, c), &|_, c| hfold_at_2(m, c), d.conclusion(), d.node())
}

/// Mutual indexed Mendler iteration entered at a first-family derivation.
pub fn hfold_1<S, D1, D2, M>(m: &M, w: &S::Index1, d: &Derivation1<S>) -> Result<D1, IndexMismatch>
where
    S: IndexedBiSignature,
    M: IndexedBiMendlerAlgebra<S, D1, D2> + ?Sized,
{
    if d.conclusion() != w {
        return Err(IndexMismatch { expected: show(w), found: show(d.conclusion()) });
    }
    Ok(hfold_at_1(m, d))
}

/// Mutual indexed Mendler iteration entered at a second-family derivation.
pub fn hfold_2<S, D1, D2, M>(m: &M, w: &S::Index2, d: &Derivation2<S>) -> Result<D2, IndexMismatch>
where
    S: IndexedBiSignature,
    M: IndexedBiMendlerAlgebra<S, D1, D2> + ?Sized,
{
    if d.conclusion() != w {
        return Err(IndexMismatch { expected: show(w), found: show(d.conclusion()) });
    }
    Ok(hfold_at_2(m, d))
}

/// A derivation of either family, for callers that hold one without
/// knowing which.
#[derive(Clone, Debug)]
pub enum BiDerivation<S: IndexedBiSignature> {
    First(Derivation1<S>),
    Second(Derivation2<S>),
}

impl<S: IndexedBiSignature> PartialEq for BiDerivation<S> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BiDerivation::First(a), BiDerivation::First(b)) => a == b,
            (BiDerivation::Second(a), BiDerivation::Second(b)) => a == b,
            _ => false,
        }
    }
}

impl<S: IndexedBiSignature> BiDerivation<S> {
    pub fn component(&self) -> Component {
        match self {
            BiDerivation::First(_) => Component::First,
            BiDerivation::Second(_) => Component::Second,
        }
    }

    pub fn first(self) -> Result<Derivation1<S>, WrongComponent> {
        match self {
            BiDerivation::First(d) => Ok(d),
            BiDerivation::Second(_) => Err(WrongComponent { expected: Component::First, found: Component::Second }),
        }
    }

    pub fn second(self) -> Result<Derivation2<S>, WrongComponent> {
        match self {
            BiDerivation::Second(d) => Ok(d),
            BiDerivation::First(_) => Err(WrongComponent { expected: Component::Second, found: Component::First }),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            BiDerivation::First(d) => d.to_json(),
            BiDerivation::Second(d) => d.to_json(),
        }
    }
}
