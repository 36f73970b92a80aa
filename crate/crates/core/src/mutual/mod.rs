//! Two mutually recursive sorts over one pair of signatures, and mutually
//! defined relations over two judgment families.

mod derivation;
#[cfg(test)]
mod tests;

use std::fmt;
use std::sync::Arc;

use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::kernel::{check_slots, fresh_nonce, Handle, KernelError, Name, Payload, PayloadType, SlotShape};

pub use derivation::*;

/// Which sort of the pair a term or derivation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiSlotKind {
    Rec(Component),
    /// Finite map from identifiers to positions of the given sort.
    Bindings(Component),
    Payload(PayloadType),
}

impl From<BiSlotKind> for SlotShape {
    fn from(k: BiSlotKind) -> Self {
        match k {
            BiSlotKind::Rec(_) => SlotShape::Rec,
            BiSlotKind::Bindings(_) => SlotShape::Bindings,
            BiSlotKind::Payload(t) => SlotShape::Payload(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiConstructor {
    name: Name,
    slots: Vec<BiSlotKind>,
}

impl BiConstructor {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn slots(&self) -> &[BiSlotKind] {
        &self.slots
    }
}

/// A pair of signatures `(F1, F2)` whose recursive slots may point at
/// either sort. Constructor names are unique across both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiSignature {
    name: Name,
    first: Vec<BiConstructor>,
    second: Vec<BiConstructor>,
}

type CtorDecl<'a> = (&'a str, Vec<BiSlotKind>);

impl BiSignature {
    pub fn new<'a>(
        name: &str,
        first: impl IntoIterator<Item = CtorDecl<'a>>,
        second: impl IntoIterator<Item = CtorDecl<'a>>,
    ) -> Result<Self, KernelError> {
        let mut seen: Vec<&str> = Vec::new();
        let mut build = |decls: Vec<CtorDecl<'a>>| -> Result<Vec<BiConstructor>, KernelError> {
            let mut out = Vec::new();
            for (ctor, slots) in decls {
                if seen.contains(&ctor) {
                    return Err(KernelError::DuplicateConstructor(ctor.into()));
                }
                seen.push(ctor);
                out.push(BiConstructor { name: ctor.into(), slots });
            }
            Ok(out)
        };
        let first = build(first.into_iter().collect())?;
        let second = build(second.into_iter().collect())?;
        Ok(BiSignature { name: name.into(), first, second })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constructors(&self, c: Component) -> &[BiConstructor] {
        match c {
            Component::First => &self.first,
            Component::Second => &self.second,
        }
    }

    pub fn constructor(&self, c: Component, ctor: &str) -> Option<&BiConstructor> {
        self.constructors(c).iter().find(|k| &*k.name == ctor)
    }

    /// Checks shape and the sort of every recursive slot.
    pub fn check_node<A1, A2>(&self, c: Component, node: &BiNode<A1, A2>) -> Result<(), KernelError> {
        let k = self.constructor(c, node.ctor()).ok_or_else(|| KernelError::UnknownConstructor {
            signature: format!("{}.{c:?}", self.name),
            ctor: node.ctor().into(),
        })?;
        check_slots(&k.slots, node.rec.len(), node.payload(), |slot, i| {
            let want = match slot {
                BiSlotKind::Rec(s) | BiSlotKind::Bindings(s) => s,
                BiSlotKind::Payload(_) => return false,
            };
            node.rec[i].component() == want
        })
        .map_err(|reason| KernelError::Malformed { ctor: node.ctor().into(), reason })
    }

    pub fn in_(&self, c: Component, node: BiNode<BiTerm, BiTerm>) -> Result<BiTerm, KernelError> {
        self.check_node(c, &node)?;
        for (i, r) in node.rec.iter().enumerate() {
            let child = match r {
                BiRec::First(t) | BiRec::Second(t) => t,
            };
            if child.component() != r.component() {
                return Err(KernelError::Malformed {
                    ctor: node.ctor().into(),
                    reason: format!("slot {i} holds a {:?} term", child.component()),
                });
            }
        }
        Ok(BiTerm(Arc::new((c, node))))
    }

    pub fn in_1(&self, node: BiNode<BiTerm, BiTerm>) -> Result<BiTerm, KernelError> {
        self.in_(Component::First, node)
    }

    pub fn in_2(&self, node: BiNode<BiTerm, BiTerm>) -> Result<BiTerm, KernelError> {
        self.in_(Component::Second, node)
    }

    /// Decodes the canonical JSON form, checking every node.
    pub fn term_from_json(&self, value: &serde_json::Value) -> Result<BiTerm, KernelError> {
        let raw: RawBiTerm = serde_json::from_value(value.clone()).map_err(|e| KernelError::Json(e.to_string()))?;
        raw.check(self)
    }
}

/// A recursive slot tagged with its sort.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BiRec<A1, A2> {
    First(A1),
    Second(A2),
}

impl<A1, A2> BiRec<A1, A2> {
    pub fn component(&self) -> Component {
        match self {
            BiRec::First(_) => Component::First,
            BiRec::Second(_) => Component::Second,
        }
    }

    pub fn map<B1, B2>(self, f1: impl FnOnce(A1) -> B1, f2: impl FnOnce(A2) -> B2) -> BiRec<B1, B2> {
        match self {
            BiRec::First(a) => BiRec::First(f1(a)),
            BiRec::Second(a) => BiRec::Second(f2(a)),
        }
    }

    pub fn as_ref(&self) -> BiRec<&A1, &A2> {
        match self {
            BiRec::First(a) => BiRec::First(a),
            BiRec::Second(a) => BiRec::Second(a),
        }
    }
}

impl<A> BiRec<A, A> {
    pub fn into_inner(self) -> A {
        match self {
            BiRec::First(a) | BiRec::Second(a) => a,
        }
    }
}

/// One layer of either sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiNode<A1, A2> {
    ctor: Name,
    rec: Vec<BiRec<A1, A2>>,
    payload: Arc<[Payload]>,
}

impl<A1, A2> BiNode<A1, A2> {
    pub fn new(ctor: impl Into<Name>, rec: Vec<BiRec<A1, A2>>, payload: Vec<Payload>) -> Self {
        BiNode { ctor: ctor.into(), rec, payload: payload.into() }
    }

    pub fn ctor(&self) -> &str {
        &self.ctor
    }

    pub fn rec(&self) -> &[BiRec<A1, A2>] {
        &self.rec
    }

    pub fn payload(&self) -> &[Payload] {
        &self.payload
    }

    pub fn into_rec(self) -> Vec<BiRec<A1, A2>> {
        self.rec
    }

    pub fn map<B1, B2>(self, mut f1: impl FnMut(A1) -> B1, mut f2: impl FnMut(A2) -> B2) -> BiNode<B1, B2> {
        BiNode {
            ctor: self.ctor,
            rec: self.rec.into_iter().map(|r| r.map(&mut f1, &mut f2)).collect(),
            payload: self.payload,
        }
    }

    pub fn map_ref<B1, B2>(&self, mut f1: impl FnMut(&A1) -> B1, mut f2: impl FnMut(&A2) -> B2) -> BiNode<B1, B2> {
        BiNode {
            ctor: self.ctor.clone(),
            rec: self.rec.iter().map(|r| r.as_ref().map(&mut f1, &mut f2)).collect(),
            payload: self.payload.clone(),
        }
    }
}

/// The bi-functor map.
pub fn bifmap<A1, A2, B1, B2>(
    f1: impl FnMut(A1) -> B1,
    f2: impl FnMut(A2) -> B2,
    node: BiNode<A1, A2>,
) -> BiNode<B1, B2> {
    node.map(f1, f2)
}

/// A term of either sort of a [`BiSignature`] fixpoint.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiTerm(Arc<(Component, BiNode<BiTerm, BiTerm>)>);

impl BiTerm {
    pub fn component(&self) -> Component {
        self.0 .0
    }

    pub fn out_(&self) -> &BiNode<BiTerm, BiTerm> {
        &self.0 .1
    }

    pub fn ctor(&self) -> &str {
        self.0 .1.ctor()
    }

    pub fn size(&self) -> usize {
        1 + self.out_().rec().iter().map(|r| r.as_ref().into_inner().size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.out_().rec().iter().map(|r| r.as_ref().into_inner().depth()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("terms always serialize")
    }
}

impl fmt::Display for BiTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let node = self.out_();
        if node.rec().is_empty() && node.payload().is_empty() {
            return f.write_str(node.ctor());
        }
        write!(f, "({}", node.ctor())?;
        for p in node.payload() {
            write!(f, " {p}")?;
        }
        for r in node.rec() {
            write!(f, " {}", r.as_ref().into_inner())?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for BiTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for BiTerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let node = self.out_();
        let rec: Vec<&BiTerm> = node.rec().iter().map(|r| r.as_ref().into_inner()).collect();
        let mut st = serializer.serialize_struct("BiTerm", 4)?;
        st.serialize_field("component", &self.component())?;
        st.serialize_field("ctor", node.ctor())?;
        st.serialize_field("rec", &rec)?;
        st.serialize_field("payload", node.payload())?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawBiTerm {
    component: Component,
    ctor: Name,
    #[serde(default)]
    rec: Vec<RawBiTerm>,
    #[serde(default)]
    payload: Vec<Payload>,
}

impl RawBiTerm {
    fn check(self, sig: &BiSignature) -> Result<BiTerm, KernelError> {
        let rec = self
            .rec
            .into_iter()
            .map(|r| {
                let t = r.check(sig)?;
                Ok(match t.component() {
                    Component::First => BiRec::First(t),
                    Component::Second => BiRec::Second(t),
                })
            })
            .collect::<Result<Vec<_>, KernelError>>()?;
        sig.in_(self.component, BiNode::new(self.ctor, rec, self.payload))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("expected a {expected:?} term or derivation, got {found:?}")]
pub struct WrongComponent {
    pub expected: Component,
    pub found: Component,
}

/// A recursive position of the first sort, opaque to the step.
#[derive(Clone, Copy, Debug)]
pub struct Handle1<'h>(Handle<'h>);

/// A recursive position of the second sort, opaque to the step.
#[derive(Clone, Copy, Debug)]
pub struct Handle2<'h>(Handle<'h>);

pub type HandleNode<'h> = BiNode<Handle1<'h>, Handle2<'h>>;

/// One value carrying both steps of a mutual Mendler iteration.
pub trait BiMendlerAlgebra<C1, C2> {
    fn step1<'h>(&self, rec1: &dyn Fn(Handle1<'h>) -> C1, rec2: &dyn Fn(Handle2<'h>) -> C2, node: HandleNode<'h>)
        -> C1;

    fn step2<'h>(&self, rec1: &dyn Fn(Handle1<'h>) -> C1, rec2: &dyn Fn(Handle2<'h>) -> C2, node: HandleNode<'h>)
        -> C2;
}

/// Runs the step for `c` on `node`, answering recursive calls with the
/// given procedures on the real children.
pub fn bistep_with<A1, A2, C1, C2, M>(
    m: &M,
    rec1: &dyn Fn(&A1) -> C1,
    rec2: &dyn Fn(&A2) -> C2,
    c: Component,
    node: &BiNode<A1, A2>,
) -> BiRec<C1, C2>
where
    M: BiMendlerAlgebra<C1, C2> + ?Sized,
{
    let nonce = fresh_nonce();
    let mut slot = 0usize;
    let mut next = || {
        slot += 1;
        Handle::new(slot - 1, nonce)
    };
    let handles = BiNode {
        ctor: node.ctor.clone(),
        rec: node
            .rec
            .iter()
            .map(|r| match r {
                BiRec::First(_) => BiRec::First(Handle1(next())),
                BiRec::Second(_) => BiRec::Second(Handle2(next())),
            })
            .collect(),
        payload: node.payload.clone(),
    };
    let r1 = |h: Handle1<'_>| match &node.rec[h.0.check(nonce)] {
        BiRec::First(a) => rec1(a),
        BiRec::Second(_) => unreachable!("first-sort handle names a second-sort slot"),
    };
    let r2 = |h: Handle2<'_>| match &node.rec[h.0.check(nonce)] {
        BiRec::Second(a) => rec2(a),
        BiRec::First(_) => unreachable!("second-sort handle names a first-sort slot"),
    };
    match c {
        Component::First => BiRec::First(m.step1(&r1, &r2, handles)),
        Component::Second => BiRec::Second(m.step2(&r1, &r2, handles)),
    }
}

fn bifold<C1, C2, M>(m: &M, t: &BiTerm) -> BiRec<C1, C2>
where
    M: BiMendlerAlgebra<C1, C2> + ?Sized,
{
    let r1 = |a: &BiTerm| match bifold(m, a) {
        BiRec::First(c) => c,
        BiRec::Second(_) => unreachable!(),
    };
    let r2 = |a: &BiTerm| match bifold(m, a) {
        BiRec::Second(c) => c,
        BiRec::First(_) => unreachable!(),
    };
    bistep_with(m, &r1, &r2, t.component(), t.out_())
}

pub fn bifold_1<C1, C2, M>(m: &M, t: &BiTerm) -> Result<C1, WrongComponent>
where
    M: BiMendlerAlgebra<C1, C2> + ?Sized,
{
    if t.component() != Component::First {
        return Err(WrongComponent { expected: Component::First, found: t.component() });
    }
    match bifold(m, t) {
        BiRec::First(c) => Ok(c),
        BiRec::Second(_) => unreachable!(),
    }
}

pub fn bifold_2<C1, C2, M>(m: &M, t: &BiTerm) -> Result<C2, WrongComponent>
where
    M: BiMendlerAlgebra<C1, C2> + ?Sized,
{
    if t.component() != Component::Second {
        return Err(WrongComponent { expected: Component::Second, found: t.component() });
    }
    match bifold(m, t) {
        BiRec::Second(c) => Ok(c),
        BiRec::First(_) => unreachable!(),
    }
}
