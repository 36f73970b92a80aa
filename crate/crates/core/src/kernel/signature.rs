use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{KernelError, Term};

/// Interned constructor and identifier names.
pub type Name = Arc<str>;

/// The closed registry of payload types a signature may mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadType {
    Int,
    Id,
    TyId,
    /// A term of some other (non-mutual) datatype, e.g. a type annotation.
    Term,
}

/// What a constructor argument position holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    /// One recursive position.
    Rec,
    /// A finite map from identifiers to recursive positions. Consumes one
    /// `Payload::Keys` entry and one recursive position per key.
    Bindings,
    Payload(PayloadType),
}

/// A payload value drawn from the registry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Int(i64),
    Id(Name),
    TyId(Name),
    /// Strictly ascending keys of a `Bindings` slot.
    Keys(Vec<Name>),
    Term(Term),
}

impl Payload {
    pub fn payload_type(&self) -> Option<PayloadType> {
        match self {
            Payload::Int(_) => Some(PayloadType::Int),
            Payload::Id(_) => Some(PayloadType::Id),
            Payload::TyId(_) => Some(PayloadType::TyId),
            Payload::Term(_) => Some(PayloadType::Term),
            Payload::Keys(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Payload::Int(x) => Some(*x),
            _ => None,
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Int(x) => write!(f, "{x}"),
            Payload::Id(x) | Payload::TyId(x) => f.write_str(x),
            Payload::Keys(keys) => write!(f, "[{}]", keys.join(",")),
            Payload::Term(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constructor {
    name: Name,
    slots: Vec<SlotKind>,
}

impl Constructor {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn slots(&self) -> &[SlotKind] {
        &self.slots
    }

    /// Checks slot counts and kinds of a node built with this constructor.
    pub(crate) fn check_shape<A>(&self, node: &Node<A>) -> Result<(), KernelError> {
        check_slots(&self.slots, node.rec().len(), node.payload(), |_, _| true)
            .map_err(|reason| KernelError::Malformed { ctor: node.ctor().into(), reason })
    }
}

/// Walks a slot declaration against flat recursive/payload vectors.
/// `slot_ok` is consulted for every recursive position index.
pub(crate) fn check_slots<K>(
    slots: &[K],
    rec_len: usize,
    payload: &[Payload],
    mut slot_ok: impl FnMut(K, usize) -> bool,
) -> Result<(), String>
where
    K: Copy + Into<SlotShape>,
{
    let mut r = 0usize;
    let mut p = 0usize;
    for &slot in slots {
        match slot.into() {
            SlotShape::Rec => {
                if r >= rec_len {
                    return Err(format!("missing recursive slot {r}"));
                }
                if !slot_ok(slot, r) {
                    return Err(format!("recursive slot {r} has the wrong sort"));
                }
                r += 1;
            }
            SlotShape::Bindings => {
                let Some(Payload::Keys(keys)) = payload.get(p) else {
                    return Err(format!("payload slot {p} should hold binding keys"));
                };
                if keys.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("binding keys must be strictly ascending".into());
                }
                if r + keys.len() > rec_len {
                    return Err(format!("bindings need {} recursive slots", keys.len()));
                }
                for _ in keys {
                    if !slot_ok(slot, r) {
                        return Err(format!("binding slot {r} has the wrong sort"));
                    }
                    r += 1;
                }
                p += 1;
            }
            SlotShape::Payload(ty) => {
                match payload.get(p) {
                    Some(v) if v.payload_type() == Some(ty) => {}
                    Some(v) => return Err(format!("payload slot {p} expected {ty:?}, found {v}")),
                    None => return Err(format!("missing payload slot {p}")),
                }
                p += 1;
            }
        }
    }
    if r != rec_len {
        return Err(format!("{} recursive slots declared, {rec_len} given", r));
    }
    if p != payload.len() {
        return Err(format!("{p} payload slots declared, {} given", payload.len()));
    }
    Ok(())
}

/// Sort-erased view of a slot kind, shared with the bi-signatures.
#[derive(Clone, Copy, Debug)]
pub(crate) enum SlotShape {
    Rec,
    Bindings,
    Payload(PayloadType),
}

impl From<SlotKind> for SlotShape {
    fn from(k: SlotKind) -> Self {
        match k {
            SlotKind::Rec => SlotShape::Rec,
            SlotKind::Bindings => SlotShape::Bindings,
            SlotKind::Payload(t) => SlotShape::Payload(t),
        }
    }
}

/// A one-layer grammar: named constructors with declared slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    name: Name,
    constructors: Vec<Constructor>,
}

impl Signature {
    pub fn new<'a>(
        name: &str,
        constructors: impl IntoIterator<Item = (&'a str, Vec<SlotKind>)>,
    ) -> Result<Self, KernelError> {
        let mut out: Vec<Constructor> = Vec::new();
        for (ctor, slots) in constructors {
            if out.iter().any(|c| &*c.name == ctor) {
                return Err(KernelError::DuplicateConstructor(ctor.into()));
            }
            out.push(Constructor { name: ctor.into(), slots });
        }
        Ok(Signature { name: name.into(), constructors: out })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constructors(&self) -> &[Constructor] {
        &self.constructors
    }

    pub fn constructor(&self, name: &str) -> Option<&Constructor> {
        self.constructors.iter().find(|c| &*c.name == name)
    }

    pub fn contains(&self, ctor: &str) -> bool {
        self.constructor(ctor).is_some()
    }

    /// Checks that `node` is built from one of this signature's constructors
    /// with exactly the declared slots.
    pub fn check_node<A>(&self, node: &Node<A>) -> Result<(), KernelError> {
        self.constructor(node.ctor())
            .ok_or_else(|| KernelError::UnknownConstructor {
                signature: self.name.to_string(),
                ctor: node.ctor().into(),
            })?
            .check_shape(node)
    }

    /// Smart constructor: builds a checked node, sharing the interned name.
    pub fn node<A>(&self, ctor: &str, rec: Vec<A>, payload: Vec<Payload>) -> Result<Node<A>, KernelError> {
        let c = self
            .constructor(ctor)
            .ok_or_else(|| KernelError::UnknownConstructor { signature: self.name.to_string(), ctor: ctor.into() })?;
        let node = Node::new(c.name.clone(), rec, payload);
        c.check_shape(&node)?;
        Ok(node)
    }

    pub(crate) fn interned(&self, ctor: &str) -> Option<Name> {
        self.constructor(ctor).map(|c| c.name.clone())
    }
}

thread_local! {
    // Most nodes carry no payload; share one allocation between them.
    static NO_PAYLOAD: Arc<[Payload]> = Arc::from(Vec::new());
}

/// One layer of a datatype: a constructor applied to recursive positions of
/// type `A` and payload values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node<A> {
    ctor: Name,
    rec: Vec<A>,
    payload: Arc<[Payload]>,
}

impl<A> Node<A> {
    /// Unchecked; nodes are checked against a signature when rolled into a term.
    pub fn new(ctor: impl Into<Name>, rec: Vec<A>, payload: Vec<Payload>) -> Self {
        let payload = if payload.is_empty() { NO_PAYLOAD.with(Arc::clone) } else { payload.into() };
        Node { ctor: ctor.into(), rec, payload }
    }

    pub fn ctor(&self) -> &str {
        &self.ctor
    }

    pub fn ctor_name(&self) -> &Name {
        &self.ctor
    }

    pub fn rec(&self) -> &[A] {
        &self.rec
    }

    pub fn payload(&self) -> &[Payload] {
        &self.payload
    }

    pub fn into_rec(self) -> Vec<A> {
        self.rec
    }

    /// Structure-preserving map over the recursive slots.
    pub fn map<B>(self, f: impl FnMut(A) -> B) -> Node<B> {
        Node { ctor: self.ctor, rec: self.rec.into_iter().map(f).collect(), payload: self.payload }
    }

    pub fn map_ref<B>(&self, f: impl FnMut(&A) -> B) -> Node<B> {
        Node { ctor: self.ctor.clone(), rec: self.rec.iter().map(f).collect(), payload: self.payload.clone() }
    }

    /// Replaces the recursive slots wholesale, keeping constructor and payload.
    pub fn with_rec<B>(&self, rec: Vec<B>) -> Node<B> {
        Node { ctor: self.ctor.clone(), rec, payload: self.payload.clone() }
    }
}

/// The functor map of a signature: each recursive slot `x` becomes `f(x)`.
pub fn fmap<A, B>(f: impl FnMut(A) -> B, node: Node<A>) -> Node<B> {
    node.map(f)
}
