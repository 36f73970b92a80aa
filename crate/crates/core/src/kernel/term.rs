use std::fmt;
use std::sync::Arc;

use serde::de::Deserializer;
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use super::{KernelError, Name, Node, Payload, Signature};

/// The recursive closure of a signature: an immutable, finite tree.
///
/// Terms are only created by [`Signature::in_`] (or by decoding JSON against
/// a signature), so every node carries exactly its constructor's slots.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(Arc<Node<Term>>);

impl Signature {
    /// Rolls one checked layer into a term.
    pub fn in_(&self, node: Node<Term>) -> Result<Term, KernelError> {
        self.check_node(&node)?;
        Ok(Term(Arc::new(node)))
    }

    /// `in_ . fmap m`: roll a layer whose slots are first sent to terms.
    pub fn pre_in<C>(&self, m: impl FnMut(C) -> Term, node: Node<C>) -> Result<Term, KernelError> {
        self.in_(node.map(m))
    }

    /// Decodes the canonical JSON form, checking every node against `self`.
    pub fn term_from_json(&self, value: &serde_json::Value) -> Result<Term, KernelError> {
        let raw: RawTerm = serde_json::from_value(value.clone()).map_err(|e| KernelError::Json(e.to_string()))?;
        raw.check(self)
    }
}

impl Term {
    /// Unrolls one layer; inverse of [`Signature::in_`].
    pub fn out_(&self) -> &Node<Term> {
        &self.0
    }

    /// Rolls a node that is already known to be well formed.
    pub(crate) fn in_unchecked(node: Node<Term>) -> Term {
        Term(Arc::new(node))
    }

    pub fn ctor(&self) -> &str {
        self.0.ctor()
    }

    pub fn size(&self) -> usize {
        1 + self.0.rec().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.0.rec().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("terms always serialize")
    }
}

impl fmt::Display for Term {
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
            write!(f, " {r}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let node = self.out_();
        let mut st = serializer.serialize_struct("Term", 3)?;
        st.serialize_field("ctor", node.ctor())?;
        st.serialize_field("rec", node.rec())?;
        st.serialize_field("payload", node.payload())?;
        st.end()
    }
}

/// Decoding without a signature only checks the JSON shape; nested `term`
/// payloads are accepted as-is.
impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawTerm::deserialize(deserializer)?;
        Ok(raw.unchecked())
    }
}

#[derive(Deserialize)]
struct RawTerm {
    ctor: Name,
    #[serde(default)]
    rec: Vec<RawTerm>,
    #[serde(default)]
    payload: Vec<Payload>,
}

impl RawTerm {
    fn check(self, sig: &Signature) -> Result<Term, KernelError> {
        let rec = self.rec.into_iter().map(|r| r.check(sig)).collect::<Result<Vec<_>, _>>()?;
        let ctor = sig.interned(&self.ctor).unwrap_or(self.ctor);
        sig.in_(Node::new(ctor, rec, self.payload))
    }

    fn unchecked(self) -> Term {
        let rec = self.rec.into_iter().map(RawTerm::unchecked).collect();
        Term::in_unchecked(Node::new(self.ctor, rec, self.payload))
    }
}
