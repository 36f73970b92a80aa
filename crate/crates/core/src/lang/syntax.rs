use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::LangError;

macro_rules! name_type {
    ($(#[$m:meta])* $t:ident) => {
        $(#[$m])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $t(Arc<str>);

        impl $t {
            pub fn new(s: &str) -> Self {
                $t(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }
    };
}

name_type!(
    /// Term-level identifier: variables and constructor names.
    Ident
);
name_type!(
    /// Type-level identifier.
    TyVar
);

/// A finite map from identifiers, with deterministic key order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Env<A>(Arc<BTreeMap<Ident, A>>);

pub type EnvE = Env<Exp>;
pub type EnvT = Env<Typ>;

impl<A> Default for Env<A> {
    fn default() -> Self {
        Env(Arc::new(BTreeMap::new()))
    }
}

impl<A: Clone> Env<A> {
    pub fn empty() -> Self {
        Env::default()
    }

    pub fn singleton(x: Ident, a: A) -> Self {
        Env(Arc::new(BTreeMap::from([(x, a)])))
    }

    pub fn get(&self, x: &Ident) -> Option<&A> {
        self.0.get(x)
    }

    pub fn contains(&self, x: &Ident) -> bool {
        self.0.contains_key(x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &A)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Ident> {
        self.0.keys()
    }

    pub fn values(&self) -> impl Iterator<Item = &A> {
        self.0.values()
    }

    pub fn insert(&self, x: Ident, a: A) -> Self {
        let mut m = (*self.0).clone();
        m.insert(x, a);
        Env(Arc::new(m))
    }

    /// `self ⊕ other`: entries of `other` win.
    pub fn union_right(&self, other: &Env<A>) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut m = (*self.0).clone();
        m.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        Env(Arc::new(m))
    }

    /// Entries of `self` win.
    pub fn union_left(&self, other: &Env<A>) -> Self {
        other.union_right(self)
    }

    pub fn same_domain<B: Clone>(&self, other: &Env<B>) -> bool {
        self.len() == other.len() && self.keys().zip(other.keys()).all(|(a, b)| a == b)
    }

    pub fn map<B: Clone>(&self, f: impl FnMut(&A) -> B) -> Env<B> {
        let mut f = f;
        Env(Arc::new(self.0.iter().map(|(k, v)| (k.clone(), f(v))).collect()))
    }
}

impl<A: Clone> FromIterator<(Ident, A)> for Env<A> {
    fn from_iter<I: IntoIterator<Item = (Ident, A)>>(iter: I) -> Self {
        Env(Arc::new(iter.into_iter().collect()))
    }
}

impl<A: fmt::Debug> fmt::Debug for Env<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Typ {
    Var(TyVar),
    Arrow(Arc<Typ>, Arc<Typ>),
    Env(EnvT),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pat {
    Var(Ident, Typ),
    Con(Ident, Typ),
    App(Arc<Pat>, Arc<Pat>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exp {
    Var(Ident),
    Con(Ident, Typ),
    Clos(EnvE, Pat, Arc<Exp>),
    App(Arc<Exp>, Arc<Exp>),
    Scope(Arc<Dec>, Arc<Exp>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dec {
    Env(EnvE),
    Match(Pat, Arc<Exp>),
    Join(Arc<Dec>, Arc<Dec>),
}

/// A declaration or an expression: whatever a configuration holds.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phrase {
    Dec(Dec),
    Exp(Exp),
}

impl Typ {
    pub fn var(a: &str) -> Typ {
        Typ::Var(TyVar::new(a))
    }

    pub fn arrow(a: Typ, b: Typ) -> Typ {
        Typ::Arrow(Arc::new(a), Arc::new(b))
    }

    pub fn env(g: EnvT) -> Typ {
        Typ::Env(g)
    }

    pub fn as_arrow(&self) -> Option<(&Typ, &Typ)> {
        match self {
            Typ::Arrow(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_env(&self) -> Option<&EnvT> {
        match self {
            Typ::Env(g) => Some(g),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Typ::Var(_) => 1,
            Typ::Arrow(a, b) => 1 + a.depth().max(b.depth()),
            Typ::Env(g) => 1 + g.values().map(Typ::depth).max().unwrap_or(0),
        }
    }
}

impl Pat {
    pub fn var(x: &str, t: Typ) -> Pat {
        Pat::Var(Ident::new(x), t)
    }

    pub fn con(c: &str, t: Typ) -> Pat {
        Pat::Con(Ident::new(c), t)
    }

    pub fn app(p1: Pat, p2: Pat) -> Pat {
        Pat::App(Arc::new(p1), Arc::new(p2))
    }

    /// The type a pattern is checked at, when it has one: the annotation for
    /// leaves, and the result type of the head for applications.
    pub fn pat_type(&self) -> Option<Typ> {
        match self {
            Pat::Var(_, t) | Pat::Con(_, t) => Some(t.clone()),
            Pat::App(p1, p2) => {
                let head = p1.pat_type()?;
                let (arg, res) = head.as_arrow()?;
                (p2.pat_type()? == *arg).then(|| res.clone())
            }
        }
    }

    /// The typing environment the pattern binds. Rejects non-linear patterns.
    pub fn bindings(&self) -> Result<EnvT, LangError> {
        fn go(p: &Pat, out: &mut BTreeMap<Ident, Typ>) -> Result<(), LangError> {
            match p {
                Pat::Var(x, t) => {
                    if out.insert(x.clone(), t.clone()).is_some() {
                        return Err(LangError::DuplicateBinding(x.clone()));
                    }
                }
                Pat::Con(..) => {}
                Pat::App(p1, p2) => {
                    go(p1, out)?;
                    go(p2, out)?;
                }
            }
            Ok(())
        }
        let mut out = BTreeMap::new();
        go(self, &mut out)?;
        Ok(Env(Arc::new(out)))
    }
}

impl Exp {
    pub fn var(x: &str) -> Exp {
        Exp::Var(Ident::new(x))
    }

    pub fn con(c: &str, t: Typ) -> Exp {
        Exp::Con(Ident::new(c), t)
    }

    pub fn clos(env: EnvE, p: Pat, body: Exp) -> Exp {
        Exp::Clos(env, p, Arc::new(body))
    }

    pub fn app(f: Exp, a: Exp) -> Exp {
        Exp::App(Arc::new(f), Arc::new(a))
    }

    pub fn scope(d: Dec, e: Exp) -> Exp {
        Exp::Scope(Arc::new(d), Arc::new(e))
    }

    /// `h ::= cn(x, t) | apply(h, v)`
    pub fn is_data_value(&self) -> bool {
        match self {
            Exp::Con(..) => true,
            Exp::App(h, v) => h.is_data_value() && v.is_value(),
            _ => false,
        }
    }

    /// `v ::= closure(rho, p, e) | h`
    pub fn is_value(&self) -> bool {
        matches!(self, Exp::Clos(..)) || self.is_data_value()
    }

    /// The type a data value carries in its head constructor's annotation.
    pub fn data_type(&self) -> Option<Typ> {
        match self {
            Exp::Con(_, t) => Some(t.clone()),
            Exp::App(h, _) => h.data_type()?.as_arrow().map(|(_, r)| r.clone()),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Exp::Var(_) | Exp::Con(..) => 1,
            Exp::Clos(env, _, body) => 1 + env.values().map(Exp::size).sum::<usize>() + body.size(),
            Exp::App(a, b) => 1 + a.size() + b.size(),
            Exp::Scope(d, e) => 1 + d.size() + e.size(),
        }
    }
}

impl Dec {
    pub fn env(env: EnvE) -> Dec {
        Dec::Env(env)
    }

    pub fn matching(p: Pat, e: Exp) -> Dec {
        Dec::Match(p, Arc::new(e))
    }

    pub fn join(a: Dec, b: Dec) -> Dec {
        Dec::Join(Arc::new(a), Arc::new(b))
    }

    pub fn as_env(&self) -> Option<&EnvE> {
        match self {
            Dec::Env(r) => Some(r),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Dec::Env(env) => 1 + env.values().map(Exp::size).sum::<usize>(),
            Dec::Match(_, e) => 1 + e.size(),
            Dec::Join(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl Phrase {
    pub fn size(&self) -> usize {
        match self {
            Phrase::Dec(d) => d.size(),
            Phrase::Exp(e) => e.size(),
        }
    }

    /// Terminal forms: values and environment declarations.
    pub fn is_final(&self) -> bool {
        match self {
            Phrase::Dec(d) => d.as_env().is_some(),
            Phrase::Exp(e) => e.is_value(),
        }
    }
}

macro_rules! display_via_sexp {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&super::concrete::ToSexp::to_sexp(self), f)
            }
        }

        impl fmt::Debug for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(self, f)
            }
        }

        /// Serialized as concrete syntax.
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}

display_via_sexp!(Typ, Pat, Exp, Dec, Phrase);

impl<A: Clone> Serialize for Env<A>
where
    A: super::concrete::ToSexp,
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&super::concrete::env_to_sexp(self))
    }
}

impl<A: Clone + super::concrete::ToSexp> fmt::Display for Env<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&super::concrete::env_to_sexp(self), f)
    }
}
