//! The language's syntax as generic kernel data: declarations and
//! expressions as the two sorts of one bi-signature, types and patterns as
//! ordinary terms carried in payload slots.

use std::sync::LazyLock;

use super::syntax::{Dec, Env, Exp, Ident, Pat, Phrase, TyVar, Typ};
use super::LangError;
use crate::kernel::{Name, Node, Payload, PayloadType, Signature, SlotKind, Term};
use crate::mutual::{BiNode, BiRec, BiSignature, BiSlotKind, BiTerm, Component};

static TYP: LazyLock<Signature> = LazyLock::new(|| {
    Signature::new(
        "typ",
        [
            ("ty", vec![SlotKind::Payload(PayloadType::TyId)]),
            ("arrow", vec![SlotKind::Rec, SlotKind::Rec]),
            ("tenv", vec![SlotKind::Bindings]),
        ],
    )
    .unwrap()
});

static PAT: LazyLock<Signature> = LazyLock::new(|| {
    let ann = || vec![SlotKind::Payload(PayloadType::Id), SlotKind::Payload(PayloadType::Term)];
    Signature::new("pat", [("pvar", ann()), ("pcon", ann()), ("papp", vec![SlotKind::Rec, SlotKind::Rec])]).unwrap()
});

static LANG: LazyLock<BiSignature> = LazyLock::new(|| {
    use BiSlotKind::*;
    use Component::{First as D, Second as E};
    let term = Payload(PayloadType::Term);
    BiSignature::new(
        "lang",
        [("env", vec![Bindings(E)]), ("match", vec![term, Rec(E)]), ("join", vec![Rec(D), Rec(D)])],
        [
            ("var", vec![Payload(PayloadType::Id)]),
            ("con", vec![Payload(PayloadType::Id), term]),
            ("clos", vec![Bindings(E), term, Rec(E)]),
            ("app", vec![Rec(E), Rec(E)]),
            ("scope", vec![Rec(D), Rec(E)]),
        ],
    )
    .unwrap()
});

/// Types: `ty(a) | arrow(T, T) | tenv(x ↦ T, ...)`.
pub fn typ_signature() -> &'static Signature {
    &TYP
}

/// Patterns, with type annotations as `typ` terms in payloads.
pub fn pat_signature() -> &'static Signature {
    &PAT
}

/// Declarations (first sort) and expressions (second sort).
pub fn lang_signature() -> &'static BiSignature {
    &LANG
}

fn name(x: &Ident) -> Name {
    Name::from(x.as_str())
}

fn keys<A: Clone>(env: &Env<A>) -> Payload {
    Payload::Keys(env.keys().map(name).collect())
}

fn malformed(what: &str, t: impl std::fmt::Display) -> LangError {
    LangError::IllTyped(format!("not an encoded {what}: {t}"))
}

pub fn typ_to_term(t: &Typ) -> Term {
    let node = match t {
        Typ::Var(a) => Node::new("ty", vec![], vec![Payload::TyId(a.as_str().into())]),
        Typ::Arrow(a, b) => Node::new("arrow", vec![typ_to_term(a), typ_to_term(b)], vec![]),
        Typ::Env(g) => Node::new("tenv", g.values().map(typ_to_term).collect(), vec![keys(g)]),
    };
    TYP.in_(node).expect("encoding follows the signature")
}

pub fn typ_from_term(t: &Term) -> Result<Typ, LangError> {
    let node = t.out_();
    match (node.ctor(), node.rec(), node.payload()) {
        ("ty", [], [Payload::TyId(a)]) => Ok(Typ::Var(TyVar::new(a))),
        ("arrow", [a, b], []) => Ok(Typ::arrow(typ_from_term(a)?, typ_from_term(b)?)),
        ("tenv", vals, [Payload::Keys(ks)]) if ks.len() == vals.len() => {
            let mut out = Vec::with_capacity(ks.len());
            for (k, v) in ks.iter().zip(vals) {
                out.push((Ident::new(k), typ_from_term(v)?));
            }
            Ok(Typ::Env(out.into_iter().collect()))
        }
        _ => Err(malformed("type", t)),
    }
}

pub fn pat_to_term(p: &Pat) -> Term {
    let node = match p {
        Pat::Var(x, t) => Node::new("pvar", vec![], vec![Payload::Id(name(x)), Payload::Term(typ_to_term(t))]),
        Pat::Con(c, t) => Node::new("pcon", vec![], vec![Payload::Id(name(c)), Payload::Term(typ_to_term(t))]),
        Pat::App(p1, p2) => Node::new("papp", vec![pat_to_term(p1), pat_to_term(p2)], vec![]),
    };
    PAT.in_(node).expect("encoding follows the signature")
}

pub fn pat_from_term(t: &Term) -> Result<Pat, LangError> {
    let node = t.out_();
    match (node.ctor(), node.rec(), node.payload()) {
        ("pvar", [], [Payload::Id(x), Payload::Term(ty)]) => Ok(Pat::Var(Ident::new(x), typ_from_term(ty)?)),
        ("pcon", [], [Payload::Id(c), Payload::Term(ty)]) => Ok(Pat::Con(Ident::new(c), typ_from_term(ty)?)),
        ("papp", [a, b], []) => Ok(Pat::app(pat_from_term(a)?, pat_from_term(b)?)),
        _ => Err(malformed("pattern", t)),
    }
}

fn env_to_rec(env: &Env<Exp>) -> Vec<BiRec<BiTerm, BiTerm>> {
    env.values().map(|v| BiRec::Second(exp_to_biterm(v))).collect()
}

pub fn dec_to_biterm(d: &Dec) -> BiTerm {
    let node = match d {
        Dec::Env(env) => BiNode::new("env", env_to_rec(env), vec![keys(env)]),
        Dec::Match(p, e) => {
            BiNode::new("match", vec![BiRec::Second(exp_to_biterm(e))], vec![Payload::Term(pat_to_term(p))])
        }
        Dec::Join(a, b) => {
            BiNode::new("join", vec![BiRec::First(dec_to_biterm(a)), BiRec::First(dec_to_biterm(b))], vec![])
        }
    };
    LANG.in_1(node).expect("encoding follows the signature")
}

pub fn exp_to_biterm(e: &Exp) -> BiTerm {
    let node = match e {
        Exp::Var(x) => BiNode::new("var", vec![], vec![Payload::Id(name(x))]),
        Exp::Con(c, t) => BiNode::new("con", vec![], vec![Payload::Id(name(c)), Payload::Term(typ_to_term(t))]),
        Exp::Clos(env, p, body) => {
            let mut rec = env_to_rec(env);
            rec.push(BiRec::Second(exp_to_biterm(body)));
            BiNode::new("clos", rec, vec![keys(env), Payload::Term(pat_to_term(p))])
        }
        Exp::App(a, b) => {
            BiNode::new("app", vec![BiRec::Second(exp_to_biterm(a)), BiRec::Second(exp_to_biterm(b))], vec![])
        }
        Exp::Scope(d, b) => {
            BiNode::new("scope", vec![BiRec::First(dec_to_biterm(d)), BiRec::Second(exp_to_biterm(b))], vec![])
        }
    };
    LANG.in_2(node).expect("encoding follows the signature")
}

pub fn phrase_to_biterm(p: &Phrase) -> BiTerm {
    match p {
        Phrase::Dec(d) => dec_to_biterm(d),
        Phrase::Exp(e) => exp_to_biterm(e),
    }
}

fn child(r: &BiRec<BiTerm, BiTerm>) -> &BiTerm {
    r.as_ref().into_inner()
}

fn env_from(ks: &[Name], vals: &[BiRec<BiTerm, BiTerm>]) -> Result<Env<Exp>, LangError> {
    let mut out = Vec::with_capacity(ks.len());
    for (k, v) in ks.iter().zip(vals) {
        out.push((Ident::new(k), exp_from_biterm(child(v))?));
    }
    Ok(out.into_iter().collect())
}

pub fn dec_from_biterm(t: &BiTerm) -> Result<Dec, LangError> {
    let node = t.out_();
    if t.component() != Component::First {
        return Err(malformed("declaration", t));
    }
    match (node.ctor(), node.rec(), node.payload()) {
        ("env", vals, [Payload::Keys(ks)]) if ks.len() == vals.len() => Ok(Dec::Env(env_from(ks, vals)?)),
        ("match", [e], [Payload::Term(p)]) => Ok(Dec::matching(pat_from_term(p)?, exp_from_biterm(child(e))?)),
        ("join", [a, b], []) => Ok(Dec::join(dec_from_biterm(child(a))?, dec_from_biterm(child(b))?)),
        _ => Err(malformed("declaration", t)),
    }
}

pub fn exp_from_biterm(t: &BiTerm) -> Result<Exp, LangError> {
    let node = t.out_();
    if t.component() != Component::Second {
        return Err(malformed("expression", t));
    }
    match (node.ctor(), node.rec(), node.payload()) {
        ("var", [], [Payload::Id(x)]) => Ok(Exp::Var(Ident::new(x))),
        ("con", [], [Payload::Id(c), Payload::Term(ty)]) => Ok(Exp::Con(Ident::new(c), typ_from_term(ty)?)),
        ("clos", [vals @ .., body], [Payload::Keys(ks), Payload::Term(p)]) if ks.len() == vals.len() => {
            Ok(Exp::clos(env_from(ks, vals)?, pat_from_term(p)?, exp_from_biterm(child(body))?))
        }
        ("app", [a, b], []) => Ok(Exp::app(exp_from_biterm(child(a))?, exp_from_biterm(child(b))?)),
        ("scope", [d, b], []) => Ok(Exp::scope(dec_from_biterm(child(d))?, exp_from_biterm(child(b))?)),
        _ => Err(malformed("expression", t)),
    }
}

pub fn phrase_from_biterm(t: &BiTerm) -> Result<Phrase, LangError> {
    match t.component() {
        Component::First => dec_from_biterm(t).map(Phrase::Dec),
        Component::Second => exp_from_biterm(t).map(Phrase::Exp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::concrete::parse_phrase;

    #[test]
    fn encoding_round_trips() {
        for src in [
            "(var x)",
            "(clos ((y (con c (ty a))) (z (var q))) (papp (pvar f (arrow (ty a) (ty b))) (pcon k (ty a))) (var y))",
            "(scope (join (env ()) (match (pvar x (tenv ((u (ty a))))) (var y))) (app (var x) (var x)))",
        ] {
            let p = parse_phrase(src).unwrap();
            let t = phrase_to_biterm(&p);
            assert_eq!(phrase_from_biterm(&t).unwrap(), p);
            let back = lang_signature().term_from_json(&t.to_json()).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn decoding_rejects_foreign_terms() {
        let t = typ_to_term(&Typ::var("a"));
        assert!(pat_from_term(&t).is_err());
    }
}
