//! S-expression surface syntax.
//!
//! ```text
//! T ::= (ty a) | (arrow T T) | (tenv ((x T) ...))
//! P ::= (pvar x T) | (pcon c T) | (papp P P)
//! E ::= (var x) | (con c T) | (clos ((x E) ...) P E) | (app E E) | (scope D E)
//! D ::= (env ((x E) ...)) | (match P E) | (join D D)
//! ```

use crate::sexp::{self, ParseError, Sexp};

use super::syntax::{Dec, Env, EnvE, EnvT, Exp, Ident, Pat, Phrase, Typ};

pub trait ToSexp {
    fn to_sexp(&self) -> Sexp;
}

fn form(head: &str, args: impl IntoIterator<Item = Sexp>) -> Sexp {
    Sexp::list(std::iter::once(Sexp::atom(head)).chain(args))
}

pub fn env_to_sexp<A: Clone + ToSexp>(env: &Env<A>) -> Sexp {
    Sexp::list(env.iter().map(|(x, a)| Sexp::list([Sexp::atom(x.as_str()), a.to_sexp()])))
}

impl ToSexp for Typ {
    fn to_sexp(&self) -> Sexp {
        match self {
            Typ::Var(a) => form("ty", [Sexp::atom(a.as_str())]),
            Typ::Arrow(a, b) => form("arrow", [a.to_sexp(), b.to_sexp()]),
            Typ::Env(g) => form("tenv", [env_to_sexp(g)]),
        }
    }
}

impl ToSexp for Pat {
    fn to_sexp(&self) -> Sexp {
        match self {
            Pat::Var(x, t) => form("pvar", [Sexp::atom(x.as_str()), t.to_sexp()]),
            Pat::Con(c, t) => form("pcon", [Sexp::atom(c.as_str()), t.to_sexp()]),
            Pat::App(p1, p2) => form("papp", [p1.to_sexp(), p2.to_sexp()]),
        }
    }
}

impl ToSexp for Exp {
    fn to_sexp(&self) -> Sexp {
        match self {
            Exp::Var(x) => form("var", [Sexp::atom(x.as_str())]),
            Exp::Con(c, t) => form("con", [Sexp::atom(c.as_str()), t.to_sexp()]),
            Exp::Clos(env, p, body) => form("clos", [env_to_sexp(env), p.to_sexp(), body.to_sexp()]),
            Exp::App(a, b) => form("app", [a.to_sexp(), b.to_sexp()]),
            Exp::Scope(d, e) => form("scope", [d.to_sexp(), e.to_sexp()]),
        }
    }
}

impl ToSexp for Dec {
    fn to_sexp(&self) -> Sexp {
        match self {
            Dec::Env(env) => form("env", [env_to_sexp(env)]),
            Dec::Match(p, e) => form("match", [p.to_sexp(), e.to_sexp()]),
            Dec::Join(a, b) => form("join", [a.to_sexp(), b.to_sexp()]),
        }
    }
}

impl ToSexp for Phrase {
    fn to_sexp(&self) -> Sexp {
        match self {
            Phrase::Dec(d) => d.to_sexp(),
            Phrase::Exp(e) => e.to_sexp(),
        }
    }
}

fn err(what: &str, s: &Sexp) -> ParseError {
    ParseError::new(0, format!("expected {what}, found {s}"))
}

fn ident(s: &Sexp) -> Result<Ident, ParseError> {
    match s.as_atom() {
        Some(a) if !a.is_empty() => Ok(Ident::new(a)),
        _ => Err(err("an identifier", s)),
    }
}

fn env_from<A: Clone>(s: &Sexp, item: impl Fn(&Sexp) -> Result<A, ParseError>) -> Result<Env<A>, ParseError> {
    let entries = s.as_list().ok_or_else(|| err("a binding list", s))?;
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        match e.as_list() {
            Some([x, a]) => {
                let x = ident(x)?;
                if out.iter().any(|(y, _)| *y == x) {
                    return Err(ParseError::new(0, format!("duplicate binding for `{x}`")));
                }
                out.push((x, item(a)?));
            }
            _ => return Err(err("a binding (x value)", e)),
        }
    }
    Ok(out.into_iter().collect())
}

pub fn typ_from_sexp(s: &Sexp) -> Result<Typ, ParseError> {
    match s.as_form() {
        Some(("ty", [a])) => Ok(Typ::Var(super::syntax::TyVar::new(ident(a)?.as_str()))),
        Some(("arrow", [a, b])) => Ok(Typ::arrow(typ_from_sexp(a)?, typ_from_sexp(b)?)),
        Some(("tenv", [g])) => Ok(Typ::Env(env_from(g, typ_from_sexp)?)),
        _ => Err(err("a type", s)),
    }
}

pub fn pat_from_sexp(s: &Sexp) -> Result<Pat, ParseError> {
    match s.as_form() {
        Some(("pvar", [x, t])) => Ok(Pat::Var(ident(x)?, typ_from_sexp(t)?)),
        Some(("pcon", [c, t])) => Ok(Pat::Con(ident(c)?, typ_from_sexp(t)?)),
        Some(("papp", [p1, p2])) => Ok(Pat::app(pat_from_sexp(p1)?, pat_from_sexp(p2)?)),
        _ => Err(err("a pattern", s)),
    }
}

pub fn exp_from_sexp(s: &Sexp) -> Result<Exp, ParseError> {
    match s.as_form() {
        Some(("var", [x])) => Ok(Exp::Var(ident(x)?)),
        Some(("con", [c, t])) => Ok(Exp::Con(ident(c)?, typ_from_sexp(t)?)),
        Some(("clos", [env, p, body])) => {
            Ok(Exp::clos(env_from(env, exp_from_sexp)?, pat_from_sexp(p)?, exp_from_sexp(body)?))
        }
        Some(("app", [a, b])) => Ok(Exp::app(exp_from_sexp(a)?, exp_from_sexp(b)?)),
        Some(("scope", [d, e])) => Ok(Exp::scope(dec_from_sexp(d)?, exp_from_sexp(e)?)),
        _ => Err(err("an expression", s)),
    }
}

pub fn dec_from_sexp(s: &Sexp) -> Result<Dec, ParseError> {
    match s.as_form() {
        Some(("env", [env])) => Ok(Dec::Env(env_from(env, exp_from_sexp)?)),
        Some(("match", [p, e])) => Ok(Dec::matching(pat_from_sexp(p)?, exp_from_sexp(e)?)),
        Some(("join", [a, b])) => Ok(Dec::join(dec_from_sexp(a)?, dec_from_sexp(b)?)),
        _ => Err(err("a declaration", s)),
    }
}

/// Declarations and expressions have disjoint head keywords, so a phrase is
/// whichever parses.
pub fn phrase_from_sexp(s: &Sexp) -> Result<Phrase, ParseError> {
    match s.as_form() {
        Some(("env" | "match" | "join", _)) => Ok(Phrase::Dec(dec_from_sexp(s)?)),
        _ => exp_from_sexp(s).map(Phrase::Exp).map_err(|_| err("an expression or declaration", s)),
    }
}

pub fn parse_typ(src: &str) -> Result<Typ, ParseError> {
    typ_from_sexp(&sexp::parse(src)?)
}

pub fn parse_pat(src: &str) -> Result<Pat, ParseError> {
    pat_from_sexp(&sexp::parse(src)?)
}

pub fn parse_exp(src: &str) -> Result<Exp, ParseError> {
    exp_from_sexp(&sexp::parse(src)?)
}

pub fn parse_dec(src: &str) -> Result<Dec, ParseError> {
    dec_from_sexp(&sexp::parse(src)?)
}

pub fn parse_phrase(src: &str) -> Result<Phrase, ParseError> {
    phrase_from_sexp(&sexp::parse(src)?)
}

/// A value environment written as a binding list `((x E) ...)`.
pub fn parse_env_e(src: &str) -> Result<EnvE, ParseError> {
    env_from(&sexp::parse(src)?, exp_from_sexp)
}

/// A typing environment written as a binding list `((x T) ...)`.
pub fn parse_env_t(src: &str) -> Result<EnvT, ParseError> {
    env_from(&sexp::parse(src)?, typ_from_sexp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for src in ["(ty a)", "(arrow (ty a) (tenv ((x (ty b)) (y (arrow (ty a) (ty a))))))", "(tenv ())"] {
            assert_eq!(parse_typ(src).unwrap().to_string(), src);
        }
        for src in [
            "(var x)",
            "(con c (ty a))",
            "(clos ((y (con c (ty a)))) (papp (pvar f (arrow (ty a) (ty b))) (pcon k (ty a))) (var y))",
            "(scope (join (env ()) (match (pvar x (ty a)) (var y))) (app (var x) (var x)))",
        ] {
            assert_eq!(parse_phrase(src).unwrap().to_string(), src);
        }
    }

    #[test]
    fn whitespace_insensitive() {
        let e = parse_exp(" ( app\n (var f)   (con c\t(ty a)) ) ").unwrap();
        assert_eq!(e.to_string(), "(app (var f) (con c (ty a)))");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_exp("(var)").is_err());
        assert!(parse_exp("(env ())").is_err());
        assert!(parse_dec("(env ((x (var y)) (x (var z))))").is_err());
        assert!(parse_phrase("(lit 3)").is_err());
        assert!(parse_env_t("((x (ty a)) y)").is_err());
    }
}
