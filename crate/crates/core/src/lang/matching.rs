use std::collections::BTreeMap;

use super::syntax::{EnvE, Exp, Ident, Pat};
use super::LangError;

/// Matches a pattern against a value, producing the value environment it
/// binds, or `None` when the match fails.
///
/// Variables bind unconditionally; constructor patterns need the same name
/// and annotation. An application pattern matches a data application
/// componentwise, and only when the head's type (read from its constructor
/// annotation) equals the type of the head pattern. Without that last check
/// a head variable could bind a constructor of a different argument type and
/// stepping would not preserve types.
pub fn patmatch(p: &Pat, v: &Exp) -> Result<Option<EnvE>, LangError> {
    if !v.is_value() {
        return Err(LangError::NotAValue(v.clone()));
    }
    let mut out = BTreeMap::new();
    Ok(go(p, v, &mut out).then(|| out.into_iter().collect()))
}

fn go(p: &Pat, v: &Exp, out: &mut BTreeMap<Ident, Exp>) -> bool {
    match (p, v) {
        (Pat::Var(x, _), _) => out.insert(x.clone(), v.clone()).is_none(),
        (Pat::Con(c, t), Exp::Con(d, u)) => c == d && t == u,
        (Pat::App(p1, p2), Exp::App(h, v2)) if v.is_data_value() => {
            h.data_type().is_some() && h.data_type() == p1.pat_type() && go(p1, h, out) && go(p2, v2, out)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::syntax::Typ;

    fn a() -> Typ {
        Typ::var("a")
    }

    fn b() -> Typ {
        Typ::var("b")
    }

    #[test]
    fn variable_binds() {
        let v = Exp::con("c", a());
        let m = patmatch(&Pat::var("x", a()), &v).unwrap().unwrap();
        assert_eq!(m, EnvE::singleton(Ident::new("x"), v));
    }

    #[test]
    fn constructor_needs_name_and_annotation() {
        assert_eq!(patmatch(&Pat::con("c", a()), &Exp::con("c", a())).unwrap(), Some(EnvE::empty()));
        assert_eq!(patmatch(&Pat::con("c", a()), &Exp::con("d", a())).unwrap(), None);
        assert_eq!(patmatch(&Pat::con("c", a()), &Exp::con("c", b())).unwrap(), None);
    }

    #[test]
    fn application_componentwise() {
        let k = Exp::con("k", Typ::arrow(a(), b()));
        let v = Exp::app(k.clone(), Exp::con("c", a()));
        let p = Pat::app(Pat::var("f", Typ::arrow(a(), b())), Pat::var("y", a()));
        let m = patmatch(&p, &v).unwrap().unwrap();
        assert_eq!(m.get(&Ident::new("f")), Some(&k));
        assert_eq!(m.get(&Ident::new("y")), Some(&Exp::con("c", a())));
        // head type must agree with the head pattern's type
        let p = Pat::app(Pat::var("f", Typ::arrow(b(), b())), Pat::var("y", b()));
        assert_eq!(patmatch(&p, &v).unwrap(), None);
        // a closure is not a data application
        let clos = Exp::clos(EnvE::empty(), Pat::var("z", a()), Exp::var("z"));
        assert_eq!(patmatch(&Pat::app(Pat::var("f", a()), Pat::var("y", a())), &clos).unwrap(), None);
    }

    #[test]
    fn non_values_are_rejected() {
        assert!(matches!(patmatch(&Pat::var("x", a()), &Exp::var("y")), Err(LangError::NotAValue(_))));
    }
}
