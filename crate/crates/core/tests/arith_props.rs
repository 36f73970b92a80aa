use mendler::arith::{
    self, add, build_eval_derivation, build_istrm, build_typof_derivation, eval, lit, lit_value, preservation,
    preservation_via_istrm, EvalRule, EvalSig, IsTrmSig, Ty, TypOfSig, Val,
};
use mendler::indexed::{din, dout, ifold, validate, DNode, IndexedMendlerAlgebra, IndexedSignature};
use mendler::kernel::{Handle, Term};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = Term> {
    (-50i64..50).prop_map(lit).prop_recursive(5, 32, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| add(a, b)))
}

fn sum(t: &Term) -> i64 {
    match lit_value(t) {
        Some(x) => x,
        None => t.out_().rec().iter().map(sum).sum(),
    }
}

/// Counts `ev2` nodes through `rec` only.
struct Adds;

impl IndexedMendlerAlgebra<EvalSig, usize> for Adds {
    fn step<'h>(
        &self,
        rec: &dyn Fn(&(Term, Val), Handle<'h>) -> usize,
        _w: &(Term, Val),
        node: DNode<EvalRule, (Term, Val), Handle<'h>>,
    ) -> usize {
        let below: usize = node.premises.iter().map(|(k, h)| rec(k, *h)).sum();
        below + usize::from(matches!(node.rule, EvalRule::Ev2 { .. }))
    }
}

fn adds(t: &Term) -> usize {
    if lit_value(t).is_some() {
        0
    } else {
        1 + t.out_().rec().iter().map(adds).sum::<usize>()
    }
}

proptest! {
    #[test]
    fn builders_validate(t in term()) {
        let d = build_eval_derivation(&t);
        prop_assert!(validate(&EvalSig::default(), &d).is_ok());
        prop_assert_eq!(d.conclusion(), &(t.clone(), Val(sum(&t))));
        let td = build_typof_derivation(&t);
        prop_assert!(validate(&TypOfSig, &td).is_ok());
        prop_assert_eq!(td.conclusion(), &(t.clone(), Ty::N));
        let w = build_istrm(&t);
        prop_assert!(validate(&IsTrmSig, &w).is_ok());
        prop_assert_eq!(w.conclusion(), &t);
    }

    #[test]
    fn din_of_dout_is_identity(t in term()) {
        let d = build_eval_derivation(&t);
        prop_assert_eq!(din(&EvalSig::default(), dout(&d).clone()).unwrap(), d);
    }

    #[test]
    fn ifold_follows_the_derivation(t in term()) {
        let d = build_eval_derivation(&t);
        prop_assert_eq!(ifold(&Adds, d.conclusion(), &d).unwrap(), adds(&t));
        let wrong = (t.clone(), Val(sum(&t) + 1));
        prop_assert!(ifold(&Adds, &wrong, &d).is_err());
    }

    #[test]
    fn preservation_routes_coincide(t in term()) {
        let d = build_eval_derivation(&t);
        let td = build_typof_derivation(&t);
        let a = preservation(&d, &td).unwrap();
        let b = preservation_via_istrm(&build_istrm(&t), &td).unwrap();
        prop_assert!(validate(&TypOfSig, &a).is_ok());
        prop_assert_eq!(a.conclusion(), &(lit(eval(&t).0), Ty::N));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ev2_requires_the_sum(x1 in -100i64..100, x2 in -100i64..100, v in -200i64..200) {
        let rule = EvalRule::Ev2 { e1: lit(x1), e2: lit(x2), x1: Val(x1), x2: Val(x2), v: Val(v) };
        prop_assert_eq!(EvalSig::default().instantiate(&rule).is_ok(), v == x1 + x2);
        prop_assert!(EvalSig::without_sum_check().instantiate(&rule).is_ok());
    }

    #[test]
    fn surface_syntax_round_trips(t in term()) {
        prop_assert_eq!(arith::parse(&arith::print(&t)).unwrap(), t);
    }
}

#[test]
fn a_wrong_sum_is_rejected_by_din() {
    let e = |x| build_eval_derivation(&lit(x));
    let node = DNode::new(
        EvalRule::Ev2 { e1: lit(2), e2: lit(3), x1: Val(2), x2: Val(3), v: Val(6) },
        vec![((lit(2), Val(2)), e(2)), ((lit(3), Val(3)), e(3))],
        (add(lit(2), lit(3)), Val(6)),
    );
    assert!(din(&EvalSig::default(), node.clone()).is_err());
    assert!(din(&EvalSig::without_sum_check(), node).is_ok());
}

#[test]
fn preservation_rejects_mismatched_terms() {
    let d = build_eval_derivation(&add(lit(1), lit(1)));
    let td = build_typof_derivation(&lit(2));
    assert!(preservation(&d, &td).is_err());
}
