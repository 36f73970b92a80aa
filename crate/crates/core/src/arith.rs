//! Integer literals and addition, built as the sum of two one-constructor
//! signatures, with evaluation, its relational counterpart, a trivial type
//! system, and type preservation as an indexed Mendler fold.

use std::fmt;
use std::sync::LazyLock;

use serde::Serialize;

use crate::indexed::{
    din, ifold, validate, DNode, Derivation, IndexMismatch, IndexedMendlerAlgebra, IndexedSignature, Instance,
    InvalidDerivation, RuleName,
};
use crate::kernel::{fold_c, Coproduct, Handle, Name, Node, Payload, PayloadType, Signature, SlotKind, Term};
use crate::sexp::{self, ParseError, Sexp};

static TRM: LazyLock<Coproduct> = LazyLock::new(|| {
    let g1 = Signature::new("trm_g1", [("lit", vec![SlotKind::Payload(PayloadType::Int)])]).unwrap();
    let g2 = Signature::new("trm_g2", [("add", vec![SlotKind::Rec, SlotKind::Rec])]).unwrap();
    Coproduct::new("trm", g1, g2).unwrap()
});

/// `trm_g1 + trm_g2`.
pub fn trm() -> &'static Coproduct {
    &TRM
}

pub fn signature() -> &'static Signature {
    TRM.signature()
}

static NAMES: LazyLock<(Name, Name)> =
    LazyLock::new(|| (signature().interned("lit").unwrap(), signature().interned("add").unwrap()));

// Both shapes are fixed, so these skip the per-node signature check.
pub fn lit(x: i64) -> Term {
    Term::in_unchecked(Node::new(NAMES.0.clone(), vec![], vec![Payload::Int(x)]))
}

pub fn add(a: Term, b: Term) -> Term {
    Term::in_unchecked(Node::new(NAMES.1.clone(), vec![a, b], vec![]))
}

/// The literal payload of a `lit` term.
pub fn lit_value(t: &Term) -> Option<i64> {
    match t.ctor() {
        "lit" => t.out_().payload()[0].as_int(),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Val(pub i64);

impl Val {
    pub fn vv(self) -> i64 {
        self.0
    }

    /// `lit . vv`
    pub fn to_lit(self) -> Term {
        lit(self.0)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(val {})", self.0)
    }
}

/// Addition on values. Wraps on overflow so that evaluation stays total; the
/// `ev2` side condition uses the same operation.
pub fn plus(a: Val, b: Val) -> Val {
    Val(a.0.wrapping_add(b.0))
}

pub fn eval_g1(n: Node<Val>) -> Val {
    Val(n.payload()[0].as_int().expect("lit carries an integer"))
}

pub fn eval_g2(n: Node<Val>) -> Val {
    plus(n.rec()[0], n.rec()[1])
}

/// `fold (eval_g1 + eval_g2)`.
pub fn eval(t: &Term) -> Val {
    fold_c(&trm().algebra(eval_g1, eval_g2), t)
}

/// The composed conventional algebra, for callers that want to lift it.
pub fn eval_algebra(n: Node<Val>) -> Val {
    match trm().project(n) {
        Some(crate::kernel::Summand::Left(n)) => eval_g1(n),
        Some(crate::kernel::Summand::Right(n)) => eval_g2(n),
        None => unreachable!("not an arithmetic node"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Ty {
    N,
}

// ---------------------------------------------------------------------------
// Relations

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum EvalRule {
    Ev1 { x: i64 },
    Ev2 { e1: Term, e2: Term, x1: Val, x2: Val, v: Val },
}

/// `Eval : Trm * Val -> P`.
#[derive(Clone, Debug)]
pub struct EvalSig {
    check_sum: bool,
}

impl Default for EvalSig {
    fn default() -> Self {
        EvalSig { check_sum: true }
    }
}

impl EvalSig {
    /// A defective variant whose `ev2` accepts any conclusion value.
    pub fn without_sum_check() -> Self {
        EvalSig { check_sum: false }
    }
}

impl RuleName for EvalRule {
    fn rule_name(&self) -> &'static str {
        match self {
            EvalRule::Ev1 { .. } => "ev1",
            EvalRule::Ev2 { .. } => "ev2",
        }
    }
}

impl IndexedSignature for EvalSig {
    type Index = (Term, Val);
    type Rule = EvalRule;

    fn name(&self) -> &str {
        "Eval"
    }

    fn instantiate(&self, rule: &EvalRule) -> Result<Instance<(Term, Val)>, String> {
        match rule {
            EvalRule::Ev1 { x } => Ok(Instance { premises: vec![], conclusion: (lit(*x), Val(*x)) }),
            EvalRule::Ev2 { e1, e2, x1, x2, v } => {
                if self.check_sum && *v != plus(*x1, *x2) {
                    return Err(format!("{v} is not {x1} + {x2}"));
                }
                Ok(Instance {
                    premises: vec![(e1.clone(), *x1), (e2.clone(), *x2)],
                    conclusion: (add(e1.clone(), e2.clone()), *v),
                })
            }
        }
    }

    fn matches(&self, rule: &EvalRule, premises: &[&(Term, Val)], (e, w): &(Term, Val)) -> bool {
        match (rule, premises) {
            (EvalRule::Ev1 { x }, []) => *w == Val(*x) && is_lit(e, *x),
            (EvalRule::Ev2 { e1, e2, x1, x2, v }, [p1, p2]) => {
                (!self.check_sum || *v == plus(*x1, *x2))
                    && w == v
                    && (&p1.0, p1.1, &p2.0, p2.1) == (e1, *x1, e2, *x2)
                    && is_add(e, e1, e2)
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TypOfRule {
    Tof1 { v: Val },
    Tof2 { e1: Term, e2: Term },
}

/// `TypOf : Trm * Typ -> P`.
#[derive(Clone, Debug, Default)]
pub struct TypOfSig;

impl RuleName for TypOfRule {
    fn rule_name(&self) -> &'static str {
        match self {
            TypOfRule::Tof1 { .. } => "tof1",
            TypOfRule::Tof2 { .. } => "tof2",
        }
    }
}

impl IndexedSignature for TypOfSig {
    type Index = (Term, Ty);
    type Rule = TypOfRule;

    fn name(&self) -> &str {
        "TypOf"
    }

    fn instantiate(&self, rule: &TypOfRule) -> Result<Instance<(Term, Ty)>, String> {
        Ok(match rule {
            TypOfRule::Tof1 { v } => Instance { premises: vec![], conclusion: (v.to_lit(), Ty::N) },
            TypOfRule::Tof2 { e1, e2 } => Instance {
                premises: vec![(e1.clone(), Ty::N), (e2.clone(), Ty::N)],
                conclusion: (add(e1.clone(), e2.clone()), Ty::N),
            },
        })
    }

    fn matches(&self, rule: &TypOfRule, premises: &[&(Term, Ty)], (e, Ty::N): &(Term, Ty)) -> bool {
        match (rule, premises) {
            (TypOfRule::Tof1 { v }, []) => is_lit(e, v.0),
            (TypOfRule::Tof2 { e1, e2 }, [(p1, Ty::N), (p2, Ty::N)]) => p1 == e1 && p2 == e2 && is_add(e, e1, e2),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum IsTrmRule {
    IsLit { x: i64 },
    IsAdd { e1: Term, e2: Term },
}

/// `IsTrm : Trm -> P`, the relational lifting of the term type.
#[derive(Clone, Debug, Default)]
pub struct IsTrmSig;

impl RuleName for IsTrmRule {
    fn rule_name(&self) -> &'static str {
        match self {
            IsTrmRule::IsLit { .. } => "isLit",
            IsTrmRule::IsAdd { .. } => "isAdd",
        }
    }
}

impl IndexedSignature for IsTrmSig {
    type Index = Term;
    type Rule = IsTrmRule;

    fn name(&self) -> &str {
        "IsTrm"
    }

    fn instantiate(&self, rule: &IsTrmRule) -> Result<Instance<Term>, String> {
        Ok(match rule {
            IsTrmRule::IsLit { x } => Instance { premises: vec![], conclusion: lit(*x) },
            IsTrmRule::IsAdd { e1, e2 } => {
                Instance { premises: vec![e1.clone(), e2.clone()], conclusion: add(e1.clone(), e2.clone()) }
            }
        })
    }

    fn matches(&self, rule: &IsTrmRule, premises: &[&Term], e: &Term) -> bool {
        match (rule, premises) {
            (IsTrmRule::IsLit { x }, []) => is_lit(e, *x),
            (IsTrmRule::IsAdd { e1, e2 }, [p1, p2]) => *p1 == e1 && *p2 == e2 && is_add(e, e1, e2),
            _ => false,
        }
    }
}

fn is_lit(e: &Term, x: i64) -> bool {
    lit_value(e) == Some(x)
}

fn is_add(e: &Term, e1: &Term, e2: &Term) -> bool {
    e.ctor() == "add" && matches!(e.out_().rec(), [a, b] if a == e1 && b == e2)
}

pub type Eval = Derivation<EvalSig>;
pub type TypOf = Derivation<TypOfSig>;
pub type IsTrm = Derivation<IsTrmSig>;

// ---------------------------------------------------------------------------
// Builders: each is a fold over the term. The fold also sees the term
// itself, which becomes the conclusion as is.

fn build<S: IndexedSignature>(
    sig: &S,
    t: &Term,
    node: &impl Fn(&Term, &[Derivation<S>]) -> (S::Rule, S::Index),
) -> Derivation<S> {
    let kids: Vec<Derivation<S>> = t.out_().rec().iter().map(|c| build(sig, c, node)).collect();
    let (rule, conclusion) = node(t, &kids);
    let premises = kids.into_iter().map(|d| (d.conclusion().clone(), d)).collect();
    din(sig, DNode::new(rule, premises, conclusion)).expect("builder produces valid nodes")
}

pub fn build_eval_derivation(t: &Term) -> Eval {
    build(&EvalSig::default(), t, &|t, kids| match (lit_value(t), kids) {
        (Some(x), _) => (EvalRule::Ev1 { x }, (t.clone(), Val(x))),
        (None, [d1, d2]) => {
            let ((e1, x1), (e2, x2)) = (d1.conclusion(), d2.conclusion());
            let v = plus(*x1, *x2);
            (EvalRule::Ev2 { e1: e1.clone(), e2: e2.clone(), x1: *x1, x2: *x2, v }, (t.clone(), v))
        }
        _ => unreachable!("arithmetic nodes have zero or two children"),
    })
}

pub fn build_typof_derivation(t: &Term) -> TypOf {
    build(&TypOfSig, t, &|t, kids| match (lit_value(t), kids) {
        (Some(x), _) => (TypOfRule::Tof1 { v: Val(x) }, (t.clone(), Ty::N)),
        (None, [d1, d2]) => {
            let rule = TypOfRule::Tof2 { e1: d1.conclusion().0.clone(), e2: d2.conclusion().0.clone() };
            (rule, (t.clone(), Ty::N))
        }
        _ => unreachable!("arithmetic nodes have zero or two children"),
    })
}

pub fn build_istrm(t: &Term) -> IsTrm {
    build(&IsTrmSig, t, &|t, kids| match (lit_value(t), kids) {
        (Some(x), _) => (IsTrmRule::IsLit { x }, t.clone()),
        (None, [d1, d2]) => (IsTrmRule::IsAdd { e1: d1.conclusion().clone(), e2: d2.conclusion().clone() }, t.clone()),
        _ => unreachable!("arithmetic nodes have zero or two children"),
    })
}

// ---------------------------------------------------------------------------
// Agreement and preservation

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error(transparent)]
    Invalid(#[from] InvalidDerivation),
    #[error(transparent)]
    Index(#[from] IndexMismatch),
    #[error("typing derivation does not match the term: {0}")]
    Inversion(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agrees,
    Disagrees { term: Term, derived: Val, evaluated: Val },
}

/// Checks a validating `Eval` derivation against the evaluator.
pub fn eval_of_derivation(sig: &EvalSig, d: &Eval) -> Result<Agreement, InvalidDerivation> {
    validate(sig, d)?;
    let (e, v) = d.conclusion();
    let evaluated = eval(e);
    Ok(if evaluated == *v {
        Agreement::Agrees
    } else {
        Agreement::Disagrees { term: e.clone(), derived: *v, evaluated }
    })
}

type Transformer = Box<dyn Fn(&TypOf) -> Result<TypOf, ArithError>>;

fn tof1(v: Val) -> TypOf {
    din(&TypOfSig, DNode::new(TypOfRule::Tof1 { v }, vec![], (v.to_lit(), Ty::N))).unwrap()
}

/// Inverts a typing of `add(e1, e2)` into the typings of its operands.
fn invert_tof2(td: &TypOf) -> Result<(TypOf, TypOf), ArithError> {
    match (&td.node().rule, td.node().premises.as_slice()) {
        (TypOfRule::Tof2 { .. }, [(_, t1), (_, t2)]) => Ok((t1.clone(), t2.clone())),
        _ => Err(ArithError::Inversion(format!("expected tof2, found {:?}", td.rule()))),
    }
}

/// `(e, v) |-> forall t. TypOf (e, t) -> TypOf (lit (vv v), t)`, by Mendler
/// induction on the `Eval` derivation.
struct PreservationAlg;

impl IndexedMendlerAlgebra<EvalSig, Transformer> for PreservationAlg {
    fn step<'h>(
        &self,
        rec: &dyn Fn(&(Term, Val), Handle<'h>) -> Transformer,
        w: &(Term, Val),
        node: DNode<EvalRule, (Term, Val), Handle<'h>>,
    ) -> Transformer {
        match node.rule {
            EvalRule::Ev1 { .. } => Box::new(|td: &TypOf| Ok(td.clone())),
            EvalRule::Ev2 { .. } => {
                let ih: Vec<Transformer> = node.premises.iter().map(|(k, h)| rec(k, *h)).collect();
                let v = w.1;
                Box::new(move |td: &TypOf| {
                    let (t1, t2) = invert_tof2(td)?;
                    ih[0](&t1)?;
                    ih[1](&t2)?;
                    Ok(tof1(v))
                })
            }
        }
    }
}

fn same_term(a: &Term, b: &Term) -> Result<(), ArithError> {
    if a == b {
        Ok(())
    } else {
        Err(IndexMismatch { expected: a.to_string(), found: b.to_string() }.into())
    }
}

/// Type preservation for evaluation: from `Eval (e, v)` and `TypOf (e, t)`
/// derive `TypOf (lit (vv v), t)`.
pub fn preservation(d: &Eval, td: &TypOf) -> Result<TypOf, ArithError> {
    validate(&EvalSig::default(), d)?;
    validate(&TypOfSig, td)?;
    same_term(&d.conclusion().0, &td.conclusion().0)?;
    let out = ifold(&PreservationAlg, d.conclusion(), d)?(td)?;
    debug_assert_eq!(out.conclusion(), &(d.conclusion().1.to_lit(), td.conclusion().1));
    Ok(out)
}

/// `e |-> forall t. TypOf (e, t) -> TypOf (lit (vv (eval e)), t)`, by Mendler
/// induction on `IsTrm e`. The value is read off the recursive results.
struct IsTrmPreservationAlg;

impl IndexedMendlerAlgebra<IsTrmSig, Transformer> for IsTrmPreservationAlg {
    fn step<'h>(
        &self,
        rec: &dyn Fn(&Term, Handle<'h>) -> Transformer,
        _w: &Term,
        node: DNode<IsTrmRule, Term, Handle<'h>>,
    ) -> Transformer {
        match node.rule {
            IsTrmRule::IsLit { .. } => Box::new(|td: &TypOf| Ok(td.clone())),
            IsTrmRule::IsAdd { .. } => {
                let ih: Vec<Transformer> = node.premises.iter().map(|(k, h)| rec(k, *h)).collect();
                Box::new(move |td: &TypOf| {
                    let (t1, t2) = invert_tof2(td)?;
                    let r1 = ih[0](&t1)?;
                    let r2 = ih[1](&t2)?;
                    let v1 = lit_value(&r1.conclusion().0).expect("result concludes at a literal");
                    let v2 = lit_value(&r2.conclusion().0).expect("result concludes at a literal");
                    Ok(tof1(plus(Val(v1), Val(v2))))
                })
            }
        }
    }
}

pub fn preservation_via_istrm(w: &IsTrm, td: &TypOf) -> Result<TypOf, ArithError> {
    validate(&IsTrmSig, w)?;
    validate(&TypOfSig, td)?;
    same_term(w.conclusion(), &td.conclusion().0)?;
    ifold(&IsTrmPreservationAlg, w.conclusion(), w)?(td)
}

// ---------------------------------------------------------------------------
// Surface syntax

pub fn parse(src: &str) -> Result<Term, ParseError> {
    from_sexp(&sexp::parse(src)?)
}

pub fn from_sexp(s: &Sexp) -> Result<Term, ParseError> {
    let bad = || ParseError::new(0, format!("expected (lit n) or (add e e), found {s}"));
    match s.as_form().ok_or_else(bad)? {
        ("lit", [n]) => {
            let n = n.as_atom().and_then(|a| a.parse::<i64>().ok()).ok_or_else(bad)?;
            Ok(lit(n))
        }
        ("add", [a, b]) => Ok(add(from_sexp(a)?, from_sexp(b)?)),
        _ => Err(bad()),
    }
}

pub fn to_sexp(t: &Term) -> Sexp {
    match lit_value(t) {
        Some(x) => Sexp::list([Sexp::atom("lit"), Sexp::atom(x.to_string())]),
        None => {
            let rec = t.out_().rec();
            Sexp::list([Sexp::atom("add"), to_sexp(&rec[0]), to_sexp(&rec[1])])
        }
    }
}

/// Same text as `to_sexp(t).to_string()`, written directly.
pub fn print(t: &Term) -> String {
    fn go(t: &Term, out: &mut String) {
        use fmt::Write;
        match lit_value(t) {
            Some(x) => write!(out, "(lit {x})").expect("writing to a string"),
            None => {
                let rec = t.out_().rec();
                out.push_str("(add ");
                go(&rec[0], out);
                out.push(' ');
                go(&rec[1], out);
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(t, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{lift, mfold};

    fn oracle(t: &Term) -> i64 {
        match lit_value(t) {
            Some(x) => x,
            None => t.out_().rec().iter().map(oracle).sum(),
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval(&lit(3)), Val(3));
        let t = add(lit(-1), add(lit(2), lit(0)));
        assert_eq!(print(&t), to_sexp(&t).to_string());
        assert_eq!(signature().in_(t.out_().clone()), Ok(t.clone()));
        assert_eq!(signature().in_(lit(7).out_().clone()), Ok(lit(7)));
        assert_eq!(eval(&add(lit(2), lit(3))), Val(5));
        let t = add(add(lit(1), lit(1)), lit(2));
        assert_eq!(eval(&t), Val(oracle(&t)));
        assert_eq!(mfold(&lift(eval_algebra), &t), Val(4));
    }

    #[test]
    fn eval_derivation_shapes() {
        let d = build_eval_derivation(&lit(3));
        assert_eq!(d.rule(), &EvalRule::Ev1 { x: 3 });
        assert_eq!(d.conclusion(), &(lit(3), Val(3)));
        let d = build_eval_derivation(&add(lit(1), lit(2)));
        assert_eq!(d.conclusion(), &(add(lit(1), lit(2)), Val(3)));
        assert_eq!(d.children().count(), 2);
        assert!(d.children().all(|c| matches!(c.rule(), EvalRule::Ev1 { .. })));
        assert_eq!(eval_of_derivation(&EvalSig::default(), &d), Ok(Agreement::Agrees));
    }

    #[test]
    fn wrong_sum_is_rejected() {
        let (a, b) = (build_eval_derivation(&lit(1)), build_eval_derivation(&lit(2)));
        let rule = EvalRule::Ev2 { e1: lit(1), e2: lit(2), x1: Val(1), x2: Val(2), v: Val(4) };
        let node = DNode::new(rule, vec![((lit(1), Val(1)), a), ((lit(2), Val(2)), b)], (add(lit(1), lit(2)), Val(4)));
        let err = din(&EvalSig::default(), node.clone()).unwrap_err();
        assert_eq!(err.rule, "ev2");
        let forged = din(&EvalSig::without_sum_check(), node).unwrap();
        assert!(validate(&EvalSig::default(), &forged).is_err());
        assert!(matches!(
            eval_of_derivation(&EvalSig::without_sum_check(), &forged),
            Ok(Agreement::Disagrees { derived: Val(4), evaluated: Val(3), .. })
        ));
    }

    #[test]
    fn preservation_examples() {
        let e = lit(3);
        let out = preservation(&build_eval_derivation(&e), &build_typof_derivation(&e)).unwrap();
        assert_eq!(out.conclusion(), &(lit(3), Ty::N));
        let e = add(lit(1), lit(2));
        let out = preservation(&build_eval_derivation(&e), &build_typof_derivation(&e)).unwrap();
        assert_eq!(out.conclusion(), &(lit(3), Ty::N));
        validate(&TypOfSig, &out).unwrap();
        let via = preservation_via_istrm(&build_istrm(&e), &build_typof_derivation(&e)).unwrap();
        assert_eq!(via, out);
    }

    #[test]
    fn preservation_rejects_mismatched_terms() {
        let err = preservation(&build_eval_derivation(&lit(1)), &build_typof_derivation(&lit(2))).unwrap_err();
        assert!(matches!(err, ArithError::Index(_)));
    }

    #[test]
    fn derivation_json() {
        let d = build_eval_derivation(&add(lit(1), lit(2)));
        let j = d.to_json();
        assert_eq!(j["rule"], "ev2");
        assert_eq!(j["params"]["v"], 3);
        assert_eq!(j["premises"][0]["rule"], "ev1");
        assert_eq!(j["premises"][0]["params"], serde_json::json!({"x": 1}));
        assert_eq!(j["index"][1], 3);
    }

    #[test]
    fn surface_round_trip() {
        let t = add(lit(-2), add(lit(0), lit(7)));
        assert_eq!(print(&t), "(add (lit -2) (add (lit 0) (lit 7)))");
        assert_eq!(parse(&print(&t)).unwrap(), t);
        assert!(parse("(lit x)").is_err());
        assert!(parse("(mul (lit 1) (lit 2))").is_err());
    }
}
