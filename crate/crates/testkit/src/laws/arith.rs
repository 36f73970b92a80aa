//! Evaluation, agreement and preservation laws for the arithmetic example.

use mendler::arith::{
    self, add, eval, eval_of_derivation, lit, preservation, preservation_via_istrm, Agreement, Eval, EvalRule, EvalSig,
    IsTrm, IsTrmRule, IsTrmSig, Ty, TypOf, TypOfRule, TypOfSig, Val,
};
use mendler::indexed::{din, validate, DNode, Derivation, IndexedSignature};
use mendler::kernel::Term;

use super::{kernel, LawConfig, LawResult};
use crate::enumerate::Pools;

/// An enumerated term with its three derivations.
#[derive(Clone, Debug)]
pub struct ArithCase {
    pub term: Term,
    pub eval: Eval,
    pub typof: TypOf,
    pub istrm: IsTrm,
}

fn node<S: IndexedSignature>(sig: &S, rule: S::Rule, kids: Vec<Derivation<S>>) -> Derivation<S> {
    let inst = sig.instantiate(&rule).expect("enumerated rules instantiate");
    din(sig, DNode::new(rule, inst.premises.into_iter().zip(kids).collect(), inst.conclusion))
        .expect("enumerated nodes are valid")
}

/// Every arithmetic term of depth at most `depth` (in enumeration order)
/// with its `Eval`, `TypOf` and `IsTrm` derivations, built level by level.
pub fn arith_cases(depth: usize) -> Vec<ArithCase> {
    let sig = EvalSig::default();
    let mut level: Vec<ArithCase> = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in Pools::arith().ints {
            let eval = node(&sig, EvalRule::Ev1 { x }, vec![]);
            next.push(ArithCase {
                term: eval.conclusion().0.clone(),
                typof: node(&TypOfSig, TypOfRule::Tof1 { v: Val(x) }, vec![]),
                istrm: node(&IsTrmSig, IsTrmRule::IsLit { x }, vec![]),
                eval,
            });
        }
        for a in &level {
            for b in &level {
                let (e1, e2) = (a.term.clone(), b.term.clone());
                let (x1, x2) = (a.eval.conclusion().1, b.eval.conclusion().1);
                let v = arith::plus(x1, x2);
                let eval = node(
                    &sig,
                    EvalRule::Ev2 { e1: e1.clone(), e2: e2.clone(), x1, x2, v },
                    vec![a.eval.clone(), b.eval.clone()],
                );
                next.push(ArithCase {
                    term: eval.conclusion().0.clone(),
                    typof: node(
                        &TypOfSig,
                        TypOfRule::Tof2 { e1: e1.clone(), e2: e2.clone() },
                        vec![a.typof.clone(), b.typof.clone()],
                    ),
                    istrm: node(&IsTrmSig, IsTrmRule::IsAdd { e1, e2 }, vec![a.istrm.clone(), b.istrm.clone()]),
                    eval,
                });
            }
        }
        level = next;
    }
    level
}

fn builder_law<S: IndexedSignature>(
    name: &str,
    sig: &S,
    terms: &[Term],
    build: impl Fn(&Term) -> Derivation<S>,
    at: impl Fn(&Term) -> S::Index,
) -> LawResult {
    let mut law = LawResult::new(name);
    for t in terms {
        let d = build(t);
        law.record(match validate(sig, &d) {
            Err(e) => Err(format!("{t}: {e}")),
            Ok(()) if d.conclusion() != &at(t) => Err(format!("{t}: concludes elsewhere")),
            Ok(()) => Ok(()),
        });
    }
    law
}

/// The `Eval` builder validates and concludes at `(e, eval e)`.
pub fn eval_builder_law(terms: &[Term]) -> LawResult {
    builder_law("eval-builder", &EvalSig::default(), terms, arith::build_eval_derivation, |t| (t.clone(), eval(t)))
}

/// All three derivation builders validate and conclude where they should.
pub fn builder_laws(terms: &[Term]) -> Vec<LawResult> {
    vec![
        eval_builder_law(terms),
        builder_law("typof-builder", &TypOfSig, terms, arith::build_typof_derivation, |t| (t.clone(), Ty::N)),
        builder_law("istrm-builder", &IsTrmSig, terms, arith::build_istrm, Term::clone),
    ]
}

/// Candidate `Eval` nodes, valid or not: every `ev2` over two literal
/// premises with a conclusion value in `-4..=4`, and each enumerated `ev2`
/// derivation of depth at most 3 with its conclusion value moved by
/// `-2..=2`.
fn agreement_candidates(cases: &[ArithCase]) -> Vec<DNode<EvalRule, (Term, Val), Eval>> {
    let sig = EvalSig::default();
    let leaf = |x: i64| node(&sig, EvalRule::Ev1 { x }, vec![]);
    let mut out = Vec::new();
    for x1 in -2..=2 {
        for x2 in -2..=2 {
            for v in -4..=4 {
                let (e1, e2) = (lit(x1), lit(x2));
                let (x1, x2, v) = (Val(x1), Val(x2), Val(v));
                let rule = EvalRule::Ev2 { e1: e1.clone(), e2: e2.clone(), x1, x2, v };
                let premises = vec![((e1.clone(), x1), leaf(x1.0)), ((e2.clone(), x2), leaf(x2.0))];
                out.push(DNode::new(rule, premises, (add(e1, e2), v)));
            }
        }
    }
    for c in cases.iter().filter(|c| c.term.depth() <= 3) {
        let n = c.eval.node();
        if let EvalRule::Ev2 { e1, e2, x1, x2, v } = &n.rule {
            for delta in -2..=2 {
                let v = Val(v.0.wrapping_add(delta));
                let rule = EvalRule::Ev2 { e1: e1.clone(), e2: e2.clone(), x1: *x1, x2: *x2, v };
                out.push(DNode::new(rule, n.premises.clone(), (c.term.clone(), v)));
            }
        }
    }
    out
}

/// Function-to-relation agreement: built derivations conclude at
/// `(e, eval e)`, and every candidate that `sig` accepts has `v = eval e`.
pub fn agreement_laws(cases: &[ArithCase], sig: &EvalSig) -> Vec<LawResult> {
    let mut built = LawResult::new("agreement-built");
    for c in cases {
        built.record(match eval_of_derivation(sig, &c.eval) {
            Ok(Agreement::Agrees) if c.eval.conclusion().0 == c.term => Ok(()),
            other => Err(format!("{}: {other:?}", c.term)),
        });
    }
    let mut valid = LawResult::new("agreement-validating");
    let mut rejected = 0usize;
    for n in agreement_candidates(cases) {
        let Ok(d) = din(sig, n) else {
            rejected += 1;
            continue;
        };
        valid.record(match eval_of_derivation(sig, &d) {
            Ok(Agreement::Agrees) => Ok(()),
            Ok(Agreement::Disagrees { term, derived, evaluated }) => {
                Err(format!("derivation concludes {term} evaluates to {derived}, eval gives {evaluated}"))
            }
            Err(e) => Err(format!("din accepted a derivation validate rejects: {e}")),
        });
    }
    let mut discriminating = LawResult::new("agreement-rejects-forgeries");
    discriminating.check(rejected > 0, || "no forged candidate was rejected".to_string());
    vec![built, valid, discriminating]
}

fn check_preserved(t: &Term, want: Val, out: Result<TypOf, arith::ArithError>) -> Result<TypOf, String> {
    let d = out.map_err(|e| format!("{t}: {e}"))?;
    validate(&TypOfSig, &d).map_err(|e| format!("{t}: output does not validate: {e}"))?;
    let (e, ty) = d.conclusion();
    if arith::lit_value(e) != Some(want.0) || *ty != Ty::N {
        return Err(format!("{t}: output concludes at {:?}", d.conclusion()));
    }
    Ok(d)
}

/// Both preservation routes succeed with validating outputs at
/// `(lit (eval e), N)`, and agree.
pub fn preservation_laws(cases: &[ArithCase]) -> Vec<LawResult> {
    let mut via_eval = LawResult::new("preservation-eval");
    let mut via_istrm = LawResult::new("preservation-istrm");
    let mut coincide = LawResult::new("preservation-coincide");
    for c in cases {
        let want = eval(&c.term);
        let p1 = check_preserved(&c.term, want, preservation(&c.eval, &c.typof));
        let p2 = check_preserved(&c.term, want, preservation_via_istrm(&c.istrm, &c.typof));
        coincide.check(matches!((&p1, &p2), (Ok(a), Ok(b)) if a.conclusion() == b.conclusion()), || {
            format!("{}: routes disagree", c.term)
        });
        via_eval.record(p1.map(drop));
        via_istrm.record(p2.map(drop));
    }
    vec![via_eval, via_istrm, coincide]
}

/// `parse (print t) = t`.
pub fn syntax_law(terms: &[Term]) -> LawResult {
    let mut law = LawResult::new("parse-print");
    for t in terms {
        let s = arith::print(t);
        law.check(arith::parse(&s).as_ref() == Ok(t), || format!("{s} does not read back"));
    }
    law
}

pub fn suite(cfg: &LawConfig) -> Vec<LawResult> {
    let cases = arith_cases(cfg.arith_depth);
    let terms: Vec<Term> = cases.iter().map(|c| c.term.clone()).collect();
    let mut out = vec![kernel::oracle_law(&terms)];
    out.extend(builder_laws(&terms));
    out.extend(agreement_laws(&cases, &cfg.mutation.eval_sig()));
    out.extend(preservation_laws(&cases));
    out.push(syntax_law(&terms));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mutation;

    #[test]
    fn cases_follow_enumeration_order() {
        let cases = arith_cases(3);
        let terms = kernel::arith_corpus(3);
        assert_eq!(cases.len(), terms.len());
        assert!(cases.iter().zip(&terms).all(|(c, t)| &c.term == t));
    }

    #[test]
    fn arith_laws_hold() {
        for law in suite(&LawConfig::small()) {
            assert!(law.passed(), "{law:?}");
            assert!(law.checked > 0, "{}", law.name);
        }
    }

    #[test]
    fn dropped_side_condition_is_caught() {
        let laws = suite(&LawConfig::small().with_mutation(Mutation::DroppedEv2SideCondition));
        let law = laws.iter().find(|l| l.name == "agreement-validating").unwrap();
        assert!(law.failed > 0);
    }
}
