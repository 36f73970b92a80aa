//! Subject reduction: a step derivation, a typing of the runtime
//! environment and a typing of the phrase before the step give a typing of
//! the phrase after it, at the same type.
//!
//! The transformer is one mutual Mendler algebra over step derivations.
//! Typing derivations are inputs, so the helpers below inspect them directly.

use std::collections::BTreeMap;

use super::step::{DecStep, DecStepIndex, DecStepRule, ExpStep, ExpStepIndex, ExpStepRule, StepRules};
use super::syntax::{EnvE, EnvT, Ident, Pat, Phrase, Typ};
use super::typing::{
    dec_child, dec_node, dec_premise, env_node, exp_child, exp_node, exp_premise, DecTyping, DecTypingRule, EnvTyping,
    EnvTypingRule, ExpTyping, ExpTypingRule, PatTyping, PatTypingRule, PatTypingSig, PhraseTyping, TypingRules,
};
use crate::indexed::{ifold, show, DNode, IndexedMendlerAlgebra, RuleName};
use crate::kernel::Handle;
use crate::mutual::{
    hfold_1, hfold_2, BiDerivation, BiPremise, Handle1, Handle2, HandleLayer1, HandleLayer2, IndexedBiMendlerAlgebra,
};

/// A step rule case for which no typing of the successor could be built.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("subject reduction failed at {rule}: {reason}")]
pub struct SrFailure {
    pub rule: String,
    pub reason: String,
}

fn fail(rule: &str, reason: impl Into<String>) -> SrFailure {
    SrFailure { rule: rule.to_string(), reason: reason.into() }
}

/// Rebuilds a typing of `e` under another context that agrees with the old
/// one on the free variables of `e`.
pub fn recontext_exp(rules: &TypingRules, d: &ExpTyping, ctx: &EnvT) -> Result<ExpTyping, String> {
    use ExpTypingRule::*;
    if d.conclusion().0 == *ctx {
        return Ok(d.clone());
    }
    let node = d.node();
    let ctx = ctx.clone();
    match node.rule.clone() {
        TVar { x, ty, .. } => exp_node(rules, TVar { ctx, x, ty }, vec![]),
        TCon { c, ty, .. } => exp_node(rules, TCon { ctx, c, ty }, vec![]),
        TClos { env, env_ty, pat, arg_ty, body, res_ty, env_typing, pat_typing, .. } => {
            let rule = TClos { ctx, env, env_ty, pat, arg_ty, body, res_ty, env_typing, pat_typing };
            exp_node(rules, rule, node.premises.clone())
        }
        TApp { fun, arg, arg_ty, res_ty, .. } => {
            let f = recontext_exp(rules, exp_child(node, 0), &ctx)?;
            let a = recontext_exp(rules, exp_child(node, 1), &ctx)?;
            exp_node(rules, TApp { ctx, fun, arg, arg_ty, res_ty }, vec![exp_premise(f), exp_premise(a)])
        }
        TScope { dec, local, body, ty, .. } => {
            let dd = recontext_dec(rules, dec_child(node, 0), &ctx)?;
            let db = recontext_exp(rules, exp_child(node, 1), &rules.union(&ctx, &local))?;
            exp_node(rules, TScope { ctx, dec, local, body, ty }, vec![dec_premise(dd), exp_premise(db)])
        }
    }
}

pub fn recontext_dec(rules: &TypingRules, d: &DecTyping, ctx: &EnvT) -> Result<DecTyping, String> {
    use DecTypingRule::*;
    if d.conclusion().0 == *ctx {
        return Ok(d.clone());
    }
    let node = d.node();
    let ctx = ctx.clone();
    match node.rule.clone() {
        TdEnv { env, env_ty, env_typing, .. } => dec_node(rules, TdEnv { ctx, env, env_ty, env_typing }, vec![]),
        TdMatch { pat, exp, ty, pat_typing, .. } => {
            let de = recontext_exp(rules, exp_child(node, 0), &ctx)?;
            dec_node(rules, TdMatch { ctx, pat, exp, ty, pat_typing }, vec![exp_premise(de)])
        }
        TdJoin { left, left_ty, right, right_ty, .. } => {
            let dl = recontext_dec(rules, dec_child(node, 0), &ctx)?;
            let dr = recontext_dec(rules, dec_child(node, 1), &rules.union(&ctx, &left_ty))?;
            dec_node(rules, TdJoin { ctx, left, left_ty, right, right_ty }, vec![dec_premise(dl), dec_premise(dr)])
        }
    }
}

type Entries = BTreeMap<Ident, ExpTyping>;
type Lemma = Box<dyn Fn(&ExpTyping) -> Result<Entries, String>>;

/// Pattern lemma: from `TypOPat (p, t)` and a closed typing of a value at
/// `t`, typings of each value the pattern binds at its annotation. Only
/// meaningful when the match succeeds.
struct PatLemma;

impl IndexedMendlerAlgebra<PatTypingSig, Lemma> for PatLemma {
    fn step<'h>(
        &self,
        rec: &dyn Fn(&(Pat, Typ), Handle<'h>) -> Lemma,
        w: &(Pat, Typ),
        node: DNode<PatTypingRule, (Pat, Typ), Handle<'h>>,
    ) -> Lemma {
        let want = w.1.clone();
        let at_type = move |d: &ExpTyping| {
            if d.conclusion().2 == want {
                Ok(())
            } else {
                Err(format!("value typed at {}, pattern at {}", d.conclusion().2, want))
            }
        };
        match node.rule {
            PatTypingRule::TpVar { x, .. } => Box::new(move |d| {
                at_type(d)?;
                Ok([(x.clone(), d.clone())].into_iter().collect())
            }),
            PatTypingRule::TpCon { .. } => Box::new(move |d| {
                at_type(d)?;
                Ok(Entries::new())
            }),
            PatTypingRule::TpApp { arg_ty, .. } => {
                let mut kids = node.premises.into_iter().map(|(k, h)| rec(&k, h));
                let (l1, l2) = (kids.next().expect("two premises"), kids.next().expect("two premises"));
                Box::new(move |d| {
                    at_type(d)?;
                    let ExpTypingRule::TApp { arg_ty: a, .. } = d.rule() else {
                        return Err(format!("expected an application typing, found {}", d.rule().rule_name()));
                    };
                    if *a != arg_ty {
                        return Err(format!("constructor argument typed at {a}, pattern expects {arg_ty}"));
                    }
                    let mut m = l1(exp_child(d.node(), 0))?;
                    for (x, t) in l2(exp_child(d.node(), 1))? {
                        if m.insert(x.clone(), t).is_some() {
                            return Err(format!("pattern binds `{x}` twice"));
                        }
                    }
                    Ok(m)
                })
            }
        }
    }
}

/// Typing of the environment a successful match produces.
fn matched_env(
    rules: &TypingRules,
    pat: &Pat,
    pat_typing: &PatTyping,
    value: &ExpTyping,
    bound: &EnvE,
) -> Result<EnvTyping, String> {
    let closed = recontext_exp(rules, value, &EnvT::empty())?;
    let lemma = ifold(&PatLemma, pat_typing.conclusion(), pat_typing).map_err(|e| e.to_string())?;
    let entries = lemma(&closed)?;
    let ctx = pat.bindings().map_err(|e| e.to_string())?;
    env_node(rules, EnvTypingRule { env: bound.clone(), ctx, entries })
}

/// `(rho1, gamma1) ⊕ (rho2, gamma2)`. Values follow the runtime union;
/// types follow the typing rules' union.
pub fn union_env_typing(rules: &TypingRules, a: &EnvTyping, b: &EnvTyping) -> Result<EnvTyping, String> {
    let (ra, rb) = (a.rule(), b.rule());
    let mut entries = ra.entries.clone();
    entries.extend(rb.entries.iter().map(|(x, d)| (x.clone(), d.clone())));
    let rule = EnvTypingRule { env: ra.env.union_right(&rb.env), ctx: rules.union(&ra.ctx, &rb.ctx), entries };
    env_node(rules, rule)
}

fn td_env(rules: &TypingRules, ctx: &EnvT, et: EnvTyping) -> Result<DecTyping, String> {
    let (env, env_ty) = et.conclusion().clone();
    dec_node(rules, DecTypingRule::TdEnv { ctx: ctx.clone(), env, env_ty, env_typing: et }, vec![])
}

pub type DecSafe = Box<dyn Fn(&EnvTyping, &DecTyping) -> Result<DecTyping, SrFailure>>;
pub type ExpSafe = Box<dyn Fn(&EnvTyping, &ExpTyping) -> Result<ExpTyping, SrFailure>>;

/// The subject-reduction algebra over step derivations.
pub struct TPAlg {
    pub rules: TypingRules,
}

enum Child {
    Dec(DecSafe),
    Exp(ExpSafe),
}

impl Child {
    fn dec(self) -> DecSafe {
        match self {
            Child::Dec(f) => f,
            Child::Exp(_) => unreachable!("step rules fix premise families"),
        }
    }

    fn exp(self) -> ExpSafe {
        match self {
            Child::Exp(f) => f,
            Child::Dec(_) => unreachable!("step rules fix premise families"),
        }
    }
}

fn only_child<'h>(
    premises: Vec<BiPremise<DecStepIndex, ExpStepIndex, Handle1<'h>, Handle2<'h>>>,
    rec1: &dyn Fn(&DecStepIndex, Handle1<'h>) -> DecSafe,
    rec2: &dyn Fn(&ExpStepIndex, Handle2<'h>) -> ExpSafe,
) -> Option<Child> {
    premises.into_iter().next().map(|p| match p {
        BiPremise::First(k, h) => Child::Dec(rec1(&k, h)),
        BiPremise::Second(k, h) => Child::Exp(rec2(&k, h)),
    })
}

/// Checks the inputs agree with the step's index and each other, returning
/// the typing context.
fn coherent<T: serde::Serialize + std::fmt::Debug + PartialEq>(
    rule: &str,
    env: &EnvE,
    before: &T,
    envd: &EnvTyping,
    ctx: &EnvT,
    typed: &T,
) -> Result<(), SrFailure> {
    if envd.conclusion().0 != *env {
        return Err(fail(rule, format!("environment typing is for {}, step runs under {}", envd.conclusion().0, env)));
    }
    if envd.conclusion().1 != *ctx {
        return Err(fail(
            rule,
            format!("environment typing gives {}, phrase typed under {}", envd.conclusion().1, ctx),
        ));
    }
    if typed != before {
        return Err(fail(rule, format!("typing is for {}, step starts from {}", show(typed), show(before))));
    }
    Ok(())
}

fn wrong_typing(rule: &str, found: &str) -> SrFailure {
    fail(rule, format!("typing derivation ends in {found}, which cannot type this phrase"))
}

impl IndexedBiMendlerAlgebra<StepRules, DecSafe, ExpSafe> for TPAlg {
    fn step1<'h>(
        &self,
        rec1: &dyn Fn(&DecStepIndex, Handle1<'h>) -> DecSafe,
        rec2: &dyn Fn(&ExpStepIndex, Handle2<'h>) -> ExpSafe,
        w: &DecStepIndex,
        node: HandleLayer1<'h, StepRules>,
    ) -> DecSafe {
        let rules = self.rules;
        let name = node.rule.rule_name();
        let child = only_child(node.premises, rec1, rec2);
        let (rho, d1, _) = w.clone();
        let guard = move |envd: &EnvTyping, typd: &DecTyping| {
            coherent(name, &rho, &d1, envd, &typd.conclusion().0, &typd.conclusion().1)
        };
        let err = move |e: String| fail(name, e);
        match node.rule {
            DecStepRule::DMatch1 { ep, .. } => {
                let ih = child.expect("one premise").exp();
                Box::new(move |envd, typd| {
                    guard(envd, typd)?;
                    let DecTypingRule::TdMatch { ctx, pat, ty, pat_typing, .. } = typd.rule().clone() else {
                        return Err(wrong_typing(name, typd.rule().rule_name()));
                    };
                    let de = ih(envd, exp_child(typd.node(), 0))?;
                    let rule = DecTypingRule::TdMatch { ctx, pat, exp: ep.clone(), ty, pat_typing };
                    dec_node(&rules, rule, vec![exp_premise(de)]).map_err(err)
                })
            }
            DecStepRule::DMatch { bound, .. } => Box::new(move |envd, typd| {
                guard(envd, typd)?;
                let DecTypingRule::TdMatch { ctx, pat, pat_typing, .. } = typd.rule() else {
                    return Err(wrong_typing(name, typd.rule().rule_name()));
                };
                let et = matched_env(&rules, pat, pat_typing, exp_child(typd.node(), 0), &bound).map_err(err)?;
                td_env(&rules, ctx, et).map_err(err)
            }),
            DecStepRule::DJoin1 { d1p, .. } => {
                let ih = child.expect("one premise").dec();
                Box::new(move |envd, typd| {
                    guard(envd, typd)?;
                    let DecTypingRule::TdJoin { ctx, left_ty, right, right_ty, .. } = typd.rule().clone() else {
                        return Err(wrong_typing(name, typd.rule().rule_name()));
                    };
                    let dl = ih(envd, dec_child(typd.node(), 0))?;
                    let dr = dec_child(typd.node(), 1).clone();
                    let rule = DecTypingRule::TdJoin { ctx, left: d1p.clone(), left_ty, right, right_ty };
                    dec_node(&rules, rule, vec![dec_premise(dl), dec_premise(dr)]).map_err(err)
                })
            }
            DecStepRule::DJoin2 { d2p, .. } => {
                let ih = child.expect("one premise").dec();
                Box::new(move |envd, typd| {
                    guard(envd, typd)?;
                    let DecTypingRule::TdJoin { ctx, left, left_ty, right_ty, .. } = typd.rule().clone() else {
                        return Err(wrong_typing(name, typd.rule().rule_name()));
                    };
                    let dl = dec_child(typd.node(), 0).clone();
                    let DecTypingRule::TdEnv { env_typing, .. } = dl.rule() else {
                        return Err(wrong_typing(name, dl.rule().rule_name()));
                    };
                    let inner = union_env_typing(&rules, envd, env_typing).map_err(err)?;
                    let dr = ih(&inner, dec_child(typd.node(), 1))?;
                    let rule = DecTypingRule::TdJoin { ctx, left, left_ty, right: d2p.clone(), right_ty };
                    dec_node(&rules, rule, vec![dec_premise(dl), dec_premise(dr)]).map_err(err)
                })
            }
            DecStepRule::DJoin3 { .. } => Box::new(move |envd, typd| {
                guard(envd, typd)?;
                let ctx = &typd.conclusion().0;
                let (dl, dr) = (dec_child(typd.node(), 0), dec_child(typd.node(), 1));
                let (DecTypingRule::TdEnv { env_typing: e1, .. }, DecTypingRule::TdEnv { env_typing: e2, .. }) =
                    (dl.rule(), dr.rule())
                else {
                    return Err(fail(name, "joined environments are not typed by TD-ENV"));
                };
                let et = union_env_typing(&rules, e1, e2).map_err(err)?;
                td_env(&rules, ctx, et).map_err(err)
            }),
        }
    }

    fn step2<'h>(
        &self,
        rec1: &dyn Fn(&DecStepIndex, Handle1<'h>) -> DecSafe,
        rec2: &dyn Fn(&ExpStepIndex, Handle2<'h>) -> ExpSafe,
        w: &ExpStepIndex,
        node: HandleLayer2<'h, StepRules>,
    ) -> ExpSafe {
        let rules = self.rules;
        let name = node.rule.rule_name();
        let child = only_child(node.premises, rec1, rec2);
        let (rho, e1, _) = w.clone();
        let guard = move |envd: &EnvTyping, typd: &ExpTyping| {
            coherent(name, &rho, &e1, envd, &typd.conclusion().0, &typd.conclusion().1)
        };
        let err = move |e: String| fail(name, e);
        match node.rule {
            ExpStepRule::EVar { x, .. } => Box::new(move |envd, typd| {
                guard(envd, typd)?;
                let entry = envd.rule().entries.get(&x).ok_or_else(|| fail(name, format!("no typing for `{x}`")))?;
                recontext_exp(&rules, entry, &typd.conclusion().0).map_err(err)
            }),
            ExpStepRule::EApp1 { e1p, .. } => {
                let ih = child.expect("one premise").exp();
                Box::new(move |envd, typd| {
                    guard(envd, typd)?;
                    let ExpTypingRule::TApp { ctx, arg, arg_ty, res_ty, .. } = typd.rule().clone() else {
                        return Err(wrong_typing(name, typd.rule().rule_name()));
                    };
                    let df = ih(envd, exp_child(typd.node(), 0))?;
                    let da = exp_child(typd.node(), 1).clone();
                    let rule = ExpTypingRule::TApp { ctx, fun: e1p.clone(), arg, arg_ty, res_ty };
                    exp_node(&rules, rule, vec![exp_premise(df), exp_premise(da)]).map_err(err)
                })
            }
            ExpStepRule::EApp2 { e2p, .. } => {
                let ih = child.expect("one premise").exp();
                Box::new(move |envd, typd| {
                    guard(envd, typd)?;
                    let ExpTypingRule::TApp { ctx, fun, arg_ty, res_ty, .. } = typd.rule().clone() else {
                        return Err(wrong_typing(name, typd.rule().rule_name()));
                    };
                    let df = exp_child(typd.node(), 0).clone();
                    let da = ih(envd, exp_child(typd.node(), 1))?;
                    let rule = ExpTypingRule::TApp { ctx, fun, arg: e2p.clone(), arg_ty, res_ty };
                    exp_node(&rules, rule, vec![exp_premise(df), exp_premise(da)]).map_err(err)
                })
            }
            ExpStepRule::EBeta { pat, body, bound, .. } => Box::new(move |envd, typd| {
                guard(envd, typd)?;
                let ctx = &typd.conclusion().0;
                if typd.rule().rule_name() != "T-APP" {
                    return Err(wrong_typing(name, typd.rule().rule_name()));
                }
                let (df, da) = (exp_child(typd.node(), 0), exp_child(typd.node(), 1));
                let ExpTypingRule::TClos { env_ty, res_ty, env_typing, pat_typing, .. } = df.rule() else {
                    return Err(wrong_typing(name, df.rule().rule_name()));
                };
                let eb = matched_env(&rules, &pat, pat_typing, da, &bound).map_err(err)?;
                let et = union_env_typing(&rules, env_typing, &eb).map_err(err)?;
                let local = et.conclusion().1.clone();
                debug_assert_eq!(local, rules.union(env_ty, &eb.conclusion().1));
                let dd = td_env(&rules, ctx, et).map_err(err)?;
                let db = recontext_exp(&rules, exp_child(df.node(), 0), &rules.union(ctx, &local)).map_err(err)?;
                let rule = ExpTypingRule::TScope {
                    ctx: ctx.clone(),
                    dec: dd.conclusion().1.clone(),
                    local,
                    body: body.clone(),
                    ty: res_ty.clone(),
                };
                exp_node(&rules, rule, vec![dec_premise(dd), exp_premise(db)]).map_err(err)
            }),
            ExpStepRule::EScope1 { dp, .. } => {
                let ih = child.expect("one premise").dec();
                Box::new(move |envd, typd| {
                    guard(envd, typd)?;
                    let ExpTypingRule::TScope { ctx, local, body, ty, .. } = typd.rule().clone() else {
                        return Err(wrong_typing(name, typd.rule().rule_name()));
                    };
                    let dd = ih(envd, dec_child(typd.node(), 0))?;
                    let db = exp_child(typd.node(), 1).clone();
                    let rule = ExpTypingRule::TScope { ctx, dec: dp.clone(), local, body, ty };
                    exp_node(&rules, rule, vec![dec_premise(dd), exp_premise(db)]).map_err(err)
                })
            }
            ExpStepRule::EScope2 { bodyp, .. } => {
                let ih = child.expect("one premise").exp();
                Box::new(move |envd, typd| {
                    guard(envd, typd)?;
                    let ExpTypingRule::TScope { ctx, dec, local, ty, .. } = typd.rule().clone() else {
                        return Err(wrong_typing(name, typd.rule().rule_name()));
                    };
                    let dd = dec_child(typd.node(), 0).clone();
                    let DecTypingRule::TdEnv { env_typing, .. } = dd.rule() else {
                        return Err(wrong_typing(name, dd.rule().rule_name()));
                    };
                    let inner = union_env_typing(&rules, envd, env_typing).map_err(err)?;
                    let db = ih(&inner, exp_child(typd.node(), 1))?;
                    let rule = ExpTypingRule::TScope { ctx, dec, local, body: bodyp.clone(), ty };
                    exp_node(&rules, rule, vec![dec_premise(dd), exp_premise(db)]).map_err(err)
                })
            }
            ExpStepRule::EScope3 { .. } => Box::new(move |envd, typd| {
                guard(envd, typd)?;
                if typd.rule().rule_name() != "T-SCOPE" {
                    return Err(wrong_typing(name, typd.rule().rule_name()));
                }
                recontext_exp(&rules, exp_child(typd.node(), 1), &typd.conclusion().0).map_err(err)
            }),
        }
    }
}

/// Subject reduction for an expression step.
pub fn subject_reduction_exp(
    rules: &TypingRules,
    stepd: &ExpStep,
    envd: &EnvTyping,
    typd: &ExpTyping,
) -> Result<ExpTyping, SrFailure> {
    let f = hfold_2(&TPAlg { rules: *rules }, stepd.conclusion(), stepd).map_err(|e| fail("root", e.to_string()))?;
    f(envd, typd)
}

/// Subject reduction for a declaration step.
pub fn subject_reduction_dec(
    rules: &TypingRules,
    stepd: &DecStep,
    envd: &EnvTyping,
    typd: &DecTyping,
) -> Result<DecTyping, SrFailure> {
    let f = hfold_1(&TPAlg { rules: *rules }, stepd.conclusion(), stepd).map_err(|e| fail("root", e.to_string()))?;
    f(envd, typd)
}

pub type PhraseStep = BiDerivation<StepRules>;

/// Subject reduction for a step of either family; the step and the typing
/// must be of the same family.
pub fn subject_reduction(
    rules: &TypingRules,
    stepd: &PhraseStep,
    envd: &EnvTyping,
    typd: &PhraseTyping,
) -> Result<PhraseTyping, SrFailure> {
    match (stepd, typd) {
        (BiDerivation::First(s), BiDerivation::First(t)) => {
            subject_reduction_dec(rules, s, envd, t).map(BiDerivation::First)
        }
        (BiDerivation::Second(s), BiDerivation::Second(t)) => {
            subject_reduction_exp(rules, s, envd, t).map(BiDerivation::Second)
        }
        _ => Err(fail("root", "step and typing derivations are for different families")),
    }
}

/// One step of a phrase with its derivation.
pub fn step_phrase(env: &EnvE, p: &Phrase) -> Option<(Phrase, PhraseStep)> {
    match p {
        Phrase::Dec(d) => super::step::step_dec(env, d).map(|(d, s)| (Phrase::Dec(d), BiDerivation::First(s))),
        Phrase::Exp(e) => super::step::step_exp(env, e).map(|(e, s)| (Phrase::Exp(e), BiDerivation::Second(s))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::concrete::{parse_env_e, parse_phrase};
    use crate::lang::typing::{typecheck_env, typecheck_phrase, validate_typing, Bias};

    fn run(rules: &TypingRules, env: &str, src: &str) -> Result<Vec<Phrase>, SrFailure> {
        let env = parse_env_e(env).unwrap();
        let (ctx, envd) = typecheck_env(rules, &env).unwrap();
        let mut p = parse_phrase(src).unwrap();
        let (ty, mut typd) = typecheck_phrase(rules, &ctx, &p).unwrap();
        let mut trace = vec![p.clone()];
        while let Some((next, stepd)) = step_phrase(&env, &p) {
            typd = subject_reduction(rules, &stepd, &envd, &typd)?;
            validate_typing(rules, &typd).map_err(|e| fail("validate", e.to_string()))?;
            let (c, q, t) = match &typd {
                BiDerivation::First(d) => {
                    (d.conclusion().0.clone(), Phrase::Dec(d.conclusion().1.clone()), d.conclusion().2.clone())
                }
                BiDerivation::Second(d) => {
                    (d.conclusion().0.clone(), Phrase::Exp(d.conclusion().1.clone()), d.conclusion().2.clone())
                }
            };
            assert_eq!((c, &q, &t), (ctx.clone(), &next, &ty));
            p = next;
            trace.push(p.clone());
        }
        Ok(trace)
    }

    #[test]
    fn beta_preserves_types() {
        let rules = TypingRules::new();
        let t = run(&rules, "((z (con c (ty a))))", "(app (clos () (pvar x (ty a)) (var x)) (var z))").unwrap();
        assert_eq!(t.last().unwrap().to_string(), "(con c (ty a))");
    }

    #[test]
    fn matching_and_joins_preserve_types() {
        let rules = TypingRules::new();
        let src = "(scope (join (match (papp (pvar f (arrow (ty a) (ty b))) (pvar y (ty a))) \
                   (app (con k (arrow (ty a) (ty b))) (con c (ty a)))) (match (pvar z (ty a)) (var y))) \
                   (app (var f) (var z)))";
        let t = run(&rules, "()", src).unwrap();
        assert_eq!(t.last().unwrap().to_string(), "(app (con k (arrow (ty a) (ty b))) (con c (ty a)))");
    }

    #[test]
    fn closures_capture_environments() {
        let rules = TypingRules::new();
        let src =
            "(app (scope (env ((y (con d (ty b))))) (clos ((w (con c (ty a)))) (pvar x (ty a)) (var w))) (var v))";
        run(&rules, "((v (con c (ty a))))", src).unwrap();
    }

    #[test]
    fn left_biased_typing_breaks_preservation() {
        let rules = TypingRules::with_bias(Bias::Left);
        let src = "(scope (join (env ((x (con c (ty a))))) (env ((x (con d (ty b)))))) (var x))";
        assert!(run(&rules, "()", src).is_err());
    }

    #[test]
    fn incoherent_inputs_are_reported() {
        let rules = TypingRules::new();
        let env = parse_env_e("((z (con c (ty a))))").unwrap();
        let (_, envd) = typecheck_env(&rules, &EnvE::empty()).unwrap();
        let p = parse_phrase("(var z)").unwrap();
        let (_, typd) = typecheck_phrase(&rules, &typecheck_env(&rules, &env).unwrap().0, &p).unwrap();
        let (_, stepd) = step_phrase(&env, &p).unwrap();
        assert!(subject_reduction(&rules, &stepd, &envd, &typd).is_err());
    }
}
