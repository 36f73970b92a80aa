//! Typing: `TypODec (gamma, d, t)` and `TypOExp (gamma, e, t)` as one mutual
//! relation, with `TypOPat (p, t)` and `TypOEnv (rho, gamma)` as standalone
//! relations whose derivations appear as evidence inside typing rules.

use std::collections::BTreeMap;

use serde::Serialize;

use super::syntax::{Dec, EnvE, EnvT, Exp, Ident, Pat, Phrase, Typ};
use super::LangError;
use crate::indexed::{self, din, Derivation, IndexedSignature, Instance, RuleName};
use crate::mutual::{
    din1, din2, validate1, validate2, BiDerivation, BiIndex, BiInstance, BiPremise, Derivation1, Derivation2, HNode,
    IndexedBiSignature,
};

/// Which side wins when two typing environments share a name.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Bias {
    #[default]
    Right,
    Left,
}

/// The typing relations. `bias` exists so tests can plant a typing-only
/// left-biased union and watch subject reduction fail; the language itself
/// is right-biased.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TypingRules {
    pub bias: Bias,
}

impl TypingRules {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_bias(bias: Bias) -> Self {
        TypingRules { bias }
    }

    /// `a ⊕ b` on typing environments.
    pub fn union(&self, a: &EnvT, b: &EnvT) -> EnvT {
        match self.bias {
            Bias::Right => a.union_right(b),
            Bias::Left => a.union_left(b),
        }
    }
}

pub type DecTypIndex = (EnvT, Dec, Typ);
pub type ExpTypIndex = (EnvT, Exp, Typ);

pub type DecTyping = Derivation1<TypingRules>;
pub type ExpTyping = Derivation2<TypingRules>;
pub type PatTyping = Derivation<PatTypingSig>;
pub type EnvTyping = Derivation<EnvTypingSig>;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DecTypingRule {
    TdEnv { ctx: EnvT, env: EnvE, env_ty: EnvT, env_typing: EnvTyping },
    TdMatch { ctx: EnvT, pat: Pat, exp: Exp, ty: Typ, pat_typing: PatTyping },
    TdJoin { ctx: EnvT, left: Dec, left_ty: EnvT, right: Dec, right_ty: EnvT },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExpTypingRule {
    TVar {
        ctx: EnvT,
        x: Ident,
        ty: Typ,
    },
    TCon {
        ctx: EnvT,
        c: Ident,
        ty: Typ,
    },
    TClos {
        ctx: EnvT,
        env: EnvE,
        env_ty: EnvT,
        pat: Pat,
        arg_ty: Typ,
        body: Exp,
        res_ty: Typ,
        env_typing: EnvTyping,
        pat_typing: PatTyping,
    },
    TApp {
        ctx: EnvT,
        fun: Exp,
        arg: Exp,
        arg_ty: Typ,
        res_ty: Typ,
    },
    TScope {
        ctx: EnvT,
        dec: Dec,
        local: EnvT,
        body: Exp,
        ty: Typ,
    },
}

impl RuleName for DecTypingRule {
    fn rule_name(&self) -> &'static str {
        match self {
            DecTypingRule::TdEnv { .. } => "TD-ENV",
            DecTypingRule::TdMatch { .. } => "TD-MATCH",
            DecTypingRule::TdJoin { .. } => "TD-JOIN",
        }
    }
}

impl RuleName for ExpTypingRule {
    fn rule_name(&self) -> &'static str {
        match self {
            ExpTypingRule::TVar { .. } => "T-VAR",
            ExpTypingRule::TCon { .. } => "T-CON",
            ExpTypingRule::TClos { .. } => "T-CLOS",
            ExpTypingRule::TApp { .. } => "T-APP",
            ExpTypingRule::TScope { .. } => "T-SCOPE",
        }
    }
}

impl DecTypingRule {
    pub fn ctx(&self) -> &EnvT {
        match self {
            DecTypingRule::TdEnv { ctx, .. }
            | DecTypingRule::TdMatch { ctx, .. }
            | DecTypingRule::TdJoin { ctx, .. } => ctx,
        }
    }
}

impl ExpTypingRule {
    pub fn ctx(&self) -> &EnvT {
        match self {
            ExpTypingRule::TVar { ctx, .. }
            | ExpTypingRule::TCon { ctx, .. }
            | ExpTypingRule::TClos { ctx, .. }
            | ExpTypingRule::TApp { ctx, .. }
            | ExpTypingRule::TScope { ctx, .. } => ctx,
        }
    }
}

fn expect<T: PartialEq + Serialize + std::fmt::Debug>(what: &str, got: &T, want: &T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: have {}, need {}", indexed::show(got), indexed::show(want)))
    }
}

fn bindings(p: &Pat) -> Result<EnvT, String> {
    p.bindings().map_err(|e| e.to_string())
}

type DecInstance = BiInstance<DecTypIndex, ExpTypIndex, DecTypIndex>;
type ExpInstance = BiInstance<DecTypIndex, ExpTypIndex, ExpTypIndex>;

impl IndexedBiSignature for TypingRules {
    type Index1 = DecTypIndex;
    type Index2 = ExpTypIndex;
    type Rule1 = DecTypingRule;
    type Rule2 = ExpTypingRule;

    const FAMILY1: Option<&'static str> = Some("TypODec");
    const FAMILY2: Option<&'static str> = Some("TypOExp");

    fn name(&self) -> &str {
        "Typing"
    }

    fn instantiate1(&self, rule: &DecTypingRule) -> Result<DecInstance, String> {
        use DecTypingRule::*;
        Ok(match rule {
            TdEnv { ctx, env, env_ty, env_typing } => {
                expect("environment typing", env_typing.conclusion(), &(env.clone(), env_ty.clone()))?;
                BiInstance {
                    premises: vec![],
                    conclusion: (ctx.clone(), Dec::Env(env.clone()), Typ::Env(env_ty.clone())),
                }
            }
            TdMatch { ctx, pat, exp, ty, pat_typing } => {
                expect("pattern typing", pat_typing.conclusion(), &(pat.clone(), ty.clone()))?;
                let b = bindings(pat)?;
                BiInstance {
                    premises: vec![BiIndex::Second((ctx.clone(), exp.clone(), ty.clone()))],
                    conclusion: (ctx.clone(), Dec::matching(pat.clone(), exp.clone()), Typ::Env(b)),
                }
            }
            TdJoin { ctx, left, left_ty, right, right_ty } => BiInstance {
                premises: vec![
                    BiIndex::First((ctx.clone(), left.clone(), Typ::Env(left_ty.clone()))),
                    BiIndex::First((self.union(ctx, left_ty), right.clone(), Typ::Env(right_ty.clone()))),
                ],
                conclusion: (
                    ctx.clone(),
                    Dec::join(left.clone(), right.clone()),
                    Typ::Env(self.union(left_ty, right_ty)),
                ),
            },
        })
    }

    fn instantiate2(&self, rule: &ExpTypingRule) -> Result<ExpInstance, String> {
        use ExpTypingRule::*;
        Ok(match rule {
            TVar { ctx, x, ty } => {
                match ctx.get(x) {
                    Some(t) => expect(&format!("type of `{x}`"), t, ty)?,
                    None => return Err(format!("`{x}` is not in the typing context")),
                }
                BiInstance { premises: vec![], conclusion: (ctx.clone(), Exp::Var(x.clone()), ty.clone()) }
            }
            TCon { ctx, c, ty } => {
                BiInstance { premises: vec![], conclusion: (ctx.clone(), Exp::Con(c.clone(), ty.clone()), ty.clone()) }
            }
            TClos { ctx, env, env_ty, pat, arg_ty, body, res_ty, env_typing, pat_typing } => {
                expect("environment typing", env_typing.conclusion(), &(env.clone(), env_ty.clone()))?;
                expect("pattern typing", pat_typing.conclusion(), &(pat.clone(), arg_ty.clone()))?;
                let inner = self.union(env_ty, &bindings(pat)?);
                BiInstance {
                    premises: vec![BiIndex::Second((inner, body.clone(), res_ty.clone()))],
                    conclusion: (
                        ctx.clone(),
                        Exp::clos(env.clone(), pat.clone(), body.clone()),
                        Typ::arrow(arg_ty.clone(), res_ty.clone()),
                    ),
                }
            }
            TApp { ctx, fun, arg, arg_ty, res_ty } => BiInstance {
                premises: vec![
                    BiIndex::Second((ctx.clone(), fun.clone(), Typ::arrow(arg_ty.clone(), res_ty.clone()))),
                    BiIndex::Second((ctx.clone(), arg.clone(), arg_ty.clone())),
                ],
                conclusion: (ctx.clone(), Exp::app(fun.clone(), arg.clone()), res_ty.clone()),
            },
            TScope { ctx, dec, local, body, ty } => BiInstance {
                premises: vec![
                    BiIndex::First((ctx.clone(), dec.clone(), Typ::Env(local.clone()))),
                    BiIndex::Second((self.union(ctx, local), body.clone(), ty.clone())),
                ],
                conclusion: (ctx.clone(), Exp::scope(dec.clone(), body.clone()), ty.clone()),
            },
        })
    }

    fn validate_evidence1(&self, rule: &DecTypingRule) -> Result<(), String> {
        match rule {
            DecTypingRule::TdEnv { env_typing, .. } => check_env_typing(self, env_typing),
            DecTypingRule::TdMatch { pat_typing, .. } => check_pat_typing(pat_typing),
            DecTypingRule::TdJoin { .. } => Ok(()),
        }
    }

    fn validate_evidence2(&self, rule: &ExpTypingRule) -> Result<(), String> {
        match rule {
            ExpTypingRule::TClos { env_typing, pat_typing, .. } => {
                check_env_typing(self, env_typing)?;
                check_pat_typing(pat_typing)
            }
            _ => Ok(()),
        }
    }
}

fn check_env_typing(rules: &TypingRules, d: &EnvTyping) -> Result<(), String> {
    indexed::validate(&EnvTypingSig { rules: *rules }, d).map_err(|e| format!("environment evidence: {e}"))
}

fn check_pat_typing(d: &PatTyping) -> Result<(), String> {
    indexed::validate(&PatTypingSig, d).map_err(|e| format!("pattern evidence: {e}"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum PatTypingRule {
    TpVar { x: Ident, ty: Typ },
    TpCon { c: Ident, ty: Typ },
    TpApp { p1: Pat, p2: Pat, arg_ty: Typ, res_ty: Typ },
}

impl RuleName for PatTypingRule {
    fn rule_name(&self) -> &'static str {
        match self {
            PatTypingRule::TpVar { .. } => "TP-VAR",
            PatTypingRule::TpCon { .. } => "TP-CON",
            PatTypingRule::TpApp { .. } => "TP-APP",
        }
    }
}

/// `TypOPat (p, t)`: patterns are checked at their annotations.
#[derive(Clone, Copy, Debug, Default)]
pub struct PatTypingSig;

impl IndexedSignature for PatTypingSig {
    type Index = (Pat, Typ);
    type Rule = PatTypingRule;

    const FAMILY: Option<&'static str> = Some("TypOPat");

    fn name(&self) -> &str {
        "TypOPat"
    }

    fn instantiate(&self, rule: &PatTypingRule) -> Result<Instance<(Pat, Typ)>, String> {
        Ok(match rule {
            PatTypingRule::TpVar { x, ty } => {
                Instance { premises: vec![], conclusion: (Pat::Var(x.clone(), ty.clone()), ty.clone()) }
            }
            PatTypingRule::TpCon { c, ty } => {
                Instance { premises: vec![], conclusion: (Pat::Con(c.clone(), ty.clone()), ty.clone()) }
            }
            PatTypingRule::TpApp { p1, p2, arg_ty, res_ty } => Instance {
                premises: vec![(p1.clone(), Typ::arrow(arg_ty.clone(), res_ty.clone())), (p2.clone(), arg_ty.clone())],
                conclusion: (Pat::app(p1.clone(), p2.clone()), res_ty.clone()),
            },
        })
    }
}

/// The single `TypOEnv` rule: every entry is a value typed under the empty
/// context at the type the typing environment gives it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvTypingRule {
    pub env: EnvE,
    pub ctx: EnvT,
    pub entries: BTreeMap<Ident, ExpTyping>,
}

impl RuleName for EnvTypingRule {
    fn rule_name(&self) -> &'static str {
        "TE-ENV"
    }
}

/// `TypOEnv (rho, gamma)`. Entry typings are checked with `rules`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnvTypingSig {
    pub rules: TypingRules,
}

impl IndexedSignature for EnvTypingSig {
    type Index = (EnvE, EnvT);
    type Rule = EnvTypingRule;

    const FAMILY: Option<&'static str> = Some("TypOEnv");

    fn name(&self) -> &str {
        "TypOEnv"
    }

    fn instantiate(&self, rule: &EnvTypingRule) -> Result<Instance<(EnvE, EnvT)>, String> {
        let EnvTypingRule { env, ctx, entries } = rule;
        if !env.same_domain(ctx) || entries.len() != env.len() {
            return Err("environment, typing environment and entries have different domains".into());
        }
        for (x, v) in env.iter() {
            if !v.is_value() {
                return Err(format!("entry `{x}` is not a value: {v}"));
            }
            let d = entries.get(x).ok_or_else(|| format!("no typing for entry `{x}`"))?;
            let ty = ctx.get(x).expect("same domain");
            expect(&format!("typing of entry `{x}`"), d.conclusion(), &(EnvT::empty(), v.clone(), ty.clone()))?;
        }
        Ok(Instance { premises: vec![], conclusion: (env.clone(), ctx.clone()) })
    }

    fn validate_evidence(&self, rule: &EnvTypingRule) -> Result<(), String> {
        for (x, d) in &rule.entries {
            validate2(&self.rules, d).map_err(|e| format!("entry `{x}`: {e}"))?;
        }
        Ok(())
    }
}

pub(crate) type TypPremise = BiPremise<DecTypIndex, ExpTypIndex, DecTyping, ExpTyping>;

pub(crate) fn dec_premise(d: DecTyping) -> TypPremise {
    BiPremise::First(d.conclusion().clone(), d)
}

pub(crate) fn exp_premise(d: ExpTyping) -> TypPremise {
    BiPremise::Second(d.conclusion().clone(), d)
}

/// Builds a checked first-family node; the conclusion comes from the rule.
pub(crate) fn dec_node(
    rules: &TypingRules,
    rule: DecTypingRule,
    premises: Vec<TypPremise>,
) -> Result<DecTyping, String> {
    let conclusion = rules.instantiate1(&rule)?.conclusion;
    din1(rules, HNode::new(rule, premises, conclusion)).map_err(|e| e.reason)
}

pub(crate) fn exp_node(
    rules: &TypingRules,
    rule: ExpTypingRule,
    premises: Vec<TypPremise>,
) -> Result<ExpTyping, String> {
    let conclusion = rules.instantiate2(&rule)?.conclusion;
    din2(rules, HNode::new(rule, premises, conclusion)).map_err(|e| e.reason)
}

pub(crate) fn env_node(rules: &TypingRules, rule: EnvTypingRule) -> Result<EnvTyping, String> {
    let sig = EnvTypingSig { rules: *rules };
    let conclusion = sig.instantiate(&rule)?.conclusion;
    din(&sig, indexed::DNode::new(rule, vec![], conclusion)).map_err(|e| e.reason)
}

/// The `i`th premise of a typing node, as a declaration typing.
pub(crate) fn dec_child<R, C>(
    node: &HNode<R, C, DecTypIndex, ExpTypIndex, DecTyping, ExpTyping>,
    i: usize,
) -> &DecTyping {
    match &node.premises[i] {
        BiPremise::First(_, d) => d,
        BiPremise::Second(..) => unreachable!("typing rules fix premise families"),
    }
}

pub(crate) fn exp_child<R, C>(
    node: &HNode<R, C, DecTypIndex, ExpTypIndex, DecTyping, ExpTyping>,
    i: usize,
) -> &ExpTyping {
    match &node.premises[i] {
        BiPremise::Second(_, d) => d,
        BiPremise::First(..) => unreachable!("typing rules fix premise families"),
    }
}

fn ill_typed(what: String) -> LangError {
    LangError::IllTyped(what)
}

/// Syntax-directed pattern typing.
pub fn typecheck_pat(p: &Pat) -> Result<(Typ, PatTyping), LangError> {
    let rule = match p {
        Pat::Var(x, ty) => PatTypingRule::TpVar { x: x.clone(), ty: ty.clone() },
        Pat::Con(c, ty) => PatTypingRule::TpCon { c: c.clone(), ty: ty.clone() },
        Pat::App(p1, p2) => {
            let (t1, d1) = typecheck_pat(p1)?;
            let (t2, d2) = typecheck_pat(p2)?;
            let (arg, res) =
                t1.as_arrow().ok_or_else(|| ill_typed(format!("pattern head {p1} has non-function type {t1}")))?;
            if *arg != t2 {
                return Err(ill_typed(format!("pattern {p2} has type {t2}, head {p1} expects {arg}")));
            }
            let rule = PatTypingRule::TpApp {
                p1: (**p1).clone(),
                p2: (**p2).clone(),
                arg_ty: arg.clone(),
                res_ty: res.clone(),
            };
            let conclusion = PatTypingSig.instantiate(&rule).map_err(ill_typed)?.conclusion;
            let premises = vec![(d1.conclusion().clone(), d1), (d2.conclusion().clone(), d2)];
            let d = din(&PatTypingSig, indexed::DNode::new(rule, premises, conclusion))
                .map_err(|e| ill_typed(e.to_string()))?;
            return Ok((res.clone(), d));
        }
    };
    let conclusion = PatTypingSig.instantiate(&rule).map_err(ill_typed)?.conclusion;
    let d = din(&PatTypingSig, indexed::DNode::new(rule, vec![], conclusion)).map_err(|e| ill_typed(e.to_string()))?;
    Ok((d.conclusion().1.clone(), d))
}

/// Types every entry of a value environment under the empty context.
pub fn typecheck_env(rules: &TypingRules, env: &EnvE) -> Result<(EnvT, EnvTyping), LangError> {
    let mut entries = BTreeMap::new();
    let mut ctx = BTreeMap::new();
    for (x, v) in env.iter() {
        if !v.is_value() {
            return Err(LangError::NotAValue(v.clone()));
        }
        let (t, d) = typecheck_exp(rules, &EnvT::empty(), v)?;
        ctx.insert(x.clone(), t);
        entries.insert(x.clone(), d);
    }
    let ctx: EnvT = ctx.into_iter().collect();
    let d = env_node(rules, EnvTypingRule { env: env.clone(), ctx: ctx.clone(), entries }).map_err(ill_typed)?;
    Ok((ctx, d))
}

/// Syntax-directed expression typing.
pub fn typecheck_exp(rules: &TypingRules, ctx: &EnvT, e: &Exp) -> Result<(Typ, ExpTyping), LangError> {
    use ExpTypingRule::*;
    let (rule, premises) = match e {
        Exp::Var(x) => {
            let ty = ctx.get(x).ok_or_else(|| LangError::Unbound(x.clone()))?;
            (TVar { ctx: ctx.clone(), x: x.clone(), ty: ty.clone() }, vec![])
        }
        Exp::Con(c, ty) => (TCon { ctx: ctx.clone(), c: c.clone(), ty: ty.clone() }, vec![]),
        Exp::Clos(env, pat, body) => {
            let (env_ty, env_typing) = typecheck_env(rules, env)?;
            let (arg_ty, pat_typing) = typecheck_pat(pat)?;
            let inner = rules.union(&env_ty, &pat.bindings()?);
            let (res_ty, body_typing) = typecheck_exp(rules, &inner, body)?;
            let rule = TClos {
                ctx: ctx.clone(),
                env: env.clone(),
                env_ty,
                pat: pat.clone(),
                arg_ty,
                body: (**body).clone(),
                res_ty,
                env_typing,
                pat_typing,
            };
            (rule, vec![exp_premise(body_typing)])
        }
        Exp::App(f, a) => {
            let (tf, df) = typecheck_exp(rules, ctx, f)?;
            let (ta, da) = typecheck_exp(rules, ctx, a)?;
            let (arg, res) =
                tf.as_arrow().ok_or_else(|| ill_typed(format!("{f} has type {tf}, which is not a function type")))?;
            if *arg != ta {
                return Err(ill_typed(format!("{a} has type {ta}, but {f} expects {arg}")));
            }
            let rule = TApp {
                ctx: ctx.clone(),
                fun: (**f).clone(),
                arg: (**a).clone(),
                arg_ty: arg.clone(),
                res_ty: res.clone(),
            };
            (rule, vec![exp_premise(df), exp_premise(da)])
        }
        Exp::Scope(d, body) => {
            let (td, dd) = typecheck_dec(rules, ctx, d)?;
            let local = td.as_env().expect("declarations have environment types").clone();
            let (ty, db) = typecheck_exp(rules, &rules.union(ctx, &local), body)?;
            let rule = TScope { ctx: ctx.clone(), dec: (**d).clone(), local, body: (**body).clone(), ty };
            (rule, vec![dec_premise(dd), exp_premise(db)])
        }
    };
    let d = exp_node(rules, rule, premises).map_err(ill_typed)?;
    Ok((d.conclusion().2.clone(), d))
}

/// Syntax-directed declaration typing; the type is always an environment type.
pub fn typecheck_dec(rules: &TypingRules, ctx: &EnvT, dec: &Dec) -> Result<(Typ, DecTyping), LangError> {
    use DecTypingRule::*;
    let (rule, premises) = match dec {
        Dec::Env(env) => {
            let (env_ty, env_typing) = typecheck_env(rules, env)?;
            (TdEnv { ctx: ctx.clone(), env: env.clone(), env_ty, env_typing }, vec![])
        }
        Dec::Match(pat, e) => {
            let (te, de) = typecheck_exp(rules, ctx, e)?;
            let (tp, pat_typing) = typecheck_pat(pat)?;
            if tp != te {
                return Err(ill_typed(format!("pattern {pat} has type {tp}, but {e} has type {te}")));
            }
            pat.bindings()?;
            (
                TdMatch { ctx: ctx.clone(), pat: pat.clone(), exp: (**e).clone(), ty: te, pat_typing },
                vec![exp_premise(de)],
            )
        }
        Dec::Join(l, r) => {
            let (tl, dl) = typecheck_dec(rules, ctx, l)?;
            let left_ty = tl.as_env().expect("declarations have environment types").clone();
            let (tr, dr) = typecheck_dec(rules, &rules.union(ctx, &left_ty), r)?;
            let right_ty = tr.as_env().expect("declarations have environment types").clone();
            let rule = TdJoin { ctx: ctx.clone(), left: (**l).clone(), left_ty, right: (**r).clone(), right_ty };
            (rule, vec![dec_premise(dl), dec_premise(dr)])
        }
    };
    let d = dec_node(rules, rule, premises).map_err(ill_typed)?;
    Ok((d.conclusion().2.clone(), d))
}

pub type PhraseTyping = BiDerivation<TypingRules>;

pub fn typecheck_phrase(rules: &TypingRules, ctx: &EnvT, p: &Phrase) -> Result<(Typ, PhraseTyping), LangError> {
    match p {
        Phrase::Dec(d) => typecheck_dec(rules, ctx, d).map(|(t, d)| (t, BiDerivation::First(d))),
        Phrase::Exp(e) => typecheck_exp(rules, ctx, e).map(|(t, d)| (t, BiDerivation::Second(d))),
    }
}

/// Full validation of a typing derivation of either family.
pub fn validate_typing(rules: &TypingRules, d: &PhraseTyping) -> Result<(), indexed::InvalidDerivation> {
    match d {
        BiDerivation::First(d) => validate1(rules, d),
        BiDerivation::Second(d) => validate2(rules, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::concrete::{parse_dec, parse_env_e, parse_env_t, parse_exp};

    fn a() -> Typ {
        Typ::var("a")
    }

    #[test]
    fn variables_and_constructors() {
        let rules = TypingRules::new();
        let ctx = EnvT::singleton(Ident::new("x"), a());
        let (t, d) = typecheck_exp(&rules, &ctx, &Exp::var("x")).unwrap();
        assert_eq!(t, a());
        assert_eq!(d.rule().rule_name(), "T-VAR");
        let f = Typ::arrow(a(), Typ::var("b"));
        assert_eq!(typecheck_exp(&rules, &EnvT::empty(), &Exp::con("c", f.clone())).unwrap().0, f);
        assert!(matches!(typecheck_exp(&rules, &EnvT::empty(), &Exp::var("x")), Err(LangError::Unbound(_))));
    }

    #[test]
    fn closures_and_application() {
        let rules = TypingRules::new();
        let e = parse_exp("(app (clos ((y (con d (ty b)))) (pvar x (ty a)) (var y)) (con c (ty a)))").unwrap();
        let (t, d) = typecheck_exp(&rules, &EnvT::empty(), &e).unwrap();
        assert_eq!(t, Typ::var("b"));
        validate2(&rules, &d).unwrap();
        let bad = parse_exp("(app (clos () (pvar x (ty a)) (var x)) (con c (ty b)))").unwrap();
        assert!(typecheck_exp(&rules, &EnvT::empty(), &bad).is_err());
    }

    #[test]
    fn declarations_are_sequential() {
        let rules = TypingRules::new();
        let d = parse_dec("(join (match (pvar x (ty a)) (con c (ty a))) (match (pvar y (ty a)) (var x)))").unwrap();
        let (t, dd) = typecheck_dec(&rules, &EnvT::empty(), &d).unwrap();
        assert_eq!(t, Typ::Env(parse_env_t("((x (ty a)) (y (ty a)))").unwrap()));
        validate1(&rules, &dd).unwrap();
    }

    #[test]
    fn environments() {
        let rules = TypingRules::new();
        let (g, d) = typecheck_env(&rules, &parse_env_e("((x (con c (ty a))))").unwrap()).unwrap();
        assert_eq!(g, EnvT::singleton(Ident::new("x"), a()));
        indexed::validate(&EnvTypingSig { rules }, &d).unwrap();
        assert_eq!(typecheck_env(&rules, &EnvE::empty()).unwrap().0, EnvT::empty());
        assert!(matches!(typecheck_env(&rules, &parse_env_e("((x (var y)))").unwrap()), Err(LangError::NotAValue(_))));
    }

    #[test]
    fn shadowing_follows_bias() {
        let src = "(scope (env ((x (con c (ty b))))) (var x))";
        let ctx = EnvT::singleton(Ident::new("x"), a());
        let e = parse_exp(src).unwrap();
        assert_eq!(typecheck_exp(&TypingRules::new(), &ctx, &e).unwrap().0, Typ::var("b"));
        assert_eq!(typecheck_exp(&TypingRules::with_bias(Bias::Left), &ctx, &e).unwrap().0, a());
    }

    #[test]
    fn tampered_evidence_fails_validation() {
        let rules = TypingRules::new();
        let e = parse_exp("(clos ((y (con d (ty b)))) (pvar x (ty a)) (var y))").unwrap();
        let (_, d) = typecheck_exp(&rules, &EnvT::empty(), &e).unwrap();
        let ExpTypingRule::TClos { env_typing, .. } = d.rule() else { panic!() };
        // forge an environment typing whose entry derivation is for another context
        let entry =
            typecheck_exp(&rules, &EnvT::singleton(Ident::new("z"), a()), &Exp::con("d", Typ::var("b"))).unwrap().1;
        let forged = EnvTypingRule {
            env: env_typing.rule().env.clone(),
            ctx: env_typing.rule().ctx.clone(),
            entries: [(Ident::new("y"), entry)].into_iter().collect(),
        };
        assert!(env_node(&rules, forged).is_err());
    }
}
