//! Small-step semantics: `DecStep (rho, d, d')` and `ExpStep (rho, e, e')`,
//! with a deterministic left-to-right call-by-value stepper.

use serde::Serialize;

use super::matching::patmatch;
use super::syntax::{Dec, EnvE, Exp, Ident, Pat};
use crate::indexed::RuleName;
use crate::mutual::{din1, din2, BiIndex, BiInstance, BiPremise, Derivation1, Derivation2, HNode, IndexedBiSignature};

pub type DecStepIndex = (EnvE, Dec, Dec);
pub type ExpStepIndex = (EnvE, Exp, Exp);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DecStepRule {
    /// The matched expression steps.
    DMatch1 {
        env: EnvE,
        pat: Pat,
        e: Exp,
        ep: Exp,
    },
    /// `match(p, v) -> env(patmatch(p, v))`
    DMatch {
        env: EnvE,
        pat: Pat,
        v: Exp,
        bound: EnvE,
    },
    DJoin1 {
        env: EnvE,
        d1: Dec,
        d1p: Dec,
        d2: Dec,
    },
    /// The right declaration steps under the left one's bindings.
    DJoin2 {
        env: EnvE,
        left: EnvE,
        d2: Dec,
        d2p: Dec,
    },
    DJoin3 {
        env: EnvE,
        left: EnvE,
        right: EnvE,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ExpStepRule {
    EVar {
        env: EnvE,
        x: Ident,
    },
    EApp1 {
        env: EnvE,
        e1: Exp,
        e1p: Exp,
        e2: Exp,
    },
    EApp2 {
        env: EnvE,
        v1: Exp,
        e2: Exp,
        e2p: Exp,
    },
    /// `apply(closure(rho0, p, b), v) -> scope(env(rho0 ⊕ patmatch(p, v)), b)`
    EBeta {
        env: EnvE,
        cenv: EnvE,
        pat: Pat,
        body: Exp,
        arg: Exp,
        bound: EnvE,
    },
    EScope1 {
        env: EnvE,
        d: Dec,
        dp: Dec,
        body: Exp,
    },
    /// The body steps under the local environment.
    EScope2 {
        env: EnvE,
        local: EnvE,
        body: Exp,
        bodyp: Exp,
    },
    EScope3 {
        env: EnvE,
        local: EnvE,
        v: Exp,
    },
}

impl RuleName for DecStepRule {
    fn rule_name(&self) -> &'static str {
        match self {
            DecStepRule::DMatch1 { .. } => "D-MATCH1",
            DecStepRule::DMatch { .. } => "D-MATCH",
            DecStepRule::DJoin1 { .. } => "D-JOIN1",
            DecStepRule::DJoin2 { .. } => "D-JOIN2",
            DecStepRule::DJoin3 { .. } => "D-JOIN3",
        }
    }
}

impl RuleName for ExpStepRule {
    fn rule_name(&self) -> &'static str {
        match self {
            ExpStepRule::EVar { .. } => "E-VAR",
            ExpStepRule::EApp1 { .. } => "E-APP1",
            ExpStepRule::EApp2 { .. } => "E-APP2",
            ExpStepRule::EBeta { .. } => "E-BETA",
            ExpStepRule::EScope1 { .. } => "E-SCOPE1",
            ExpStepRule::EScope2 { .. } => "E-SCOPE2",
            ExpStepRule::EScope3 { .. } => "E-SCOPE3",
        }
    }
}

/// The mutually defined step relations.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepRules;

pub type DecStep = Derivation1<StepRules>;
pub type ExpStep = Derivation2<StepRules>;

type DecInstance = BiInstance<DecStepIndex, ExpStepIndex, DecStepIndex>;
type ExpInstance = BiInstance<DecStepIndex, ExpStepIndex, ExpStepIndex>;

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn matches_to(pat: &Pat, v: &Exp, bound: &EnvE) -> Result<(), String> {
    match patmatch(pat, v) {
        Ok(Some(m)) if m == *bound => Ok(()),
        Ok(Some(m)) => Err(format!("{pat} against {v} binds {m}, not {bound}")),
        Ok(None) => Err(format!("{pat} does not match {v}")),
        Err(e) => Err(e.to_string()),
    }
}

impl IndexedBiSignature for StepRules {
    type Index1 = DecStepIndex;
    type Index2 = ExpStepIndex;
    type Rule1 = DecStepRule;
    type Rule2 = ExpStepRule;

    const FAMILY1: Option<&'static str> = Some("DecStep");
    const FAMILY2: Option<&'static str> = Some("ExpStep");

    fn name(&self) -> &str {
        "Step"
    }

    fn instantiate1(&self, rule: &DecStepRule) -> Result<DecInstance, String> {
        use DecStepRule::*;
        Ok(match rule {
            DMatch1 { env, pat, e, ep } => BiInstance {
                premises: vec![BiIndex::Second((env.clone(), e.clone(), ep.clone()))],
                conclusion: (
                    env.clone(),
                    Dec::matching(pat.clone(), e.clone()),
                    Dec::matching(pat.clone(), ep.clone()),
                ),
            },
            DMatch { env, pat, v, bound } => {
                matches_to(pat, v, bound)?;
                BiInstance {
                    premises: vec![],
                    conclusion: (env.clone(), Dec::matching(pat.clone(), v.clone()), Dec::Env(bound.clone())),
                }
            }
            DJoin1 { env, d1, d1p, d2 } => BiInstance {
                premises: vec![BiIndex::First((env.clone(), d1.clone(), d1p.clone()))],
                conclusion: (env.clone(), Dec::join(d1.clone(), d2.clone()), Dec::join(d1p.clone(), d2.clone())),
            },
            DJoin2 { env, left, d2, d2p } => BiInstance {
                premises: vec![BiIndex::First((env.union_right(left), d2.clone(), d2p.clone()))],
                conclusion: (
                    env.clone(),
                    Dec::join(Dec::Env(left.clone()), d2.clone()),
                    Dec::join(Dec::Env(left.clone()), d2p.clone()),
                ),
            },
            DJoin3 { env, left, right } => BiInstance {
                premises: vec![],
                conclusion: (
                    env.clone(),
                    Dec::join(Dec::Env(left.clone()), Dec::Env(right.clone())),
                    Dec::Env(left.union_right(right)),
                ),
            },
        })
    }

    fn instantiate2(&self, rule: &ExpStepRule) -> Result<ExpInstance, String> {
        use ExpStepRule::*;
        Ok(match rule {
            EVar { env, x } => {
                let v = env.get(x).ok_or_else(|| format!("`{x}` is not bound"))?;
                BiInstance { premises: vec![], conclusion: (env.clone(), Exp::Var(x.clone()), v.clone()) }
            }
            EApp1 { env, e1, e1p, e2 } => BiInstance {
                premises: vec![BiIndex::Second((env.clone(), e1.clone(), e1p.clone()))],
                conclusion: (env.clone(), Exp::app(e1.clone(), e2.clone()), Exp::app(e1p.clone(), e2.clone())),
            },
            EApp2 { env, v1, e2, e2p } => {
                require(v1.is_value(), || format!("{v1} is not a value"))?;
                BiInstance {
                    premises: vec![BiIndex::Second((env.clone(), e2.clone(), e2p.clone()))],
                    conclusion: (env.clone(), Exp::app(v1.clone(), e2.clone()), Exp::app(v1.clone(), e2p.clone())),
                }
            }
            EBeta { env, cenv, pat, body, arg, bound } => {
                matches_to(pat, arg, bound)?;
                BiInstance {
                    premises: vec![],
                    conclusion: (
                        env.clone(),
                        Exp::app(Exp::clos(cenv.clone(), pat.clone(), body.clone()), arg.clone()),
                        Exp::scope(Dec::Env(cenv.union_right(bound)), body.clone()),
                    ),
                }
            }
            EScope1 { env, d, dp, body } => BiInstance {
                premises: vec![BiIndex::First((env.clone(), d.clone(), dp.clone()))],
                conclusion: (env.clone(), Exp::scope(d.clone(), body.clone()), Exp::scope(dp.clone(), body.clone())),
            },
            EScope2 { env, local, body, bodyp } => BiInstance {
                premises: vec![BiIndex::Second((env.union_right(local), body.clone(), bodyp.clone()))],
                conclusion: (
                    env.clone(),
                    Exp::scope(Dec::Env(local.clone()), body.clone()),
                    Exp::scope(Dec::Env(local.clone()), bodyp.clone()),
                ),
            },
            EScope3 { env, local, v } => {
                require(v.is_value(), || format!("{v} is not a value"))?;
                BiInstance {
                    premises: vec![],
                    conclusion: (env.clone(), Exp::scope(Dec::Env(local.clone()), v.clone()), v.clone()),
                }
            }
        })
    }
}

fn dec_node(rule: DecStepRule, premises: Vec<BiPremise<DecStepIndex, ExpStepIndex, DecStep, ExpStep>>) -> DecStep {
    let conclusion = StepRules.instantiate1(&rule).expect("stepper instantiates valid rules").conclusion;
    din1(&StepRules, HNode::new(rule, premises, conclusion)).expect("stepper builds valid derivations")
}

fn exp_node(rule: ExpStepRule, premises: Vec<BiPremise<DecStepIndex, ExpStepIndex, DecStep, ExpStep>>) -> ExpStep {
    let conclusion = StepRules.instantiate2(&rule).expect("stepper instantiates valid rules").conclusion;
    din2(&StepRules, HNode::new(rule, premises, conclusion)).expect("stepper builds valid derivations")
}

fn first(d: DecStep) -> BiPremise<DecStepIndex, ExpStepIndex, DecStep, ExpStep> {
    BiPremise::First(d.conclusion().clone(), d)
}

fn second(d: ExpStep) -> BiPremise<DecStepIndex, ExpStepIndex, DecStep, ExpStep> {
    BiPremise::Second(d.conclusion().clone(), d)
}

/// One step of `e` under `env`, with its derivation. `None` for values and
/// for stuck expressions.
pub fn step_exp(env: &EnvE, e: &Exp) -> Option<(Exp, ExpStep)> {
    let d = step_exp_derivation(env, e)?;
    Some((d.conclusion().2.clone(), d))
}

/// One step of `d` under `env`. `None` for environments and stuck
/// declarations.
pub fn step_dec(env: &EnvE, d: &Dec) -> Option<(Dec, DecStep)> {
    let s = step_dec_derivation(env, d)?;
    Some((s.conclusion().2.clone(), s))
}

fn step_exp_derivation(env: &EnvE, e: &Exp) -> Option<ExpStep> {
    use ExpStepRule::*;
    let envc = || env.clone();
    match e {
        Exp::Var(x) => {
            env.get(x)?;
            Some(exp_node(EVar { env: envc(), x: x.clone() }, vec![]))
        }
        Exp::Con(..) | Exp::Clos(..) => None,
        Exp::App(e1, e2) => {
            if !e1.is_value() {
                let s = step_exp_derivation(env, e1)?;
                let e1p = s.conclusion().2.clone();
                let rule = EApp1 { env: envc(), e1: (**e1).clone(), e1p, e2: (**e2).clone() };
                return Some(exp_node(rule, vec![second(s)]));
            }
            if !e2.is_value() {
                let s = step_exp_derivation(env, e2)?;
                let e2p = s.conclusion().2.clone();
                let rule = EApp2 { env: envc(), v1: (**e1).clone(), e2: (**e2).clone(), e2p };
                return Some(exp_node(rule, vec![second(s)]));
            }
            match &**e1 {
                Exp::Clos(cenv, pat, body) => {
                    let bound = patmatch(pat, e2).ok()??;
                    let rule = EBeta {
                        env: envc(),
                        cenv: cenv.clone(),
                        pat: pat.clone(),
                        body: (**body).clone(),
                        arg: (**e2).clone(),
                        bound,
                    };
                    Some(exp_node(rule, vec![]))
                }
                _ => None,
            }
        }
        Exp::Scope(d, body) => match d.as_env() {
            None => {
                let s = step_dec_derivation(env, d)?;
                let dp = s.conclusion().2.clone();
                Some(exp_node(EScope1 { env: envc(), d: (**d).clone(), dp, body: (**body).clone() }, vec![first(s)]))
            }
            Some(local) if body.is_value() => {
                Some(exp_node(EScope3 { env: envc(), local: local.clone(), v: (**body).clone() }, vec![]))
            }
            Some(local) => {
                let s = step_exp_derivation(&env.union_right(local), body)?;
                let bodyp = s.conclusion().2.clone();
                let rule = EScope2 { env: envc(), local: local.clone(), body: (**body).clone(), bodyp };
                Some(exp_node(rule, vec![second(s)]))
            }
        },
    }
}

fn step_dec_derivation(env: &EnvE, d: &Dec) -> Option<DecStep> {
    use DecStepRule::*;
    match d {
        Dec::Env(_) => None,
        Dec::Match(pat, e) => {
            if !e.is_value() {
                let s = step_exp_derivation(env, e)?;
                let ep = s.conclusion().2.clone();
                let rule = DMatch1 { env: env.clone(), pat: pat.clone(), e: (**e).clone(), ep };
                return Some(dec_node(rule, vec![second(s)]));
            }
            let bound = patmatch(pat, e).ok()??;
            Some(dec_node(DMatch { env: env.clone(), pat: pat.clone(), v: (**e).clone(), bound }, vec![]))
        }
        Dec::Join(d1, d2) => match (d1.as_env(), d2.as_env()) {
            (None, _) => {
                let s = step_dec_derivation(env, d1)?;
                let d1p = s.conclusion().2.clone();
                let rule = DJoin1 { env: env.clone(), d1: (**d1).clone(), d1p, d2: (**d2).clone() };
                Some(dec_node(rule, vec![first(s)]))
            }
            (Some(left), None) => {
                let s = step_dec_derivation(&env.union_right(left), d2)?;
                let d2p = s.conclusion().2.clone();
                let rule = DJoin2 { env: env.clone(), left: left.clone(), d2: (**d2).clone(), d2p };
                Some(dec_node(rule, vec![first(s)]))
            }
            (Some(left), Some(right)) => {
                Some(dec_node(DJoin3 { env: env.clone(), left: left.clone(), right: right.clone() }, vec![]))
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::syntax::Typ;
    use crate::mutual::{validate1, validate2};

    fn c() -> Exp {
        Exp::con("c", Typ::var("a"))
    }

    #[test]
    fn variable_lookup() {
        let env = EnvE::singleton(Ident::new("x"), c());
        let (next, d) = step_exp(&env, &Exp::var("x")).unwrap();
        assert_eq!(next, c());
        assert_eq!(d.rule().rule_name(), "E-VAR");
        validate2(&StepRules, &d).unwrap();
        assert!(step_exp(&EnvE::empty(), &Exp::var("x")).is_none());
    }

    #[test]
    fn beta() {
        let f = Exp::clos(EnvE::empty(), Pat::var("x", Typ::var("a")), Exp::var("x"));
        let (next, d) = step_exp(&EnvE::empty(), &Exp::app(f, c())).unwrap();
        assert_eq!(next, Exp::scope(Dec::Env(EnvE::singleton(Ident::new("x"), c())), Exp::var("x")));
        assert_eq!(d.rule().rule_name(), "E-BETA");
        let (next, d) = step_exp(&EnvE::empty(), &next).unwrap();
        assert_eq!(d.rule().rule_name(), "E-SCOPE2");
        validate2(&StepRules, &d).unwrap();
        let (next, _) = step_exp(&EnvE::empty(), &next).unwrap();
        assert_eq!(next, c());
        assert!(step_exp(&EnvE::empty(), &next).is_none());
    }

    #[test]
    fn declarations() {
        let a = Typ::var("a");
        let (next, d) = step_dec(&EnvE::empty(), &Dec::matching(Pat::con("c", a.clone()), c())).unwrap();
        assert_eq!(next, Dec::Env(EnvE::empty()));
        assert_eq!(d.rule().rule_name(), "D-MATCH");
        let r1 = EnvE::singleton(Ident::new("x"), c());
        let r2 = EnvE::singleton(Ident::new("x"), Exp::con("d", a.clone()));
        let (next, d) = step_dec(&EnvE::empty(), &Dec::join(Dec::Env(r1.clone()), Dec::Env(r2.clone()))).unwrap();
        assert_eq!(next, Dec::Env(r2));
        validate1(&StepRules, &d).unwrap();
        assert!(step_dec(&EnvE::empty(), &Dec::Env(r1)).is_none());
        // match failure is stuck
        assert!(step_dec(&EnvE::empty(), &Dec::matching(Pat::con("d", a), c())).is_none());
    }

    #[test]
    fn forged_steps_are_rejected() {
        let env = EnvE::empty();
        let rule = ExpStepRule::EScope3 { env: env.clone(), local: env.clone(), v: Exp::var("x") };
        assert!(StepRules.instantiate2(&rule).is_err());
    }
}
