//! Preservation fuzzing: run generated configurations forward and rebuild
//! a typing after every step through subject reduction.

use std::path::Path;

use serde::{Deserialize, Serialize};

use mendler::lang::concrete::{parse_env_e, parse_phrase};
use mendler::lang::{
    step_phrase, subject_reduction, typecheck_env, typecheck_phrase, validate_typing, EnvE, EnvT, EnvTyping, Phrase,
    PhraseTyping, Typ, TypingRules,
};
use mendler::mutual::BiDerivation;

use crate::generate::{gen_well_typed_config, GenConfig};
use crate::Mutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    /// Maximum steps per configuration.
    pub fuel: usize,
    pub max_depth: usize,
    pub mutation: Mutation,
}

impl FuzzConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        FuzzConfig { seed, count, fuel: 50, max_depth: GenConfig::default().max_depth, mutation: Mutation::None }
    }
}

/// A state whose step could not be shown type preserving. `env` and
/// `phrase` are the state before the offending step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: u64,
    pub index: u64,
    pub step: usize,
    pub env: String,
    pub phrase: String,
    pub rule: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub count: usize,
    pub generated: usize,
    /// Indices for which no well-typed configuration was found.
    pub exhausted: Vec<u64>,
    pub steps: usize,
    /// Runs that reached a value or a stuck state within the fuel.
    pub finished: usize,
    pub counterexamples: Vec<Counterexample>,
}

struct Failure {
    step: usize,
    phrase: Phrase,
    rule: String,
    reason: String,
}

fn conclusion(d: &PhraseTyping) -> (EnvT, Phrase, Typ) {
    match d {
        BiDerivation::First(d) => {
            let (c, p, t) = d.conclusion();
            (c.clone(), Phrase::Dec(p.clone()), t.clone())
        }
        BiDerivation::Second(d) => {
            let (c, p, t) = d.conclusion();
            (c.clone(), Phrase::Exp(p.clone()), t.clone())
        }
    }
}

/// Checks one step from `p`; returns the successor and its typing, or
/// `None` when `p` does not step.
fn check_step(
    rules: &TypingRules,
    env: &EnvE,
    envd: &EnvTyping,
    ctx: &EnvT,
    ty: &Typ,
    p: &Phrase,
    typd: &PhraseTyping,
) -> Result<Option<(Phrase, PhraseTyping)>, (String, String)> {
    let Some((next, stepd)) = step_phrase(env, p) else { return Ok(None) };
    let nd = subject_reduction(rules, &stepd, envd, typd).map_err(|e| (e.rule, e.reason))?;
    validate_typing(rules, &nd).map_err(|e| ("validate".to_string(), e.to_string()))?;
    let (c, q, t) = conclusion(&nd);
    if (&c, &q, &t) != (ctx, &next, ty) {
        return Err(("conclusion".to_string(), format!("rebuilt typing concludes {c} |- {q} : {t}")));
    }
    match typecheck_phrase(rules, ctx, &next) {
        Ok((t2, _)) if &t2 == ty => {}
        Ok((t2, _)) => return Err(("typecheck".to_string(), format!("successor checks at {t2}, expected {ty}"))),
        Err(e) => return Err(("typecheck".to_string(), e.to_string())),
    }
    Ok(Some((next, nd)))
}

/// Runs `p` for at most `fuel` steps. Returns the number of steps taken and
/// whether the run stopped on its own.
fn run(
    rules: &TypingRules,
    env: &EnvE,
    envd: &EnvTyping,
    ctx: &EnvT,
    ty: &Typ,
    p: Phrase,
    typd: PhraseTyping,
    fuel: usize,
) -> Result<(usize, bool), Failure> {
    let (mut p, mut typd) = (p, typd);
    for step in 0..fuel {
        match check_step(rules, env, envd, ctx, ty, &p, &typd) {
            Ok(Some((q, d))) => (p, typd) = (q, d),
            Ok(None) => return Ok((step, true)),
            Err((rule, reason)) => return Err(Failure { step, phrase: p, rule, reason }),
        }
    }
    Ok((fuel, step_phrase(env, &p).is_none()))
}

pub fn fuzz_preservation(cfg: &FuzzConfig) -> FuzzReport {
    let rules = cfg.mutation.typing_rules();
    let gen = GenConfig { seed: cfg.seed, count: cfg.count, max_depth: cfg.max_depth, well_typed: true, rules };
    let mut report = FuzzReport { seed: cfg.seed, count: cfg.count, ..FuzzReport::default() };
    for index in 0..cfg.count as u64 {
        let c = match gen_well_typed_config(&gen, index) {
            Ok(c) => c,
            Err(_) => {
                report.exhausted.push(index);
                continue;
            }
        };
        report.generated += 1;
        match run(&rules, &c.env, &c.envd, &c.ctx, &c.ty, c.phrase, c.typd, cfg.fuel) {
            Ok((steps, done)) => {
                report.steps += steps;
                report.finished += done as usize;
            }
            Err(f) => {
                report.steps += f.step;
                report.counterexamples.push(Counterexample {
                    seed: cfg.seed,
                    index,
                    step: f.step,
                    env: c.env.to_string(),
                    phrase: f.phrase.to_string(),
                    rule: f.rule,
                    reason: f.reason,
                });
            }
        }
    }
    report
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("counterexample does not parse: {0}")]
    Parse(String),
    #[error("counterexample state is not well typed: {0}")]
    IllTyped(String),
}

/// Re-runs the offending step of a counterexample. `Ok(None)` means the
/// step now preserves types.
pub fn replay(cx: &Counterexample, mutation: Mutation) -> Result<Option<Counterexample>, ReplayError> {
    let rules = mutation.typing_rules();
    let env = parse_env_e(&cx.env).map_err(|e| ReplayError::Parse(e.to_string()))?;
    let p = parse_phrase(&cx.phrase).map_err(|e| ReplayError::Parse(e.to_string()))?;
    let (ctx, envd) = typecheck_env(&rules, &env).map_err(|e| ReplayError::IllTyped(e.to_string()))?;
    let (ty, typd) = typecheck_phrase(&rules, &ctx, &p).map_err(|e| ReplayError::IllTyped(e.to_string()))?;
    Ok(match check_step(&rules, &env, &envd, &ctx, &ty, &p, &typd) {
        Ok(_) => None,
        Err((rule, reason)) => Some(Counterexample { rule, reason, ..cx.clone() }),
    })
}

/// Writes each counterexample to `dir/cx-<seed>-<index>.json`.
pub fn dump(dir: &Path, report: &FuzzReport) -> std::io::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for cx in &report.counterexamples {
        let path = dir.join(format!("cx-{}-{}.json", cx.seed, cx.index));
        std::fs::write(&path, serde_json::to_string_pretty(cx).expect("counterexamples serialize"))?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sound_rules_have_no_counterexamples() {
        let r = fuzz_preservation(&FuzzConfig::new(5, 100));
        assert!(r.counterexamples.is_empty(), "{:?}", r.counterexamples.first());
        assert_eq!(r.generated, 100);
        assert!(r.steps > 100);
    }

    #[test]
    fn left_bias_is_caught_and_replays() {
        let cfg = FuzzConfig { mutation: Mutation::LeftBiasedTyping, ..FuzzConfig::new(5, 300) };
        let r = fuzz_preservation(&cfg);
        let cx = r.counterexamples.first().expect("left-biased typing should break preservation");
        let again = replay(cx, Mutation::LeftBiasedTyping).unwrap().expect("still fails");
        assert_eq!(again.rule, cx.rule);
        assert_eq!(replay(cx, Mutation::None).ok().flatten(), None);
    }
}
