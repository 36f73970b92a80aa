//! Laws of the case-study language: surface syntax, encoding, typing,
//! stepping and subject reduction.

use mendler::lang::concrete::{parse_env_e, parse_phrase};
use mendler::lang::{
    phrase_from_biterm, phrase_to_biterm, step_phrase, typecheck_phrase, validate_typing, EnvE, EnvT, Ident, Phrase,
    PhraseStep, StepRules, Typ, TypingRules,
};
use mendler::mutual::{validate1, validate2, BiDerivation};

use super::{LawConfig, LawResult};
use crate::enumerate::{lang_corpus, BiLevel};
use crate::fuzz::{fuzz_preservation, FuzzConfig};
use crate::generate::{gen_corpus, gen_phrase, Config, GenConfig};

pub fn validate_step(d: &PhraseStep) -> Result<(), String> {
    match d {
        BiDerivation::First(d) => validate1(&StepRules, d),
        BiDerivation::Second(d) => validate2(&StepRules, d),
    }
    .map_err(|e| e.to_string())
}

/// Every phrase of the enumerated corpus, plus generated phrases (typable
/// and arbitrary) and their environments.
pub fn phrase_corpus(cfg: &LawConfig, corpus: &BiLevel) -> (Vec<Phrase>, Vec<EnvE>) {
    let mut phrases: Vec<Phrase> = corpus.iter().filter_map(|t| phrase_from_biterm(t).ok()).collect();
    let gen =
        GenConfig { seed: cfg.seed, count: cfg.configs, rules: cfg.mutation.typing_rules(), ..GenConfig::default() };
    let configs = gen_corpus(&gen);
    let mut envs: Vec<EnvE> = configs.iter().map(|c| c.env.clone()).collect();
    phrases.extend(configs.into_iter().map(|c| c.phrase));
    let arbitrary = GenConfig { well_typed: false, ..gen };
    for i in 0..cfg.configs as u64 {
        let (env, p) = gen_phrase(&arbitrary, i);
        envs.push(env);
        phrases.push(p);
    }
    (phrases, envs)
}

/// `parse (print p) = p` for phrases and environments.
pub fn syntax_laws(phrases: &[Phrase], envs: &[EnvE]) -> Vec<LawResult> {
    let mut ph = LawResult::new("parse-print-phrase");
    for p in phrases {
        let s = p.to_string();
        ph.check(parse_phrase(&s).as_ref() == Ok(p), || format!("{s} does not read back"));
    }
    let mut en = LawResult::new("parse-print-env");
    for e in envs {
        let s = e.to_string();
        en.check(parse_env_e(&s).as_ref() == Ok(e), || format!("{s} does not read back"));
    }
    vec![ph, en]
}

/// The generic encoding and the syntax tree are mutually inverse.
pub fn encoding_laws(corpus: &BiLevel, phrases: &[Phrase]) -> Vec<LawResult> {
    let mut to = LawResult::new("encode-decode-term");
    for t in corpus.iter() {
        to.check(phrase_from_biterm(t).is_ok_and(|p| &phrase_to_biterm(&p) == t), || {
            format!("{t} does not round-trip")
        });
    }
    let mut from = LawResult::new("encode-decode-phrase");
    for p in phrases {
        from.check(phrase_from_biterm(&phrase_to_biterm(p)).as_ref() == Ok(p), || format!("{p} does not round-trip"));
    }
    vec![to, from]
}

/// Typing is a deterministic function whose derivations validate and
/// conclude at the input; stepping likewise, and values do not step.
pub fn judgement_laws(rules: &TypingRules, phrases: &[Phrase], envs: &[EnvE]) -> Vec<LawResult> {
    let mut typing = LawResult::new("typing-sound-deterministic");
    let mut stepping = LawResult::new("step-sound-deterministic");
    let mut values = LawResult::new("values-do-not-step");
    let ctxs: Vec<EnvT> = vec![EnvT::empty(), [(Ident::new("x"), Typ::var("a"))].into_iter().collect()];
    let empty = EnvE::empty();
    for p in phrases {
        for ctx in &ctxs {
            let once = typecheck_phrase(rules, ctx, p);
            let twice = typecheck_phrase(rules, ctx, p);
            typing.record(match (&once, &twice) {
                (Ok((t, d)), Ok((t2, d2))) if t == t2 && d == d2 => {
                    validate_typing(rules, d).map_err(|e| format!("{p}: {e}"))
                }
                (Err(_), Err(_)) => Ok(()),
                _ => Err(format!("{p}: typing differs between runs")),
            });
        }
        for env in envs.iter().take(1).chain([&empty]) {
            let once = step_phrase(env, p);
            let twice = step_phrase(env, p);
            stepping.record(match (&once, &twice) {
                (Some((q, d)), Some((q2, d2))) if q == q2 && d == d2 => {
                    validate_step(d).map_err(|e| format!("{p}: {e}"))
                }
                (None, None) => Ok(()),
                _ => Err(format!("{p}: stepping differs between runs")),
            });
            if let Phrase::Exp(e) = p {
                if e.is_value() {
                    values.check(once.is_none(), || format!("value {p} steps"));
                }
            }
        }
    }
    vec![typing, stepping, values]
}

/// Subject reduction over generated configurations.
pub fn preservation_law(cfg: &LawConfig) -> LawResult {
    let fuzz = FuzzConfig { mutation: cfg.mutation, ..FuzzConfig::new(cfg.seed, cfg.configs) };
    let report = fuzz_preservation(&fuzz);
    let mut law = LawResult::new("subject-reduction");
    law.checked = report.steps + report.counterexamples.len();
    for cx in &report.counterexamples {
        law.fail(format!(
            "seed {} index {} step {}: {} at {}: {}",
            cx.seed, cx.index, cx.step, cx.phrase, cx.rule, cx.reason
        ));
    }
    law
}

/// Starting points of the generated corpus, for callers outside the suite.
pub fn configs(cfg: &LawConfig) -> Vec<Config> {
    gen_corpus(&GenConfig {
        seed: cfg.seed,
        count: cfg.configs,
        rules: cfg.mutation.typing_rules(),
        ..GenConfig::default()
    })
}

pub fn suite(cfg: &LawConfig) -> Vec<LawResult> {
    let corpus = lang_corpus(cfg.lang_depth);
    let (phrases, envs) = phrase_corpus(cfg, &corpus);
    let mut out = syntax_laws(&phrases, &envs);
    out.extend(encoding_laws(&corpus, &phrases));
    out.extend(judgement_laws(&cfg.mutation.typing_rules(), &phrases, &envs));
    out.push(preservation_law(cfg));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mutation;

    #[test]
    fn lang_laws_hold() {
        for law in suite(&LawConfig::small()) {
            assert!(law.passed(), "{law:?}");
            assert!(law.checked > 0, "{}", law.name);
        }
    }

    #[test]
    fn left_bias_is_caught() {
        let cfg = LawConfig { configs: 300, ..LawConfig::small() }.with_mutation(Mutation::LeftBiasedTyping);
        assert!(preservation_law(&cfg).failed > 0);
    }
}
