//! Seeded generation of language configurations.
//!
//! Well-typed generation is type-directed: pick a type, then grow a phrase
//! of that type. The result is then run through the typechecker, which
//! supplies the derivations; a disagreement counts as a failed attempt.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use mendler::lang::{
    typecheck_env, typecheck_phrase, Dec, EnvE, EnvT, EnvTyping, Exp, Ident, Pat, Phrase, PhraseTyping, Typ,
    TypingRules,
};

/// Attempts per configuration before generation gives up.
pub const RETRY_BUDGET: usize = 1000;

const VARS: [&str; 2] = ["x", "y"];
const CONS: [&str; 3] = ["c", "d", "k"];
const BASE: [&str; 2] = ["a", "b"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub count: usize,
    /// Depth budget for generated phrases.
    pub max_depth: usize,
    /// When false, phrases are arbitrary and may be untypable.
    pub well_typed: bool,
    pub rules: TypingRules,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 0, count: 1, max_depth: 4, well_typed: true, rules: TypingRules::default() }
    }
}

impl GenConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        GenConfig { seed, count, ..GenConfig::default() }
    }
}

/// A well-typed starting point: `envd : TypOEnv (env, ctx)` and
/// `typd : ctx |- phrase : ty`.
#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    pub index: u64,
    pub env: EnvE,
    pub ctx: EnvT,
    pub envd: EnvTyping,
    pub phrase: Phrase,
    pub ty: Typ,
    pub typd: PhraseTyping,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("no well-typed configuration for seed {seed}, index {index} within {attempts} attempts")]
pub struct GenExhausted {
    pub seed: u64,
    pub index: u64,
    pub attempts: usize,
}

/// The generator for configuration `index` of `seed`. Each index has its
/// own stream, so configurations can be regenerated independently.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    rules: TypingRules,
}

impl Gen<'_> {
    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(self.rng).expect("non-empty choice")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn ident(&mut self, pool: &[&str]) -> Ident {
        Ident::new(self.pick(pool))
    }

    fn base(&mut self) -> Typ {
        Typ::var(self.pick(&BASE))
    }

    fn typ(&mut self, depth: usize) -> Typ {
        if depth == 0 || self.chance(0.6) {
            self.base()
        } else {
            Typ::arrow(self.typ(depth - 1), self.typ(depth - 1))
        }
    }

    /// A closed data value whose head constructor produces `ty`.
    fn data_value(&mut self, ty: &Typ, fuel: usize) -> Exp {
        if fuel == 0 || self.chance(0.5) {
            return Exp::Con(self.ident(&CONS), ty.clone());
        }
        let arg_ty = self.typ(1);
        let head = self.data_value(&Typ::arrow(arg_ty.clone(), ty.clone()), fuel - 1);
        let arg = self.value(&arg_ty, fuel - 1);
        Exp::app(head, arg)
    }

    /// A closed value of type `ty`.
    fn value(&mut self, ty: &Typ, fuel: usize) -> Exp {
        if let (Some((a, r)), true) = (ty.as_arrow(), fuel > 0) {
            if self.chance(0.5) {
                let (env, env_ty) = self.env(fuel - 1);
                let mut used = BTreeSet::new();
                let pat = self.pat(a, fuel - 1, &mut used);
                let inner = self.rules.union(&env_ty, &pat.bindings().expect("generated patterns are linear"));
                let body = self.exp(&inner, r, fuel - 1);
                return Exp::clos(env, pat, body);
            }
        }
        self.data_value(ty, fuel)
    }

    /// A value environment with its types.
    fn env(&mut self, fuel: usize) -> (EnvE, EnvT) {
        let mut vals = Vec::new();
        let mut tys = Vec::new();
        for x in VARS {
            if self.chance(0.5) {
                let t = self.typ(1);
                vals.push((Ident::new(x), self.value(&t, fuel)));
                tys.push((Ident::new(x), t));
            }
        }
        (vals.into_iter().collect(), tys.into_iter().collect())
    }

    /// A linear pattern checked at `ty`.
    fn pat(&mut self, ty: &Typ, fuel: usize, used: &mut BTreeSet<Ident>) -> Pat {
        let roll: f64 = self.rng.gen();
        if fuel > 0 && roll < 0.25 {
            let arg_ty = self.typ(1);
            let p1 = self.pat(&Typ::arrow(arg_ty.clone(), ty.clone()), fuel - 1, used);
            let p2 = self.pat(&arg_ty, fuel - 1, used);
            return Pat::app(p1, p2);
        }
        let x = self.ident(&VARS);
        if roll < 0.75 && used.insert(x.clone()) {
            Pat::Var(x, ty.clone())
        } else {
            Pat::Con(self.ident(&CONS), ty.clone())
        }
    }

    /// A pattern that matches the value `v` of type `ty`.
    fn pat_for(&mut self, v: &Exp, ty: &Typ, used: &mut BTreeSet<Ident>) -> Pat {
        let x = self.ident(&VARS);
        if self.chance(0.4) && used.insert(x.clone()) {
            return Pat::Var(x, ty.clone());
        }
        match v {
            Exp::Con(c, t) => Pat::Con(c.clone(), t.clone()),
            Exp::App(h, a) => {
                let head_ty = h.data_type().expect("data values have a head type");
                let arg_ty = head_ty.as_arrow().expect("applied heads have arrow types").0.clone();
                let p1 = self.pat_for(h, &head_ty, used);
                let p2 = self.pat_for(a, &arg_ty, used);
                Pat::app(p1, p2)
            }
            _ => {
                let fresh = VARS.iter().map(|x| Ident::new(x)).find(|x| !used.contains(x));
                match fresh {
                    Some(x) => {
                        used.insert(x.clone());
                        Pat::Var(x, ty.clone())
                    }
                    None => Pat::Var(Ident::new("z"), ty.clone()),
                }
            }
        }
    }

    fn exp(&mut self, ctx: &EnvT, ty: &Typ, fuel: usize) -> Exp {
        let vars: Vec<Ident> = ctx.iter().filter(|(_, t)| *t == ty).map(|(x, _)| x.clone()).collect();
        if fuel == 0 {
            if !vars.is_empty() && self.chance(0.7) {
                return Exp::Var(self.pick(&vars).clone());
            }
            return self.value(ty, 0);
        }
        match self.rng.gen_range(0..10) {
            0..=1 if !vars.is_empty() => Exp::Var(self.pick(&vars).clone()),
            0..=2 => self.value(ty, fuel - 1),
            3..=5 => {
                let arg_ty = self.typ(1);
                let f = self.exp(ctx, &Typ::arrow(arg_ty.clone(), ty.clone()), fuel - 1);
                let a = self.exp(ctx, &arg_ty, fuel - 1);
                Exp::app(f, a)
            }
            _ => {
                let (d, local) = self.dec(ctx, fuel - 1);
                let body = self.exp(&self.rules.union(ctx, &local), ty, fuel - 1);
                Exp::scope(d, body)
            }
        }
    }

    fn dec(&mut self, ctx: &EnvT, fuel: usize) -> (Dec, EnvT) {
        match self.rng.gen_range(0..10) {
            0..=2 => {
                let (env, tys) = self.env(fuel.saturating_sub(1));
                (Dec::Env(env), tys)
            }
            3..=7 => {
                let ty = self.typ(1);
                let mut used = BTreeSet::new();
                let (pat, e) = if self.chance(0.5) {
                    let v = self.value(&ty, fuel.saturating_sub(1));
                    (self.pat_for(&v, &ty, &mut used), v)
                } else {
                    let e = self.exp(ctx, &ty, fuel.saturating_sub(1));
                    (self.pat(&ty, 1, &mut used), e)
                };
                let b = pat.bindings().expect("generated patterns are linear");
                (Dec::matching(pat, e), b)
            }
            _ if fuel > 0 => {
                let (d1, g1) = self.dec(ctx, fuel - 1);
                let (d2, g2) = self.dec(&self.rules.union(ctx, &g1), fuel - 1);
                (Dec::join(d1, d2), self.rules.union(&g1, &g2))
            }
            _ => (Dec::Env(EnvE::empty()), EnvT::empty()),
        }
    }

    /// An arbitrary phrase, typable or not.
    fn any_exp(&mut self, fuel: usize) -> Exp {
        let t = self.typ(1);
        match if fuel == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..5) } {
            0 => Exp::Var(self.ident(&VARS)),
            1 => Exp::Con(self.ident(&CONS), t),
            2 => {
                let mut used = BTreeSet::new();
                let pat = self.pat(&t, 1, &mut used);
                Exp::clos(EnvE::empty(), pat, self.any_exp(fuel - 1))
            }
            3 => Exp::app(self.any_exp(fuel - 1), self.any_exp(fuel - 1)),
            _ => Exp::scope(self.any_dec(fuel - 1), self.any_exp(fuel - 1)),
        }
    }

    fn any_dec(&mut self, fuel: usize) -> Dec {
        match if fuel == 0 { 0 } else { self.rng.gen_range(0..3) } {
            0 => Dec::Env(EnvE::empty()),
            1 => {
                let mut used = BTreeSet::new();
                let t = self.typ(1);
                Dec::matching(self.pat(&t, 1, &mut used), self.any_exp(fuel - 1))
            }
            _ => Dec::join(self.any_dec(fuel - 1), self.any_dec(fuel - 1)),
        }
    }
}

fn attempt(rng: &mut ChaCha8Rng, cfg: &GenConfig, index: u64) -> Option<Config> {
    let mut g = Gen { rng, rules: cfg.rules };
    let (env, _) = g.env(cfg.max_depth.saturating_sub(2));
    let (ctx, envd) = typecheck_env(&cfg.rules, &env).ok()?;
    let (phrase, ty) = if g.chance(0.75) {
        let ty = g.typ(2);
        (Phrase::Exp(g.exp(&ctx, &ty, cfg.max_depth)), ty)
    } else {
        let (d, local) = g.dec(&ctx, cfg.max_depth);
        (Phrase::Dec(d), Typ::Env(local))
    };
    let (got, typd) = typecheck_phrase(&cfg.rules, &ctx, &phrase).ok()?;
    (got == ty).then_some(Config { seed: cfg.seed, index, env, ctx, envd, phrase, ty, typd })
}

/// Configuration number `index` of the corpus for `cfg.seed`.
pub fn gen_well_typed_config(cfg: &GenConfig, index: u64) -> Result<Config, GenExhausted> {
    let mut rng = rng_for(cfg.seed, index);
    for _ in 0..RETRY_BUDGET {
        if let Some(c) = attempt(&mut rng, cfg, index) {
            return Ok(c);
        }
    }
    Err(GenExhausted { seed: cfg.seed, index, attempts: RETRY_BUDGET })
}

/// An arbitrary, possibly ill-typed phrase under an arbitrary environment.
pub fn gen_phrase(cfg: &GenConfig, index: u64) -> (EnvE, Phrase) {
    let mut rng = rng_for(cfg.seed, index);
    let mut g = Gen { rng: &mut rng, rules: cfg.rules };
    let (env, _) = g.env(1);
    let p = if g.chance(0.75) { Phrase::Exp(g.any_exp(cfg.max_depth)) } else { Phrase::Dec(g.any_dec(cfg.max_depth)) };
    (env, p)
}

/// The first `cfg.count` configurations; exhausted indices are skipped.
pub fn gen_corpus(cfg: &GenConfig) -> Vec<Config> {
    (0..cfg.count as u64).filter_map(|i| gen_well_typed_config(cfg, i).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use mendler::indexed::validate;
    use mendler::lang::{validate_typing, EnvTypingSig};

    #[test]
    fn configurations_validate() {
        let cfg = GenConfig::new(1, 50);
        for c in gen_corpus(&cfg) {
            validate(&EnvTypingSig { rules: cfg.rules }, &c.envd).unwrap();
            validate_typing(&cfg.rules, &c.typd).unwrap();
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a: Vec<String> = gen_corpus(&GenConfig::new(7, 20)).iter().map(|c| c.phrase.to_string()).collect();
        let b: Vec<String> = gen_corpus(&GenConfig::new(7, 20)).iter().map(|c| c.phrase.to_string()).collect();
        let c: Vec<String> = gen_corpus(&GenConfig::new(8, 20)).iter().map(|c| c.phrase.to_string()).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn untyped_mode_is_arbitrary() {
        let cfg = GenConfig { well_typed: false, ..GenConfig::new(3, 100) };
        let untypable = (0..100)
            .map(|i| gen_phrase(&cfg, i))
            .filter(|(env, p)| {
                typecheck_env(&cfg.rules, env).and_then(|(ctx, _)| typecheck_phrase(&cfg.rules, &ctx, p)).is_err()
            })
            .count();
        assert!(untypable > 0);
    }
}
