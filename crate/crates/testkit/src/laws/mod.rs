//! Law suites: each module's invariants, checked exhaustively on small
//! enumerations and by sampling beyond them.

use std::fmt::{self, Display};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::Mutation;

pub mod arith;
pub mod indexed;
pub mod kernel;
pub mod lang;
pub mod mutual;

/// Witnesses kept per law.
const MAX_WITNESSES: usize = 5;

/// The outcome of checking one law on a batch of instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub witnesses: Vec<String>,
}

impl LawResult {
    pub fn new(name: impl Into<String>) -> Self {
        LawResult { name: name.into(), checked: 0, failed: 0, witnesses: vec![] }
    }

    /// Records one instance; `witness` is only rendered on failure.
    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(witness());
        }
    }

    /// Records one instance whose check produced `Err(witness)` on failure.
    pub fn record(&mut self, r: Result<(), String>) {
        self.checked += 1;
        if let Err(w) = r {
            self.fail(w);
        }
    }

    pub(crate) fn fail(&mut self, witness: String) {
        self.failed += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: String,
    pub laws: Vec<LawResult>,
}

impl Report {
    pub fn new(suite: impl Into<String>, laws: Vec<LawResult>) -> Self {
        Report { suite: suite.into(), laws }
    }

    pub fn checked(&self) -> usize {
        self.laws.iter().map(|l| l.checked).sum()
    }

    pub fn failed(&self) -> usize {
        self.laws.iter().map(|l| l.failed).sum()
    }

    pub fn passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.name == name)
    }

    /// `{suite, checked, failed, witnesses, laws}`; witnesses are prefixed
    /// with the law that produced them.
    pub fn to_json(&self) -> serde_json::Value {
        let witnesses: Vec<String> =
            self.laws.iter().flat_map(|l| l.witnesses.iter().map(move |w| format!("{}: {w}", l.name))).collect();
        json!({
            "suite": self.suite,
            "checked": self.checked(),
            "failed": self.failed(),
            "witnesses": witnesses,
            "laws": self.laws,
        })
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.laws {
            let verdict = if l.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict} {}::{} checked={} failed={}", self.suite, l.name, l.checked, l.failed)?;
            for w in &l.witnesses {
                writeln!(f, "  witness: {w}")?;
            }
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict} {} checked={} failed={}", self.suite, self.checked(), self.failed())
    }
}

/// Sizes and the planted defect, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LawConfig {
    pub seed: u64,
    /// Depth bound for arithmetic enumerations.
    pub arith_depth: usize,
    /// Depth bound for language enumerations.
    pub lang_depth: usize,
    /// Sampled composite instances per functor law.
    pub samples: usize,
    /// Generated configurations for the preservation check.
    pub configs: usize,
    pub mutation: Mutation,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig { seed: 0, arith_depth: 4, lang_depth: 3, samples: 1000, configs: 200, mutation: Mutation::None }
    }
}

impl LawConfig {
    /// Smaller enumerations, for quick runs.
    pub fn small() -> Self {
        LawConfig { arith_depth: 3, lang_depth: 2, samples: 200, configs: 50, ..LawConfig::default() }
    }

    pub fn with_mutation(self, mutation: Mutation) -> Self {
        LawConfig { mutation, ..self }
    }

    pub(crate) fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(salt);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Kernel,
    Indexed,
    Mutual,
    Arith,
    Lang,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Kernel, Suite::Indexed, Suite::Mutual, Suite::Arith, Suite::Lang];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Indexed => "indexed",
            Suite::Mutual => "mutual",
            Suite::Arith => "arith",
            Suite::Lang => "lang",
        }
    }
}

impl Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite `{0}` (expected one of kernel, indexed, mutual, arith, lang)")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// Runs every law of `suite`.
pub fn law_suite(suite: Suite, cfg: &LawConfig) -> Report {
    let laws = match suite {
        Suite::Kernel => kernel::suite(cfg),
        Suite::Indexed => indexed::suite(cfg),
        Suite::Mutual => mutual::suite(cfg),
        Suite::Arith => arith::suite(cfg),
        Suite::Lang => lang::suite(cfg),
    };
    Report::new(suite.name(), laws)
}

/// Draws `n` elements with replacement.
pub(crate) fn sample<'a, T>(rng: &mut impl Rng, xs: &'a [T], n: usize) -> Vec<&'a T> {
    (0..n).filter_map(|_| xs.choose(rng)).collect()
}
