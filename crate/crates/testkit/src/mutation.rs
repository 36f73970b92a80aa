use std::fmt;
use std::str::FromStr;

use mendler::arith::EvalSig;
use mendler::lang::{Bias, TypingRules};

/// A deliberate defect, planted to check that the law suites notice it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mutation {
    #[default]
    None,
    /// The functor action swaps the first two recursive slots.
    SwappedFmap,
    /// Context union prefers the left operand.
    LeftBiasedTyping,
    /// EV-2 no longer checks that the value is the sum.
    DroppedEv2SideCondition,
}

impl Mutation {
    pub const ALL: [Mutation; 4] =
        [Mutation::None, Mutation::SwappedFmap, Mutation::LeftBiasedTyping, Mutation::DroppedEv2SideCondition];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::SwappedFmap => "swapped-fmap",
            Mutation::LeftBiasedTyping => "left-biased-typing",
            Mutation::DroppedEv2SideCondition => "dropped-ev2-side-condition",
        }
    }

    pub fn typing_rules(self) -> TypingRules {
        match self {
            Mutation::LeftBiasedTyping => TypingRules::with_bias(Bias::Left),
            _ => TypingRules::new(),
        }
    }

    pub fn eval_sig(self) -> EvalSig {
        match self {
            Mutation::DroppedEv2SideCondition => EvalSig::without_sum_check(),
            _ => EvalSig::default(),
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown mutation `{0}`")]
pub struct UnknownMutation(pub String);

impl FromStr for Mutation {
    type Err = UnknownMutation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| UnknownMutation(s.to_string()))
    }
}
