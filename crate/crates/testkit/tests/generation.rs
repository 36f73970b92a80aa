use mendler::arith;
use mendler::lang::{step_phrase, subject_reduction, typecheck_phrase, validate_typing, Phrase};
use mendler::mutual::BiDerivation;
use mendler_testkit::enumerate::{count_terms, enumerate_terms, Pools};
use mendler_testkit::fuzz::{fuzz_preservation, FuzzConfig};
use mendler_testkit::generate::{gen_well_typed_config, GenConfig};
use mendler_testkit::laws::lang::validate_step;
use mendler_testkit::laws::{law_suite, LawConfig, Suite};
use mendler_testkit::Mutation;
use proptest::prelude::*;

/// Terms of depth at most `d`: five literals, or an addition of two
/// shallower terms.
fn expected_count(d: usize) -> u128 {
    if d == 0 {
        0
    } else {
        5 + expected_count(d - 1).pow(2)
    }
}

#[test]
fn arithmetic_enumeration_sizes() {
    let sig = arith::signature();
    let pools = Pools::arith();
    for d in 1..=4 {
        assert_eq!(count_terms(sig, &pools, d), expected_count(d), "depth {d}");
    }
    assert_eq!([1, 2, 3, 4].map(expected_count), [5, 30, 905, 819_030]);
    for d in 1..=3 {
        let ts = enumerate_terms(sig, &pools, d);
        assert_eq!(ts.len() as u128, expected_count(d));
        let distinct: std::collections::HashSet<String> = ts.iter().map(arith::print).collect();
        assert_eq!(distinct.len(), ts.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_configurations_are_well_typed(seed in any::<u64>(), index in 0u64..1000) {
        let cfg = GenConfig::new(seed, 1);
        let Ok(c) = gen_well_typed_config(&cfg, index) else { return Ok(()) };
        let rules = cfg.rules;
        prop_assert!(validate_typing(&rules, &c.typd).is_ok());
        prop_assert_eq!(&typecheck_phrase(&rules, &c.ctx, &c.phrase).unwrap().0, &c.ty);

        let (mut p, mut typd) = (c.phrase.clone(), c.typd.clone());
        for _ in 0..50 {
            let Some((q, stepd)) = step_phrase(&c.env, &p) else { break };
            prop_assert!(validate_step(&stepd).is_ok());
            typd = subject_reduction(&rules, &stepd, &c.envd, &typd).unwrap();
            prop_assert!(validate_typing(&rules, &typd).is_ok());
            let (at, ty) = match &typd {
                BiDerivation::First(d) => (Phrase::Dec(d.conclusion().1.clone()), &d.conclusion().2),
                BiDerivation::Second(d) => (Phrase::Exp(d.conclusion().1.clone()), &d.conclusion().2),
            };
            prop_assert_eq!(&at, &q);
            prop_assert_eq!(ty, &c.ty);
            p = q;
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), index in 0u64..1000) {
        let cfg = GenConfig::new(seed, 1);
        let a = gen_well_typed_config(&cfg, index).map(|c| (c.env.to_string(), c.phrase.to_string()));
        let b = gen_well_typed_config(&cfg, index).map(|c| (c.env.to_string(), c.phrase.to_string()));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn fuzzing_finds_nothing_without_a_defect() {
    let r = fuzz_preservation(&FuzzConfig::new(1, 100));
    assert_eq!(r.generated + r.exhausted.len(), 100);
    assert!(r.counterexamples.is_empty(), "{:?}", r.counterexamples.first());
    assert!(r.steps > 0);
}

#[test]
fn fuzzing_catches_biased_typing() {
    let r = fuzz_preservation(&FuzzConfig { mutation: Mutation::LeftBiasedTyping, ..FuzzConfig::new(5, 300) });
    assert!(!r.counterexamples.is_empty());
}

#[test]
fn small_suites_pass() {
    for s in Suite::ALL {
        let r = law_suite(s, &LawConfig::small());
        assert!(r.passed(), "{s}: {}", r.to_json());
        assert!(r.checked() > 0, "{s}");
    }
}

#[test]
fn every_mutation_is_caught_somewhere() {
    for m in [Mutation::SwappedFmap, Mutation::LeftBiasedTyping, Mutation::DroppedEv2SideCondition] {
        let cfg = LawConfig::small().with_mutation(m);
        assert!(Suite::ALL.into_iter().any(|s| !law_suite(s, &cfg).passed()), "{m} survives");
    }
}
