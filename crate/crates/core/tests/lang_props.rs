use mendler::lang::concrete::parse_phrase;
use mendler::lang::{
    phrase_from_biterm, phrase_to_biterm, step_phrase, typecheck_env, typecheck_phrase, validate_typing, Dec, EnvE,
    EnvT, Exp, Ident, Pat, Phrase, StepRules, Typ, TypingRules,
};
use mendler::mutual::{validate1, validate2, BiDerivation};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["x", "y", "z"])
}

fn typ() -> BoxedStrategy<Typ> {
    prop::sample::select(vec!["a", "b"])
        .prop_map(Typ::var)
        .prop_recursive(3, 8, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Typ::arrow(a, b)),
                prop::collection::vec((name(), inner), 0..3)
                    .prop_map(|bs| Typ::env(bs.into_iter().map(|(x, t)| (Ident::new(x), t)).collect::<EnvT>())),
            ]
        })
        .boxed()
}

fn pat() -> BoxedStrategy<Pat> {
    prop_oneof![
        (name(), typ()).prop_map(|(x, t)| Pat::var(x, t)),
        (prop::sample::select(vec!["c", "d"]), typ()).prop_map(|(c, t)| Pat::con(c, t)),
    ]
    .prop_recursive(2, 6, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| Pat::app(a, b)))
    .boxed()
}

fn env(e: BoxedStrategy<Exp>) -> BoxedStrategy<EnvE> {
    prop::collection::vec((name(), e), 0..3)
        .prop_map(|bs| bs.into_iter().map(|(x, e)| (Ident::new(x), e)).collect::<EnvE>())
        .boxed()
}

fn exp() -> BoxedStrategy<Exp> {
    let leaf = prop_oneof![
        name().prop_map(Exp::var),
        (prop::sample::select(vec!["c", "d"]), typ()).prop_map(|(c, t)| Exp::con(c, t)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (env(inner.clone()), pat(), inner.clone()).prop_map(|(r, p, b)| Exp::clos(r, p, b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Exp::app(f, a)),
            (dec(inner.clone()), inner).prop_map(|(d, e)| Exp::scope(d, e)),
        ]
    })
    .boxed()
}

fn dec(e: BoxedStrategy<Exp>) -> BoxedStrategy<Dec> {
    prop_oneof![env(e.clone()).prop_map(Dec::env), (pat(), e).prop_map(|(p, e)| Dec::matching(p, e))]
        .prop_recursive(2, 4, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| Dec::join(a, b)))
        .boxed()
}

fn phrase() -> impl Strategy<Value = Phrase> {
    prop_oneof![exp().prop_map(Phrase::Exp), dec(exp()).prop_map(Phrase::Dec)]
}

/// A closed value environment binding some names to constructors.
fn values() -> impl Strategy<Value = EnvE> {
    prop::collection::vec((name(), prop::sample::select(vec!["a", "b"])), 0..3)
        .prop_map(|bs| bs.into_iter().map(|(x, a)| (Ident::new(x), Exp::con("k", Typ::var(a)))).collect::<EnvE>())
}

fn validate_step(d: &BiDerivation<StepRules>) -> bool {
    match d {
        BiDerivation::First(s) => validate1(&StepRules, s).is_ok(),
        BiDerivation::Second(s) => validate2(&StepRules, s).is_ok(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn concrete_syntax_round_trips(p in phrase()) {
        let printed = p.to_string();
        prop_assert_eq!(parse_phrase(&printed).unwrap(), p.clone());
        prop_assert_eq!(parse_phrase(&printed).unwrap().to_string(), printed);
    }

    #[test]
    fn encoding_round_trips(p in phrase()) {
        prop_assert_eq!(phrase_from_biterm(&phrase_to_biterm(&p)).unwrap(), p);
    }

    #[test]
    fn typechecking_is_deterministic_and_validates(r in values(), p in phrase()) {
        let rules = TypingRules::new();
        let (ctx, _) = typecheck_env(&rules, &r).unwrap();
        let first = typecheck_phrase(&rules, &ctx, &p);
        let second = typecheck_phrase(&rules, &ctx, &p);
        prop_assert_eq!(first.is_ok(), second.is_ok());
        if let (Ok((t1, d1)), Ok((t2, d2))) = (first, second) {
            prop_assert_eq!(t1, t2);
            prop_assert!(validate_typing(&rules, &d1).is_ok());
            prop_assert_eq!(d1.to_json(), d2.to_json());
        }
    }

    #[test]
    fn steps_carry_valid_derivations(r in values(), p in phrase()) {
        if let Some((q, d)) = step_phrase(&r, &p) {
            prop_assert!(!p.is_final());
            prop_assert!(validate_step(&d), "invalid step {} -> {}", p, q);
            prop_assert_eq!(step_phrase(&r, &p).map(|(q2, _)| q2), Some(q));
        }
    }

    #[test]
    fn final_phrases_do_not_step(r in values(), p in phrase()) {
        if p.is_final() {
            prop_assert!(step_phrase(&r, &p).is_none());
        }
    }

    #[test]
    fn well_typed_steps_preserve_types(r in values(), p in phrase()) {
        let rules = TypingRules::new();
        let (ctx, envd) = typecheck_env(&rules, &r).unwrap();
        if let (Ok((ty, typd)), Some((q, stepd))) = (typecheck_phrase(&rules, &ctx, &p), step_phrase(&r, &p)) {
            let next = mendler::lang::subject_reduction(&rules, &stepd, &envd, &typd).unwrap();
            prop_assert!(validate_typing(&rules, &next).is_ok());
            prop_assert_eq!(typecheck_phrase(&rules, &ctx, &q).unwrap().0, ty);
        }
    }
}
