//! End-to-end acceptance run. Each criterion prints one PASS or FAIL line
//! with its elapsed time against its budget; the test fails if any does.
//!
//! Shared fixtures (the depth-4 arithmetic enumeration with its
//! derivations, and the depth-3 language corpus with its derivations) are
//! built once and reported on their own line.
//!
//! Runs without the libtest harness so the report is always printed.

use std::time::{Duration, Instant};

use mendler::arith::{self, EvalSig};
use mendler::kernel::Term;
use mendler::lang::{lang_signature, StepRules, TypingRules};
use mendler_testkit::enumerate::{count_terms, lang_corpus, BiLevel, Pools};
use mendler_testkit::fuzz::{fuzz_preservation, FuzzConfig};
use mendler_testkit::laws::arith::{arith_cases, ArithCase};
use mendler_testkit::laws::mutual::{lang_derivations, Family};
use mendler_testkit::laws::{self, law_suite, LawConfig, LawResult, Suite};
use mendler_testkit::Mutation;

struct Fixtures {
    cfg: LawConfig,
    terms: Vec<Term>,
    cases: Vec<ArithCase>,
    lcorpus: BiLevel,
    typing: Family<TypingRules>,
    steps: Family<StepRules>,
}

fn summarize(laws: &[LawResult]) -> Result<String, String> {
    let checked: usize = laws.iter().map(|l| l.checked).sum();
    let empty: Vec<&str> = laws.iter().filter(|l| l.checked == 0).map(|l| l.name.as_str()).collect();
    let failed: Vec<String> = laws
        .iter()
        .filter(|l| !l.passed())
        .map(|l| {
            format!(
                "{} failed {}/{}: {}",
                l.name,
                l.failed,
                l.checked,
                l.witnesses.first().cloned().unwrap_or_default()
            )
        })
        .collect();
    if !failed.is_empty() {
        Err(failed.join("; "))
    } else if !empty.is_empty() {
        Err(format!("laws checked nothing: {}", empty.join(", ")))
    } else {
        Ok(format!("{} laws, {checked} checks", laws.len()))
    }
}

struct Run {
    results: Vec<bool>,
}

impl Run {
    fn criterion(&mut self, n: usize, name: &str, budget: Option<u64>, f: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let r = f();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= Duration::from_secs(b));
        let ok = r.is_ok() && in_time;
        let limit = budget.map_or("no limit".to_string(), |b| format!("limit {b}s"));
        let detail = match &r {
            Ok(d) if in_time => d.clone(),
            Ok(d) => format!("{d}; over time budget"),
            Err(e) => e.clone(),
        };
        println!(
            "{} criterion {n:>2} {name} ({:.2}s, {limit}) {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        self.results.push(ok);
    }
}

fn fixtures() -> Fixtures {
    let cfg = LawConfig::default();
    let cases = arith_cases(cfg.arith_depth);
    let terms: Vec<Term> = cases.iter().map(|c| c.term.clone()).collect();
    let lcorpus = lang_corpus(cfg.lang_depth);
    let (typing, steps) = lang_derivations(&lcorpus, &TypingRules::new());
    Fixtures { cfg, terms, cases, lcorpus, typing, steps }
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("mendler").chain(args.iter().copied());
    let code = mendler_cli::run(argv, &mut out, &mut err);
    (code, out, err)
}

fn main() {
    let start = Instant::now();
    let fx = fixtures();
    println!(
        "setup: {} arithmetic terms with derivations, {}+{} language terms, {}+{} typing and {}+{} step derivations ({:.2}s)",
        fx.terms.len(),
        fx.lcorpus.first.len(),
        fx.lcorpus.second.len(),
        fx.typing.first.len(),
        fx.typing.second.len(),
        fx.steps.first.len(),
        fx.steps.second.len(),
        start.elapsed().as_secs_f64()
    );
    assert_eq!(fx.terms.len() as u128, count_terms(arith::signature(), &Pools::arith(), 4));
    assert_eq!(fx.terms.len(), 819_030);
    let cfg = fx.cfg;
    let lsig = lang_signature();
    let rules = TypingRules::new();
    let mut run = Run { results: Vec::new() };

    run.criterion(1, "functor laws", Some(5), || {
        let mut l = laws::kernel::functor_suite(&cfg, &fx.terms);
        l.extend(laws::indexed::functor_suite(&cfg, &fx.cases));
        l.extend(laws::mutual::functor_suite(&cfg, &fx.lcorpus));
        l.extend(
            laws::mutual::derivation_laws(&rules, &fx.typing, cfg.mutation)
                .into_iter()
                .filter(|x| x.name.starts_with("hfmap")),
        );
        l.extend(
            laws::mutual::derivation_laws(&StepRules, &fx.steps, cfg.mutation)
                .into_iter()
                .filter(|x| x.name.starts_with("hfmap")),
        );
        summarize(&l)
    });

    run.criterion(2, "in/out round trips", Some(30), || {
        let mut l = laws::kernel::iso_laws(arith::signature(), &fx.terms);
        l.extend(laws::indexed::iso_suite(&fx.cases));
        l.extend(laws::mutual::iso_laws(lsig, &fx.lcorpus));
        l.extend(
            laws::mutual::derivation_laws(&rules, &fx.typing, cfg.mutation)
                .into_iter()
                .filter(|x| x.name.starts_with("din-dout")),
        );
        l.extend(
            laws::mutual::derivation_laws(&StepRules, &fx.steps, cfg.mutation)
                .into_iter()
                .filter(|x| x.name.starts_with("din-dout")),
        );
        summarize(&l)
    });

    run.criterion(3, "computation rules", Some(30), || {
        let mut l = laws::kernel::computation_laws(&fx.terms, cfg.mutation);
        l.extend(laws::indexed::fold_suite(&fx.cases));
        l.extend(laws::mutual::bifold_laws(lsig, &fx.lcorpus));
        l.extend(
            laws::mutual::derivation_laws(&rules, &fx.typing, cfg.mutation)
                .into_iter()
                .filter(|x| x.name.starts_with("hfold")),
        );
        l.extend(
            laws::mutual::derivation_laws(&StepRules, &fx.steps, cfg.mutation)
                .into_iter()
                .filter(|x| x.name.starts_with("hfold")),
        );
        summarize(&l)
    });

    run.criterion(4, "reify/reflect", Some(10), || summarize(&laws::kernel::representation_laws(&fx.terms)));

    run.criterion(5, "eval agrees with the oracle", Some(10), || summarize(&[laws::kernel::oracle_law(&fx.terms)]));

    run.criterion(6, "relational agreement", Some(10), || {
        let mut l = vec![laws::arith::eval_builder_law(&fx.terms)];
        l.extend(laws::arith::agreement_laws(&fx.cases, &EvalSig::default()));
        summarize(&l)
    });

    run.criterion(7, "preservation", Some(10), || summarize(&laws::arith::preservation_laws(&fx.cases)));

    run.criterion(8, "uniqueness", Some(5), || summarize(&laws::kernel::uniqueness_laws(&fx.terms)));

    run.criterion(9, "preservation fuzzing", Some(60), || {
        let r = fuzz_preservation(&FuzzConfig { fuel: 50, ..FuzzConfig::new(42, 1000) });
        match (r.generated, r.counterexamples.first()) {
            (1000, None) => Ok(format!("1000 configurations, {} steps, {} finished", r.steps, r.finished)),
            (g, None) => Err(format!("only {g} of 1000 configurations generated")),
            (_, Some(cx)) => Err(format!("{} counterexamples, first {cx:?}", r.counterexamples.len())),
        }
    });

    run.criterion(10, "mutations are caught", None, || {
        let small = LawConfig::small();
        let mut caught = Vec::new();
        for m in [Mutation::SwappedFmap, Mutation::LeftBiasedTyping, Mutation::DroppedEv2SideCondition] {
            let by: Vec<&str> = Suite::ALL
                .into_iter()
                .filter(|s| !law_suite(*s, &small.with_mutation(m)).passed())
                .map(Suite::name)
                .collect();
            if by.is_empty() {
                return Err(format!("{m} survives every suite"));
            }
            caught.push(format!("{m} by {}", by.join("+")));
        }
        Ok(caught.join(", "))
    });

    run.criterion(11, "round trips and determinism", Some(10), || {
        let (phrases, envs) = laws::lang::phrase_corpus(&cfg, &fx.lcorpus);
        let mut l = laws::lang::syntax_laws(&phrases, &envs);
        l.push(laws::arith::syntax_law(&fx.terms));
        let summary = summarize(&l)?;
        let argvs: [&[&str]; 6] = [
            &["dump", "lang", "--depth", "3", "--generated", "200"],
            &["dump", "arith", "--depth", "3"],
            &["fuzz-preservation", "--seed", "42", "--count", "100"],
            &["lang", "trace", "--emit-derivations", "(app (clos () (pvar x (ty a)) (var x)) (con c (ty a)))"],
            &["arith", "derive", "(add (lit 2) (add (lit -1) (lit 1)))"],
            &["laws", "--suite", "lang", "--small"],
        ];
        for argv in argvs {
            let first = run_cli(argv);
            let second = run_cli(argv);
            if first != second {
                return Err(format!("output of {argv:?} differs between runs"));
            }
            if first.0 != 0 {
                return Err(format!("{argv:?} exited {}", first.0));
            }
        }
        let (_, dumped, _) = run_cli(&["dump", "lang", "--depth", "3", "--generated", "200"]);
        let text = String::from_utf8(dumped).map_err(|e| e.to_string())?;
        let mut lines = 0;
        for line in text.lines() {
            let (code, out, _) = run_cli(&["lang", "parse", line]);
            if code != 0 || String::from_utf8_lossy(&out).trim_end() != line {
                return Err(format!("CLI does not reproduce {line}"));
            }
            lines += 1;
        }
        Ok(format!("{summary}; {lines} phrases through the CLI"))
    });

    let failed = run.results.iter().filter(|ok| !**ok).count();
    println!(
        "{} of {} criteria pass ({:.2}s)",
        run.results.len() - failed,
        run.results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
