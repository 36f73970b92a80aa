//! The `mendler` command line. All I/O of the workspace happens here; the
//! commands themselves are thin wrappers over `mendler` and
//! `mendler-testkit`.
//!
//! Exit codes: 0 on success, 1 on a domain failure (ill-typed input,
//! invalid derivation, failing law, counterexample), 2 on a usage error.
//! Data goes to `out`, diagnostics to `err`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mendler::arith::{self, EvalSig, IsTrmSig, TypOfSig};
use mendler::indexed::{validate, RuleName};
use mendler::lang::concrete::{parse_env_e, parse_phrase};
use mendler::lang::{
    lang_signature, pat_signature, phrase_from_biterm, phrase_to_biterm, step_phrase, typ_signature, typecheck_env,
    typecheck_phrase, validate_typing, EnvE, EnvT, Phrase, PhraseStep, TypingRules,
};
use mendler::mutual::BiDerivation;
use mendler_testkit::enumerate::{enumerate_terms, lang_corpus, Pools};
use mendler_testkit::fuzz::{self, Counterexample, FuzzConfig};
use mendler_testkit::generate::{gen_well_typed_config, GenConfig};
use mendler_testkit::laws::lang::validate_step;
use mendler_testkit::laws::{law_suite, LawConfig, Suite};
use mendler_testkit::Mutation;

/// Environment variable consulted for the default step budget.
pub const FUEL_VAR: &str = "MENDLER_FUEL";
const DEFAULT_FUEL: usize = 50;

#[derive(Parser, Debug)]
#[command(name = "mendler", version, about = "Modular datatypes, derivations and preservation checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integer literals and addition.
    #[command(subcommand)]
    Arith(ArithCmd),
    /// Same as `arith eval`.
    EvalArith { term: String },
    /// The small functional language with first-class environments.
    #[command(subcommand)]
    Lang(LangCmd),
    /// Run a law suite.
    Laws(LawsArgs),
    /// Generate well-typed configurations and check every step preserves types.
    FuzzPreservation(FuzzArgs),
    /// Print signatures or enumerated corpora.
    #[command(subcommand)]
    Dump(DumpCmd),
}

#[derive(Subcommand, Debug)]
enum ArithCmd {
    /// Evaluate a term, e.g. `(add (lit 2) (lit 3))`.
    Eval { term: String },
    /// Print a derivation of one of the arithmetic relations as JSON.
    Derive {
        #[arg(long, value_enum, default_value_t = Relation::Eval)]
        relation: Relation,
        term: String,
    },
    /// Derive `TypOf (lit (eval e), N)` from `TypOf (e, N)`.
    Preserve {
        #[arg(long, value_enum, default_value_t = Via::Eval)]
        via: Via,
        term: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Relation {
    Eval,
    Typof,
    Istrm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Via {
    Eval,
    Istrm,
}

#[derive(Args, Debug, Default)]
struct EnvArgs {
    /// Runtime environment, e.g. `((x (con c (ty a))))`.
    #[arg(long, conflicts_with = "env_file")]
    env: Option<String>,
    /// File holding the runtime environment.
    #[arg(long)]
    env_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum LangCmd {
    /// Parse a phrase and print it back in canonical form.
    Parse {
        /// Print the generic term encoding as JSON instead.
        #[arg(long)]
        json: bool,
        phrase: String,
    },
    /// Print the phrase encoded by a JSON term.
    Print { json: String },
    /// Type a phrase under the typing of an environment.
    Typecheck {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        emit_derivation: bool,
        phrase: String,
    },
    /// Take one step.
    Step {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        emit_derivation: bool,
        phrase: String,
    },
    /// Step until a final form, a stuck state, or the fuel runs out.
    Trace {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        fuel: Option<usize>,
        #[arg(long)]
        emit_derivations: bool,
        phrase: String,
    },
    /// Print a typing or step derivation as JSON.
    Derive {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_enum, default_value_t = Judgement::Typing)]
        judgement: Judgement,
        phrase: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Judgement {
    Typing,
    Step,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Args, Debug)]
struct LawsArgs {
    /// kernel, indexed, mutual, arith, lang or all.
    #[arg(long)]
    suite: String,
    /// Plant a defect: swapped-fmap, left-biased-typing, dropped-ev2-side-condition.
    #[arg(long, default_value = "none")]
    mutation: Mutation,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use reduced enumeration depths and sample counts.
    #[arg(long)]
    small: bool,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long)]
    fuel: Option<usize>,
    /// Write each counterexample as JSON into this directory.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long, default_value = "none")]
    mutation: Mutation,
    /// Re-run a dumped counterexample instead of generating.
    #[arg(long, conflicts_with = "dump")]
    replay: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum DumpCmd {
    /// Signatures as JSON.
    Sig {
        /// trm, typ, pat or lang; all when omitted.
        name: Option<String>,
    },
    /// Every arithmetic term up to a depth, one per line.
    Arith {
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// The language corpus up to a depth, one phrase per line, followed by
    /// generated well-typed phrases.
    Lang {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        generated: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<i32, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Arith(c) => arith_cmd(c, out),
        Command::EvalArith { term } => arith_cmd(ArithCmd::Eval { term }, out),
        Command::Lang(c) => lang_cmd(c, out),
        Command::Laws(a) => laws_cmd(a, out),
        Command::FuzzPreservation(a) => fuzz_cmd(a, out, err),
        Command::Dump(c) => dump_cmd(c, out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        // A closed downstream pipe is not worth a diagnostic.
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 1,
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values print")
}

// ---------------------------------------------------------------------------
// arith

fn arith_cmd(cmd: ArithCmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        ArithCmd::Eval { term } => {
            let t = arith::parse(&term).map_err(usage)?;
            writeln!(out, "{}", arith::eval(&t))?;
        }
        ArithCmd::Derive { relation, term } => {
            let t = arith::parse(&term).map_err(usage)?;
            let v = match relation {
                Relation::Eval => {
                    let d = arith::build_eval_derivation(&t);
                    validate(&EvalSig::default(), &d).map_err(domain)?;
                    d.to_json()
                }
                Relation::Typof => {
                    let d = arith::build_typof_derivation(&t);
                    validate(&TypOfSig, &d).map_err(domain)?;
                    d.to_json()
                }
                Relation::Istrm => {
                    let d = arith::build_istrm(&t);
                    validate(&IsTrmSig, &d).map_err(domain)?;
                    d.to_json()
                }
            };
            writeln!(out, "{}", pretty(&v))?;
        }
        ArithCmd::Preserve { via, term } => {
            let t = arith::parse(&term).map_err(usage)?;
            let td = arith::build_typof_derivation(&t);
            let r = match via {
                Via::Eval => arith::preservation(&arith::build_eval_derivation(&t), &td),
                Via::Istrm => arith::preservation_via_istrm(&arith::build_istrm(&t), &td),
            }
            .map_err(domain)?;
            validate(&TypOfSig, &r).map_err(domain)?;
            writeln!(out, "{}", pretty(&r.to_json()))?;
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// lang

fn phrase_arg(src: &str) -> Result<Phrase, Failure> {
    parse_phrase(src).map_err(usage)
}

fn env_arg(a: &EnvArgs) -> Result<EnvE, Failure> {
    let src = match (&a.env, &a.env_file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?
        }
        (None, None) => return Ok(EnvE::empty()),
    };
    parse_env_e(&src).map_err(usage)
}

fn env_ctx(rules: &TypingRules, env: &EnvE) -> Result<EnvT, Failure> {
    typecheck_env(rules, env).map(|(ctx, _)| ctx).map_err(|e| domain(format!("environment is not typable: {e}")))
}

fn step_rule(d: &PhraseStep) -> &'static str {
    match d {
        BiDerivation::First(d) => d.rule().rule_name(),
        BiDerivation::Second(d) => d.rule().rule_name(),
    }
}

fn lang_cmd(cmd: LangCmd, out: &mut dyn Write) -> Outcome {
    let rules = TypingRules::new();
    match cmd {
        LangCmd::Parse { json, phrase } => {
            let p = phrase_arg(&phrase)?;
            if json {
                writeln!(out, "{}", pretty(&phrase_to_biterm(&p).to_json()))?;
            } else {
                writeln!(out, "{p}")?;
            }
        }
        LangCmd::Print { json } => {
            let v: serde_json::Value = serde_json::from_str(&json).map_err(usage)?;
            let t = lang_signature().term_from_json(&v).map_err(usage)?;
            let p = phrase_from_biterm(&t).map_err(usage)?;
            writeln!(out, "{p}")?;
        }
        LangCmd::Typecheck { env, emit_derivation, phrase } => {
            let p = phrase_arg(&phrase)?;
            let env = env_arg(&env)?;
            let ctx = env_ctx(&rules, &env)?;
            let (ty, d) = typecheck_phrase(&rules, &ctx, &p).map_err(domain)?;
            validate_typing(&rules, &d).map_err(domain)?;
            writeln!(out, "{ty}")?;
            if emit_derivation {
                writeln!(out, "{}", pretty(&d.to_json()))?;
            }
        }
        LangCmd::Step { env, emit_derivation, phrase } => {
            let p = phrase_arg(&phrase)?;
            let env = env_arg(&env)?;
            match step_phrase(&env, &p) {
                Some((q, d)) => {
                    writeln!(out, "{q}")?;
                    if emit_derivation {
                        writeln!(out, "{}", pretty(&d.to_json()))?;
                    }
                }
                None if p.is_final() => writeln!(out, "value")?,
                None => writeln!(out, "stuck")?,
            }
        }
        LangCmd::Trace { env, fuel, emit_derivations, phrase } => {
            let p = phrase_arg(&phrase)?;
            let env = env_arg(&env)?;
            let fuel = match fuel {
                Some(f) => f,
                None => default_fuel()?,
            };
            trace(&env, p, fuel, emit_derivations, out)?;
        }
        LangCmd::Derive { env, judgement, phrase } => {
            let p = phrase_arg(&phrase)?;
            let env = env_arg(&env)?;
            let v = match judgement {
                Judgement::Typing => {
                    let ctx = env_ctx(&rules, &env)?;
                    let (_, d) = typecheck_phrase(&rules, &ctx, &p).map_err(domain)?;
                    validate_typing(&rules, &d).map_err(domain)?;
                    d.to_json()
                }
                Judgement::Step => match step_phrase(&env, &p) {
                    Some((_, d)) => {
                        validate_step(&d).map_err(domain)?;
                        d.to_json()
                    }
                    None => return Err(domain(format!("{p} does not step"))),
                },
            };
            writeln!(out, "{}", pretty(&v))?;
        }
    }
    Ok(0)
}

fn default_fuel() -> Result<usize, Failure> {
    match std::env::var(FUEL_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| usage(format!("{FUEL_VAR} must be a natural number, found `{s}`"))),
        Err(_) => Ok(DEFAULT_FUEL),
    }
}

/// One configuration per line, each step introduced by its rule name.
fn trace(env: &EnvE, p: Phrase, fuel: usize, emit: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let mut p = p;
    writeln!(out, "0 {p}")?;
    for i in 1..=fuel {
        let Some((q, d)) = step_phrase(env, &p) else {
            let label = if p.is_final() { "value" } else { "stuck" };
            writeln!(out, "{label} after {} steps", i - 1)?;
            return Ok(());
        };
        writeln!(out, "  by {}", step_rule(&d))?;
        if emit {
            writeln!(out, "  {}", serde_json::to_string(&d.to_json()).expect("JSON values print"))?;
        }
        writeln!(out, "{i} {q}")?;
        p = q;
    }
    let label = if p.is_final() {
        "value"
    } else if step_phrase(env, &p).is_none() {
        "stuck"
    } else {
        "fuel exhausted"
    };
    writeln!(out, "{label} after {fuel} steps")?;
    Ok(())
}

// ---------------------------------------------------------------------------
// laws, fuzz, dump

fn laws_cmd(a: LawsArgs, out: &mut dyn Write) -> Outcome {
    let suites = if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse::<Suite>().map_err(usage)?] };
    let base = if a.small { LawConfig::small() } else { LawConfig::default() };
    let cfg = LawConfig { seed: a.seed, ..base.with_mutation(a.mutation) };
    let reports: Vec<_> = suites.into_iter().map(|s| law_suite(s, &cfg)).collect();
    match a.format {
        Format::Json if reports.len() == 1 => writeln!(out, "{}", pretty(&reports[0].to_json()))?,
        Format::Json => {
            let v: Vec<_> = reports.iter().map(|r| r.to_json()).collect();
            writeln!(out, "{}", pretty(&json!(v)))?
        }
        Format::Text => {
            for r in &reports {
                write!(out, "{r}")?;
            }
        }
    }
    Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
}

fn read_counterexample(path: &Path) -> Result<Counterexample, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{} is not a counterexample: {e}", path.display())))
}

fn fuzz_cmd(a: FuzzArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if let Some(path) = &a.replay {
        let cx = read_counterexample(path)?;
        let again = fuzz::replay(&cx, a.mutation).map_err(domain)?;
        let v = json!({
            "reproduced": again.is_some(),
            "counterexample": again.as_ref().unwrap_or(&cx),
        });
        match a.format {
            Format::Json => writeln!(out, "{}", pretty(&v))?,
            Format::Text => match &again {
                Some(c) => writeln!(out, "reproduced {}-{} step {} {}: {}", c.seed, c.index, c.step, c.rule, c.reason)?,
                None => writeln!(out, "not reproduced {}-{}", cx.seed, cx.index)?,
            },
        }
        return Ok(if again.is_some() { 1 } else { 0 });
    }
    let fuel = match a.fuel {
        Some(f) => f,
        None => default_fuel()?,
    };
    let cfg = FuzzConfig { fuel, mutation: a.mutation, ..FuzzConfig::new(a.seed, a.count) };
    let report = fuzz::fuzz_preservation(&cfg);
    if let Some(dir) = &a.dump {
        let paths = fuzz::dump(dir, &report)?;
        if !paths.is_empty() {
            writeln!(err, "wrote {} counterexample(s) to {}", paths.len(), dir.display())?;
        }
    }
    match a.format {
        Format::Json => writeln!(out, "{}", pretty(&serde_json::to_value(&report).expect("reports serialize")))?,
        Format::Text => {
            for c in &report.counterexamples {
                writeln!(out, "FAIL {}-{} step {} {}: {}", c.seed, c.index, c.step, c.rule, c.reason)?;
            }
            writeln!(
                out,
                "seed={} count={} generated={} steps={} finished={} counterexamples={}",
                report.seed,
                report.count,
                report.generated,
                report.steps,
                report.finished,
                report.counterexamples.len()
            )?;
        }
    }
    Ok(if report.counterexamples.is_empty() { 0 } else { 1 })
}

fn dump_cmd(cmd: DumpCmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        DumpCmd::Sig { name } => {
            let all = json!({
                "trm": arith::signature(),
                "typ": typ_signature(),
                "pat": pat_signature(),
                "lang": lang_signature(),
            });
            let v = match name {
                None => all,
                Some(n) => all.get(&n).cloned().ok_or_else(|| usage(format!("unknown signature `{n}`")))?,
            };
            writeln!(out, "{}", pretty(&v))?;
        }
        DumpCmd::Arith { depth } => {
            for t in enumerate_terms(arith::signature(), &Pools::arith(), depth) {
                writeln!(out, "{}", arith::print(&t))?;
            }
        }
        DumpCmd::Lang { depth, generated, seed } => {
            for t in lang_corpus(depth).iter() {
                let p = phrase_from_biterm(t).map_err(domain)?;
                writeln!(out, "{p}")?;
            }
            let gen = GenConfig::new(seed, generated);
            for i in 0..generated as u64 {
                if let Ok(c) = gen_well_typed_config(&gen, i) {
                    writeln!(out, "{}", c.phrase)?;
                }
            }
        }
    }
    Ok(0)
}
