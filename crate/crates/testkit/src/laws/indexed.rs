//! Laws of derivation trees over indexed signatures, instantiated at the
//! three arithmetic relations.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use mendler::arith::{EvalSig, IsTrmSig, TypOfSig};
use mendler::indexed::{
    din, dout, ifmap, ifold, istep_with, validate, DNode, Derivation, IndexedMendlerAlgebra, IndexedSignature, RuleName,
};
use mendler::kernel::Handle;

use super::arith::{arith_cases, ArithCase};
use super::{sample, LawConfig, LawResult};
use crate::Mutation;

/// `ifmap` as exercised by the suites; the planted defect swaps the
/// witnesses of the first two premises, leaving their indices in place.
pub fn ifmap_ut<R, K, A, B>(mutation: Mutation, f: impl FnMut(&K, A) -> B, n: DNode<R, K, A>) -> DNode<R, K, B> {
    let mut out = ifmap(f, n);
    if mutation == Mutation::SwappedFmap && out.premises.len() >= 2 {
        let (left, right) = out.premises.split_at_mut(1);
        std::mem::swap(&mut left[0].1, &mut right[0].1);
    }
    out
}

/// An order-sensitive digest of rule names along a derivation.
pub struct Digest;

impl<S: IndexedSignature> IndexedMendlerAlgebra<S, u64> for Digest {
    fn step<'h>(
        &self,
        rec: &dyn Fn(&S::Index, Handle<'h>) -> u64,
        _: &S::Index,
        node: DNode<S::Rule, S::Index, Handle<'h>>,
    ) -> u64 {
        let mut h = DefaultHasher::new();
        node.rule.rule_name().hash(&mut h);
        node.premises.iter().fold(h.finish(), |acc, (k, x)| acc.wrapping_mul(1_000_003).wrapping_add(rec(k, *x)))
    }
}

/// Returns the index it is folded at.
pub struct Conclusion;

impl<S: IndexedSignature> IndexedMendlerAlgebra<S, S::Index> for Conclusion {
    fn step<'h>(
        &self,
        _: &dyn Fn(&S::Index, Handle<'h>) -> S::Index,
        w: &S::Index,
        _: DNode<S::Rule, S::Index, Handle<'h>>,
    ) -> S::Index {
        w.clone()
    }
}

fn short<K: std::fmt::Debug>(k: &K) -> String {
    let s = format!("{k:?}");
    if s.len() > 160 {
        format!("{}...", &s[..160])
    } else {
        s
    }
}

/// `ifmap` identity and composition on `nodes`.
pub fn ifmap_laws<S: IndexedSignature>(
    sig: &S,
    nodes: &[DNode<S::Rule, S::Index, Derivation<S>>],
    mutation: Mutation,
    tag: &str,
) -> Vec<LawResult> {
    let mut id = LawResult::new(format!("ifmap-identity{tag}[{}]", sig.name()));
    let mut comp = LawResult::new(format!("ifmap-composition{tag}[{}]", sig.name()));
    let f = |_: &S::Index, d: Derivation<S>| (d.size(), d.depth(), d.rule().rule_name());
    let g = |k: &S::Index, (s, h, r): (usize, usize, &str)| format!("{r}:{s}:{h}@{}", short(k));
    for n in nodes {
        id.check(&ifmap_ut(mutation, |_, d| d, n.clone()) == n, || {
            format!("ifmap id changes {}", short(&n.conclusion))
        });
        let once = ifmap_ut(mutation, |k, d| g(k, f(k, d)), n.clone());
        let twice = ifmap_ut(mutation, g, ifmap_ut(mutation, f, n.clone()));
        comp.check(once == twice, || format!("ifmap (g . f) differs at {}", short(&n.conclusion)));
    }
    vec![id, comp]
}

/// `din (dout d) = d` on derivations and `dout (din n) = n` on their nodes.
pub fn iso_laws<S: IndexedSignature>(sig: &S, ds: &[Derivation<S>]) -> Vec<LawResult> {
    let mut din_dout = LawResult::new(format!("din-dout[{}]", sig.name()));
    let mut dout_din = LawResult::new(format!("dout-din[{}]", sig.name()));
    for d in ds {
        let n = dout(d).clone();
        match din(sig, n.clone()) {
            Ok(back) => {
                din_dout.check(&back == d, || format!("din (dout d) differs at {}", short(d.conclusion())));
                dout_din.check(dout(&back) == &n, || format!("dout (din n) differs at {}", short(d.conclusion())));
            }
            Err(e) => {
                din_dout.check(false, || format!("din rejects dout of a derivation: {e}"));
                dout_din.check(false, || format!("din rejects dout of a derivation: {e}"));
            }
        }
    }
    vec![din_dout, dout_din]
}

/// The `ifold` computation rule node-wise, and index coherence.
pub fn fold_laws<S: IndexedSignature>(sig: &S, ds: &[Derivation<S>]) -> Vec<LawResult> {
    let mut rule = LawResult::new(format!("ifold-computation[{}]", sig.name()));
    let mut coherent = LawResult::new(format!("ifold-index-coherence[{}]", sig.name()));
    for d in ds {
        let w = d.conclusion();
        let lhs: Result<u64, _> = ifold(&Digest, w, d);
        let rhs = istep_with::<S, u64, _, _>(
            &Digest,
            &|k, c: &Derivation<S>| ifold(&Digest, k, c).expect("premise index"),
            w,
            d.node(),
        );
        rule.check(lhs.as_ref() == Ok(&rhs), || format!("ifold m (din n) /= step (ifold m) n at {}", short(w)));
        let back: Result<S::Index, _> = ifold(&Conclusion, w, d);
        coherent.check(back.as_ref() == Ok(w), || format!("ifold does not return its index at {}", short(w)));
    }
    vec![rule, coherent]
}

/// `ifold` refuses to start at an index other than the conclusion.
pub fn mismatch_law<S: IndexedSignature>(sig: &S, ds: &[Derivation<S>]) -> LawResult {
    let mut law = LawResult::new(format!("ifold-index-mismatch[{}]", sig.name()));
    for (i, d) in ds.iter().enumerate() {
        let (w, other) = (d.conclusion(), ds[(i + 1) % ds.len()].conclusion());
        if other != w {
            law.check(ifold::<S, u64, _>(&Digest, other, d).is_err(), || {
                format!("ifold accepted {} for {}", short(other), short(w))
            });
        }
    }
    law
}

/// Every derivation validates; built nodes are only accepted by `din` when
/// they validate.
pub fn validity_law<S: IndexedSignature>(sig: &S, ds: &[Derivation<S>]) -> LawResult {
    let mut law = LawResult::new(format!("validate[{}]", sig.name()));
    for d in ds {
        law.record(validate(sig, d).map_err(|e| e.to_string()));
    }
    law
}

fn family<S: IndexedSignature>(sig: &S, cfg: &LawConfig, ds: &[Derivation<S>], salt: u64) -> Vec<LawResult> {
    let small: Vec<_> = ds.iter().filter(|d| d.depth() <= 2).map(|d| d.node().clone()).collect();
    let mut out = ifmap_laws(sig, &small, cfg.mutation, "");
    let deep: Vec<&Derivation<S>> = ds.iter().filter(|d| d.depth() > 2).collect();
    let mut rng = cfg.rng(salt);
    let sampled: Vec<_> = sample(&mut rng, &deep, cfg.samples).into_iter().map(|d| d.node().clone()).collect();
    out.extend(ifmap_laws(sig, &sampled, cfg.mutation, "-sampled"));
    out.extend(iso_laws(sig, ds));
    out.extend(fold_laws(sig, ds));
    out.push(mismatch_law(sig, ds));
    out.push(validity_law(sig, ds));
    out
}

/// Functor laws for all three relations (exhaustive over derivations of
/// depth at most 2, plus samples).
pub fn functor_suite(cfg: &LawConfig, cases: &[ArithCase]) -> Vec<LawResult> {
    let mut out = Vec::new();
    let mut rng = cfg.rng(20);
    let small = |c: &&ArithCase| c.term.depth() <= 2;
    let deep: Vec<&ArithCase> = cases.iter().filter(|c| c.term.depth() > 2).collect();
    let sampled = sample(&mut rng, &deep, cfg.samples);
    let ev: Vec<_> = cases.iter().filter(small).map(|c| c.eval.node().clone()).collect();
    out.extend(ifmap_laws(&EvalSig::default(), &ev, cfg.mutation, ""));
    let ev: Vec<_> = sampled.iter().map(|c| c.eval.node().clone()).collect();
    out.extend(ifmap_laws(&EvalSig::default(), &ev, cfg.mutation, "-sampled"));
    let tof: Vec<_> = cases.iter().filter(small).map(|c| c.typof.node().clone()).collect();
    out.extend(ifmap_laws(&TypOfSig, &tof, cfg.mutation, ""));
    let ist: Vec<_> = cases.iter().filter(small).map(|c| c.istrm.node().clone()).collect();
    out.extend(ifmap_laws(&IsTrmSig, &ist, cfg.mutation, ""));
    out
}

pub fn iso_suite(cases: &[ArithCase]) -> Vec<LawResult> {
    let (ev, tof, ist) = split(cases);
    let mut out = iso_laws(&EvalSig::default(), &ev);
    out.extend(iso_laws(&TypOfSig, &tof));
    out.extend(iso_laws(&IsTrmSig, &ist));
    out
}

pub fn fold_suite(cases: &[ArithCase]) -> Vec<LawResult> {
    let (ev, tof, ist) = split(cases);
    let mut out = fold_laws(&EvalSig::default(), &ev);
    out.extend(fold_laws(&TypOfSig, &tof));
    out.extend(fold_laws(&IsTrmSig, &ist));
    out
}

type Split = (Vec<Derivation<EvalSig>>, Vec<Derivation<TypOfSig>>, Vec<Derivation<IsTrmSig>>);

fn split(cases: &[ArithCase]) -> Split {
    (
        cases.iter().map(|c| c.eval.clone()).collect(),
        cases.iter().map(|c| c.typof.clone()).collect(),
        cases.iter().map(|c| c.istrm.clone()).collect(),
    )
}

pub fn suite(cfg: &LawConfig) -> Vec<LawResult> {
    let cases = arith_cases(cfg.arith_depth);
    let (ev, tof, ist) = split(&cases);
    let mut out = family(&EvalSig::default(), cfg, &ev, 21);
    out.extend(family(&TypOfSig, cfg, &tof, 22));
    out.extend(family(&IsTrmSig, cfg, &ist, 23));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_laws_hold() {
        for law in suite(&LawConfig::small()) {
            assert!(law.passed(), "{law:?}");
            assert!(law.checked > 0, "{}", law.name);
        }
    }

    #[test]
    fn swapped_ifmap_is_caught() {
        let laws = suite(&LawConfig::small().with_mutation(Mutation::SwappedFmap));
        assert!(laws.iter().any(|l| l.name == "ifmap-identity[Eval]" && l.failed > 0));
    }
}
