//! Bi-functor, isomorphism and mutual fold laws, instantiated at the
//! declarations and expressions of the case-study language.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use mendler::indexed::RuleName;
use mendler::kernel::Payload;
use mendler::lang::{
    lang_signature, phrase_from_biterm, step_phrase, typecheck_phrase, EnvE, EnvT, Exp, Ident, StepRules, Typ,
    TypingRules,
};
use mendler::mutual::{
    bifmap, bifold_1, bifold_2, bistep_with, din1, din2, dout1, dout2, hfmap, hfold_1, hfold_2, hstep_with_1,
    hstep_with_2, BiDerivation, BiMendlerAlgebra, BiNode, BiPremise, BiRec, BiSignature, BiTerm, Component,
    Derivation1, Derivation2, HNode, Handle1, Handle2, HandleLayer1, HandleLayer2, HandleNode, IndexedBiMendlerAlgebra,
    IndexedBiSignature,
};

use super::{sample, LawConfig, LawResult};
use crate::enumerate::{bi_nodes_over, lang_corpus, BiLevel, Pools};
use crate::Mutation;

fn swap_same_sort<A1, A2>(rec: &mut [BiRec<A1, A2>]) {
    if rec.len() >= 2 && rec[0].component() == rec[1].component() {
        rec.swap(0, 1);
    }
}

/// `bifmap` as exercised by the suites; the planted defect swaps the first
/// two recursive slots when they have the same sort.
pub fn bifmap_ut<A1, A2, B1, B2>(
    mutation: Mutation,
    f1: impl FnMut(A1) -> B1,
    f2: impl FnMut(A2) -> B2,
    n: BiNode<A1, A2>,
) -> BiNode<B1, B2> {
    let out = bifmap(f1, f2, n);
    if mutation != Mutation::SwappedFmap {
        return out;
    }
    let (ctor, payload) = (out.ctor().to_string(), out.payload().to_vec());
    let mut rec = out.into_rec();
    swap_same_sort(&mut rec);
    BiNode::new(ctor, rec, payload)
}

/// The indexed bi-functor map under test, with the same defect on premises.
pub fn hfmap_ut<R, C, K1, K2, A1, A2, B1, B2>(
    mutation: Mutation,
    f1: impl FnMut(&K1, A1) -> B1,
    f2: impl FnMut(&K2, A2) -> B2,
    n: HNode<R, C, K1, K2, A1, A2>,
) -> HNode<R, C, K1, K2, B1, B2> {
    let mut out = hfmap(f1, f2, n);
    if mutation == Mutation::SwappedFmap && out.premises.len() >= 2 {
        let (l, r) = out.premises.split_at_mut(1);
        match (&mut l[0], &mut r[0]) {
            (BiPremise::First(_, a), BiPremise::First(_, b)) => std::mem::swap(a, b),
            (BiPremise::Second(_, a), BiPremise::Second(_, b)) => std::mem::swap(a, b),
            _ => {}
        }
    }
    out
}

fn label<A1, A2>(n: &BiNode<A1, A2>) -> String {
    format!("{}/{} {:?}", n.ctor(), n.rec().len(), n.payload())
}

/// `bifmap` identity and composition on `nodes`.
pub fn bifmap_laws(nodes: &[BiNode<BiTerm, BiTerm>], mutation: Mutation, tag: &str) -> Vec<LawResult> {
    let mut id = LawResult::new(format!("bifmap-identity{tag}"));
    let mut comp = LawResult::new(format!("bifmap-composition{tag}"));
    let f1 = |t: BiTerm| t.to_string();
    let f2 = |t: BiTerm| (t.size(), t.to_string());
    let g1 = |s: String| s.len() as u64 * 31 + s.bytes().map(u64::from).sum::<u64>();
    let g2 = |(n, s): (usize, String)| format!("{n}:{s}");
    for n in nodes {
        id.check(&bifmap_ut(mutation, |t| t, |t| t, n.clone()) == n, || format!("bifmap id changes {}", label(n)));
        let once = bifmap_ut(mutation, |t| g1(f1(t)), |t| g2(f2(t)), n.clone());
        let twice = bifmap_ut(mutation, g1, g2, bifmap_ut(mutation, f1, f2, n.clone()));
        comp.check(once == twice, || format!("bifmap (g . f) differs at {}", label(n)));
    }
    vec![id, comp]
}

/// Exhaustive over nodes with depth-1 children, plus `cfg.samples` nodes
/// drawn from the depth-bounded corpus.
pub fn functor_suite(cfg: &LawConfig, corpus: &BiLevel) -> Vec<LawResult> {
    let sig = lang_signature();
    let pools = Pools::lang();
    let leaves = lang_corpus(1);
    let mut nodes = bi_nodes_over(sig, &pools, Component::First, &leaves);
    nodes.extend(bi_nodes_over(sig, &pools, Component::Second, &leaves));
    let mut out = bifmap_laws(&nodes, cfg.mutation, "");
    let deep: Vec<&BiTerm> = corpus.iter().filter(|t| t.depth() >= 2).collect();
    let mut rng = cfg.rng(30);
    let sampled: Vec<_> = sample(&mut rng, &deep, cfg.samples).into_iter().map(|t| t.out_().clone()).collect();
    out.extend(bifmap_laws(&sampled, cfg.mutation, "-sampled"));
    out
}

/// Per-component `in . out = id` and `out . in = id`.
pub fn iso_laws(sig: &BiSignature, corpus: &BiLevel) -> Vec<LawResult> {
    let mut in_out = LawResult::new("bi-in-out");
    let mut out_in = LawResult::new("bi-out-in");
    for t in corpus.iter() {
        let n = t.out_().clone();
        match sig.in_(t.component(), n.clone()) {
            Ok(back) => {
                in_out.check(&back == t, || format!("in (out t) differs for {t}"));
                out_in.check(back.out_() == &n, || format!("out (in n) differs for {t}"));
            }
            Err(e) => {
                in_out.check(false, || format!("in rejects out of {t}: {e}"));
                out_in.check(false, || format!("in rejects out of {t}: {e}"));
            }
        }
    }
    vec![in_out, out_in]
}

/// Rebuilds every node: the identity on both sorts.
pub struct Rebuild<'s>(pub &'s BiSignature);

impl Rebuild<'_> {
    fn build<'h>(
        &self,
        c: Component,
        r1: &dyn Fn(Handle1<'h>) -> BiTerm,
        r2: &dyn Fn(Handle2<'h>) -> BiTerm,
        n: HandleNode<'h>,
    ) -> BiTerm {
        self.0.in_(c, n.map(r1, r2)).expect("rebuilt nodes follow the signature")
    }
}

impl BiMendlerAlgebra<BiTerm, BiTerm> for Rebuild<'_> {
    fn step1<'h>(
        &self,
        r1: &dyn Fn(Handle1<'h>) -> BiTerm,
        r2: &dyn Fn(Handle2<'h>) -> BiTerm,
        n: HandleNode<'h>,
    ) -> BiTerm {
        self.build(Component::First, r1, r2, n)
    }

    fn step2<'h>(
        &self,
        r1: &dyn Fn(Handle1<'h>) -> BiTerm,
        r2: &dyn Fn(Handle2<'h>) -> BiTerm,
        n: HandleNode<'h>,
    ) -> BiTerm {
        self.build(Component::Second, r1, r2, n)
    }
}

fn seed(tag: u8, ctor: &str, payload: &[Payload]) -> u64 {
    let mut h = DefaultHasher::new();
    (tag, ctor, format!("{payload:?}")).hash(&mut h);
    h.finish()
}

/// Order-sensitive digest of both sorts.
pub struct BiDigest;

impl BiDigest {
    fn go<'h>(tag: u8, r1: &dyn Fn(Handle1<'h>) -> u64, r2: &dyn Fn(Handle2<'h>) -> u64, n: HandleNode<'h>) -> u64 {
        let start = seed(tag, n.ctor(), n.payload());
        n.rec().iter().fold(start, |acc, r| {
            let x = match r {
                BiRec::First(h) => r1(*h),
                BiRec::Second(h) => r2(*h),
            };
            acc.wrapping_mul(1_000_003).wrapping_add(x)
        })
    }
}

impl BiMendlerAlgebra<u64, u64> for BiDigest {
    fn step1<'h>(&self, r1: &dyn Fn(Handle1<'h>) -> u64, r2: &dyn Fn(Handle2<'h>) -> u64, n: HandleNode<'h>) -> u64 {
        Self::go(1, r1, r2, n)
    }

    fn step2<'h>(&self, r1: &dyn Fn(Handle1<'h>) -> u64, r2: &dyn Fn(Handle2<'h>) -> u64, n: HandleNode<'h>) -> u64 {
        Self::go(2, r1, r2, n)
    }
}

fn bifold_any<C, M: BiMendlerAlgebra<C, C>>(m: &M, t: &BiTerm) -> C {
    match t.component() {
        Component::First => bifold_1(m, t).expect("first-sort term"),
        Component::Second => bifold_2(m, t).expect("second-sort term"),
    }
}

/// The mutual computation rules node-wise, and the rebuild identity.
pub fn bifold_laws(sig: &BiSignature, corpus: &BiLevel) -> Vec<LawResult> {
    let mut rule = LawResult::new("bifold-computation");
    let mut rebuild = LawResult::new("bifold-rebuild-identity");
    let mut wrong = LawResult::new("bifold-wrong-component");
    for t in corpus.iter() {
        let lhs = bifold_any(&BiDigest, t);
        let rhs = bistep_with(
            &BiDigest,
            &|c| bifold_any(&BiDigest, c),
            &|c| bifold_any(&BiDigest, c),
            t.component(),
            t.out_(),
        )
        .into_inner();
        rule.check(lhs == rhs, || format!("bifold m (in n) /= step (bifold m) n at {t}"));
        rebuild.check(&bifold_any(&Rebuild(sig), t) == t, || format!("rebuild fold changes {t}"));
        let rejected = match t.component() {
            Component::First => bifold_2::<u64, u64, _>(&BiDigest, t).is_err(),
            Component::Second => bifold_1::<u64, u64, _>(&BiDigest, t).is_err(),
        };
        wrong.check(rejected, || format!("fold of the other sort accepted {t}"));
    }
    vec![rule, rebuild, wrong]
}

/// Derivations of a mutual relation, flattened.
pub struct Family<S: IndexedBiSignature> {
    pub first: Vec<Derivation1<S>>,
    pub second: Vec<Derivation2<S>>,
}

impl<S: IndexedBiSignature> Default for Family<S> {
    fn default() -> Self {
        Family { first: vec![], second: vec![] }
    }
}

impl<S: IndexedBiSignature> Family<S> {
    /// Adds `d` and all its sub-derivations.
    pub fn add(&mut self, d: &BiDerivation<S>) {
        match d {
            BiDerivation::First(d) => self.add1(d),
            BiDerivation::Second(d) => self.add2(d),
        }
    }

    fn add1(&mut self, d: &Derivation1<S>) {
        self.first.push(d.clone());
        self.premises(&d.node().premises);
    }

    fn add2(&mut self, d: &Derivation2<S>) {
        self.second.push(d.clone());
        self.premises(&d.node().premises);
    }

    fn premises<K1, K2>(&mut self, ps: &[BiPremise<K1, K2, Derivation1<S>, Derivation2<S>>]) {
        for p in ps {
            match p {
                BiPremise::First(_, d) => self.add1(d),
                BiPremise::Second(_, d) => self.add2(d),
            }
        }
    }

    pub fn len(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Typing and step derivations harvested from the corpus: every phrase is
/// typechecked under `{x : a}` and run for a few steps under
/// `{x = con x a}`.
pub fn lang_derivations(corpus: &BiLevel, rules: &TypingRules) -> (Family<TypingRules>, Family<StepRules>) {
    let a = Typ::var("a");
    let ctx: EnvT = [(Ident::new("x"), a.clone())].into_iter().collect();
    let env: EnvE = [(Ident::new("x"), Exp::Con(Ident::new("x"), a))].into_iter().collect();
    let mut typing = Family::default();
    let mut steps = Family::default();
    for t in corpus.iter() {
        let Ok(mut p) = phrase_from_biterm(t) else { continue };
        if let Ok((_, d)) = typecheck_phrase(rules, &ctx, &p) {
            typing.add(&d);
        }
        for _ in 0..4 {
            let Some((q, d)) = step_phrase(&env, &p) else { break };
            steps.add(&d);
            p = q;
        }
    }
    (typing, steps)
}

/// Digest of rule names, order-sensitive, for either family.
pub struct HDigest;

fn hdigest<I>(tag: u8, rule: &str, kids: I) -> u64
where
    I: IntoIterator<Item = u64>,
{
    let mut h = DefaultHasher::new();
    (tag, rule).hash(&mut h);
    kids.into_iter().fold(h.finish(), |acc, x| acc.wrapping_mul(1_000_003).wrapping_add(x))
}

impl<S: IndexedBiSignature> IndexedBiMendlerAlgebra<S, u64, u64> for HDigest {
    fn step1<'h>(
        &self,
        rec1: &dyn Fn(&S::Index1, Handle1<'h>) -> u64,
        rec2: &dyn Fn(&S::Index2, Handle2<'h>) -> u64,
        _: &S::Index1,
        node: HandleLayer1<'h, S>,
    ) -> u64 {
        let kids = node.premises.iter().map(|p| match p {
            BiPremise::First(k, h) => rec1(k, *h),
            BiPremise::Second(k, h) => rec2(k, *h),
        });
        hdigest(1, node.rule.rule_name(), kids.collect::<Vec<_>>())
    }

    fn step2<'h>(
        &self,
        rec1: &dyn Fn(&S::Index1, Handle1<'h>) -> u64,
        rec2: &dyn Fn(&S::Index2, Handle2<'h>) -> u64,
        _: &S::Index2,
        node: HandleLayer2<'h, S>,
    ) -> u64 {
        let kids = node.premises.iter().map(|p| match p {
            BiPremise::First(k, h) => rec1(k, *h),
            BiPremise::Second(k, h) => rec2(k, *h),
        });
        hdigest(2, node.rule.rule_name(), kids.collect::<Vec<_>>())
    }
}

fn h1<S: IndexedBiSignature>(k: &S::Index1, d: &Derivation1<S>) -> u64 {
    hfold_1::<S, u64, u64, _>(&HDigest, k, d).expect("premise index")
}

fn h2<S: IndexedBiSignature>(k: &S::Index2, d: &Derivation2<S>) -> u64 {
    hfold_2::<S, u64, u64, _>(&HDigest, k, d).expect("premise index")
}

/// Per-family `din . dout = id`, the `hfold` computation rules node-wise,
/// and `hfmap` identity and composition on the same nodes.
pub fn derivation_laws<S: IndexedBiSignature>(sig: &S, fam: &Family<S>, mutation: Mutation) -> Vec<LawResult> {
    let name = sig.name().to_string();
    let mut iso = LawResult::new(format!("din-dout[{name}]"));
    let mut rule = LawResult::new(format!("hfold-computation[{name}]"));
    let mut id = LawResult::new(format!("hfmap-identity[{name}]"));
    let mut comp = LawResult::new(format!("hfmap-composition[{name}]"));
    let f1 = |_: &S::Index1, d: Derivation1<S>| (d.size(), d.rule().rule_name());
    let f2 = |_: &S::Index2, d: Derivation2<S>| (d.size(), d.rule().rule_name());
    let g = |(n, r): (usize, &str)| format!("{r}:{n}");
    for d in &fam.first {
        let n = dout1(d).clone();
        iso.check(din1(sig, n.clone()).is_ok_and(|b| &b == d && dout1(&b) == &n), || {
            format!("din1/dout1 do not round-trip at {:?}", d.conclusion())
        });
        let w = d.conclusion();
        let rhs = hstep_with_1::<S, u64, u64, _, _, _>(&HDigest, &|k, c| h1(k, c), &|k, c| h2(k, c), w, d.node());
        rule.check(h1(w, d) == rhs, || format!("hfold_1 rule fails at {:?}", d.rule()));
        id.check(hfmap_ut(mutation, |_, x| x, |_, x| x, n.clone()) == n, || format!("hfmap id changes {:?}", d.rule()));
        let once = hfmap_ut(mutation, |k, x| g(f1(k, x)), |k, x| g(f2(k, x)), n.clone());
        let twice = hfmap_ut(mutation, |_, x| g(x), |_, x| g(x), hfmap_ut(mutation, f1, f2, n));
        comp.check(once == twice, || format!("hfmap (g . f) differs at {:?}", d.rule()));
    }
    for d in &fam.second {
        let n = dout2(d).clone();
        iso.check(din2(sig, n.clone()).is_ok_and(|b| &b == d && dout2(&b) == &n), || {
            format!("din2/dout2 do not round-trip at {:?}", d.conclusion())
        });
        let w = d.conclusion();
        let rhs = hstep_with_2::<S, u64, u64, _, _, _>(&HDigest, &|k, c| h1(k, c), &|k, c| h2(k, c), w, d.node());
        rule.check(h2(w, d) == rhs, || format!("hfold_2 rule fails at {:?}", d.rule()));
        id.check(hfmap_ut(mutation, |_, x| x, |_, x| x, n.clone()) == n, || format!("hfmap id changes {:?}", d.rule()));
        let once = hfmap_ut(mutation, |k, x| g(f1(k, x)), |k, x| g(f2(k, x)), n.clone());
        let twice = hfmap_ut(mutation, |_, x| g(x), |_, x| g(x), hfmap_ut(mutation, f1, f2, n));
        comp.check(once == twice, || format!("hfmap (g . f) differs at {:?}", d.rule()));
    }
    vec![iso, rule, id, comp]
}

pub fn suite(cfg: &LawConfig) -> Vec<LawResult> {
    let sig = lang_signature();
    let corpus = lang_corpus(cfg.lang_depth);
    let mut out = functor_suite(cfg, &corpus);
    out.extend(iso_laws(sig, &corpus));
    out.extend(bifold_laws(sig, &corpus));
    let rules = cfg.mutation.typing_rules();
    let (typing, steps) = lang_derivations(&corpus, &rules);
    out.extend(derivation_laws(&rules, &typing, cfg.mutation));
    out.extend(derivation_laws(&StepRules, &steps, cfg.mutation));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutual_laws_hold() {
        for law in suite(&LawConfig::small()) {
            assert!(law.passed(), "{law:?}");
            assert!(law.checked > 0, "{}", law.name);
        }
    }

    #[test]
    fn swapped_bifmap_is_caught() {
        let laws = suite(&LawConfig::small().with_mutation(Mutation::SwappedFmap));
        assert!(laws.iter().any(|l| l.name.starts_with("bifmap-composition") && l.failed > 0));
    }
}
