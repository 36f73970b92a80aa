//! Exhaustive enumeration of terms up to a depth.
//!
//! Order is constructor declaration order, then payload pool order, then
//! children lexicographically (first child most significant). Every term of
//! depth at most `d` appears exactly once. Levels share subterms.

use std::collections::BTreeMap;

use mendler::kernel::{Name, Node, Payload, PayloadType, Signature, SlotKind, Term};
use mendler::lang::{lang_signature, pat_to_term, typ_to_term, Pat, Typ};
use mendler::mutual::{BiNode, BiRec, BiSignature, BiSlotKind, BiTerm, Component};

/// Payload values to draw from while enumerating.
#[derive(Clone, Debug, Default)]
pub struct Pools {
    pub ints: Vec<i64>,
    pub ids: Vec<Name>,
    pub ty_ids: Vec<Name>,
    /// Key sets for binding slots; each must be strictly ascending.
    pub keysets: Vec<Vec<Name>>,
    /// Term payloads keyed by constructor and payload position.
    pub terms: BTreeMap<(String, usize), Vec<Term>>,
    /// Term payloads for positions not listed in `terms`.
    pub default_terms: Vec<Term>,
}

impl Pools {
    /// Literals `-2..=2`.
    pub fn arith() -> Pools {
        Pools { ints: (-2..=2).collect(), ..Pools::default() }
    }

    /// One identifier, one type, one pattern, and key sets `{}` and `{x}`.
    pub fn lang() -> Pools {
        let a = typ_to_term(&Typ::var("a"));
        let pat = pat_to_term(&Pat::var("x", Typ::var("a")));
        let mut terms = BTreeMap::new();
        terms.insert(("con".to_string(), 1), vec![a]);
        terms.insert(("match".to_string(), 0), vec![pat.clone()]);
        terms.insert(("clos".to_string(), 1), vec![pat]);
        Pools {
            ids: vec!["x".into()],
            ty_ids: vec!["a".into()],
            keysets: vec![vec![], vec!["x".into()]],
            terms,
            ..Pools::default()
        }
    }

    fn payload_choices(&self, ctor: &str, pos: usize, ty: PayloadType) -> Vec<Payload> {
        match ty {
            PayloadType::Int => self.ints.iter().map(|&x| Payload::Int(x)).collect(),
            PayloadType::Id => self.ids.iter().map(|x| Payload::Id(x.clone())).collect(),
            PayloadType::TyId => self.ty_ids.iter().map(|x| Payload::TyId(x.clone())).collect(),
            PayloadType::Term => self
                .terms
                .get(&(ctor.to_string(), pos))
                .unwrap_or(&self.default_terms)
                .iter()
                .map(|t| Payload::Term(t.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Rec(usize),
    Bindings(usize),
    Payload(PayloadType),
}

/// One way to fill a constructor's payload slots, and the sorts of the
/// recursive positions that result.
struct Shape {
    payload: Vec<Payload>,
    sorts: Vec<usize>,
}

fn shapes(ctor: &str, slots: &[Slot], pools: &Pools) -> Vec<Shape> {
    let mut out = vec![Shape { payload: vec![], sorts: vec![] }];
    for &slot in slots {
        out = match slot {
            Slot::Rec(s) => out
                .into_iter()
                .map(|mut sh| {
                    sh.sorts.push(s);
                    sh
                })
                .collect(),
            Slot::Bindings(s) => {
                let mut next = Vec::new();
                for sh in &out {
                    for keys in &pools.keysets {
                        let mut payload = sh.payload.clone();
                        payload.push(Payload::Keys(keys.clone()));
                        let mut sorts = sh.sorts.clone();
                        sorts.extend(std::iter::repeat_n(s, keys.len()));
                        next.push(Shape { payload, sorts });
                    }
                }
                next
            }
            Slot::Payload(ty) => {
                let mut next = Vec::new();
                for sh in &out {
                    for p in pools.payload_choices(ctor, sh.payload.len(), ty) {
                        let mut payload = sh.payload.clone();
                        payload.push(p);
                        next.push(Shape { payload, sorts: sh.sorts.clone() });
                    }
                }
                next
            }
        };
    }
    out
}

/// Calls `f` on every tuple drawn from `pools[i]` in lexicographic order.
fn for_each_tuple<T: Clone>(pools: &[&[T]], mut f: impl FnMut(Vec<T>)) {
    if pools.iter().any(|p| p.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; pools.len()];
    loop {
        f(idx.iter().zip(pools).map(|(&i, p)| p[i].clone()).collect());
        let mut k = pools.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < pools[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn ctor_slots(sig: &Signature) -> Vec<(String, Vec<Slot>)> {
    sig.constructors()
        .iter()
        .map(|c| {
            let slots = c
                .slots()
                .iter()
                .map(|s| match *s {
                    SlotKind::Rec => Slot::Rec(0),
                    SlotKind::Bindings => Slot::Bindings(0),
                    SlotKind::Payload(t) => Slot::Payload(t),
                })
                .collect();
            (c.name().to_string(), slots)
        })
        .collect()
}

fn sort_index(c: Component) -> usize {
    match c {
        Component::First => 0,
        Component::Second => 1,
    }
}

fn bi_ctor_slots(sig: &BiSignature, c: Component) -> Vec<(String, Vec<Slot>)> {
    sig.constructors(c)
        .iter()
        .map(|k| {
            let slots = k
                .slots()
                .iter()
                .map(|s| match *s {
                    BiSlotKind::Rec(c) => Slot::Rec(sort_index(c)),
                    BiSlotKind::Bindings(c) => Slot::Bindings(sort_index(c)),
                    BiSlotKind::Payload(t) => Slot::Payload(t),
                })
                .collect();
            (k.name().to_string(), slots)
        })
        .collect()
}

/// All nodes of `sig` whose children are drawn from `children`.
pub fn nodes_over(sig: &Signature, pools: &Pools, children: &[Term]) -> Vec<Node<Term>> {
    let mut out = Vec::new();
    for (ctor, slots) in ctor_slots(sig) {
        for sh in shapes(&ctor, &slots, pools) {
            let kid_pools: Vec<&[Term]> = sh.sorts.iter().map(|_| children).collect();
            for_each_tuple(&kid_pools, |rec| out.push(Node::new(ctor.as_str(), rec, sh.payload.clone())));
        }
    }
    out
}

/// Every term of depth at most `depth`, in enumeration order.
pub fn enumerate_terms(sig: &Signature, pools: &Pools, depth: usize) -> Vec<Term> {
    let mut level: Vec<Term> = Vec::new();
    for _ in 0..depth {
        level = nodes_over(sig, pools, &level)
            .into_iter()
            .map(|n| sig.in_(n).expect("enumerated nodes follow the signature"))
            .collect();
    }
    level
}

/// The number of terms [`enumerate_terms`] yields, without building them.
pub fn count_terms(sig: &Signature, pools: &Pools, depth: usize) -> u128 {
    let slots = ctor_slots(sig);
    let mut n: u128 = 0;
    for _ in 0..depth {
        let mut next = 0u128;
        for (ctor, s) in &slots {
            for sh in shapes(ctor, s, pools) {
                next += n.pow(sh.sorts.len() as u32);
            }
        }
        n = next;
    }
    n
}

/// Both sorts of a bi-signature enumerated jointly: terms of the first sort
/// and of the second, each of depth at most `depth`.
#[derive(Clone, Debug, Default)]
pub struct BiLevel {
    pub first: Vec<BiTerm>,
    pub second: Vec<BiTerm>,
}

impl BiLevel {
    fn sort(&self, s: usize) -> &[BiTerm] {
        if s == 0 {
            &self.first
        } else {
            &self.second
        }
    }

    pub fn len(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &BiTerm> {
        self.first.iter().chain(&self.second)
    }
}

/// Nodes of sort `c` whose children come from `children`.
pub fn bi_nodes_over(
    sig: &BiSignature,
    pools: &Pools,
    c: Component,
    children: &BiLevel,
) -> Vec<BiNode<BiTerm, BiTerm>> {
    let mut out = Vec::new();
    for (ctor, slots) in bi_ctor_slots(sig, c) {
        for sh in shapes(&ctor, &slots, pools) {
            let kid_pools: Vec<&[BiTerm]> = sh.sorts.iter().map(|&s| children.sort(s)).collect();
            for_each_tuple(&kid_pools, |kids| {
                let rec = kids
                    .into_iter()
                    .map(|t| match t.component() {
                        Component::First => BiRec::First(t),
                        Component::Second => BiRec::Second(t),
                    })
                    .collect();
                out.push(BiNode::new(ctor.as_str(), rec, sh.payload.clone()));
            });
        }
    }
    out
}

pub fn enumerate_biterms(sig: &BiSignature, pools: &Pools, depth: usize) -> BiLevel {
    let mut level = BiLevel::default();
    for _ in 0..depth {
        let build = |c| -> Vec<BiTerm> {
            bi_nodes_over(sig, pools, c, &level)
                .into_iter()
                .map(|n| sig.in_(c, n).expect("enumerated nodes follow the signature"))
                .collect()
        };
        let first = build(Component::First);
        let second = build(Component::Second);
        level = BiLevel { first, second };
    }
    level
}

pub fn count_biterms(sig: &BiSignature, pools: &Pools, depth: usize) -> (u128, u128) {
    let slots = [bi_ctor_slots(sig, Component::First), bi_ctor_slots(sig, Component::Second)];
    let mut n = [0u128; 2];
    for _ in 0..depth {
        let mut next = [0u128; 2];
        for (s, ctors) in slots.iter().enumerate() {
            for (ctor, sl) in ctors {
                for sh in shapes(ctor, sl, pools) {
                    next[s] += sh.sorts.iter().map(|&k| n[k]).product::<u128>();
                }
            }
        }
        n = next;
    }
    (n[0], n[1])
}

/// The language corpus: every declaration and expression of depth at most
/// `depth` over [`Pools::lang`].
pub fn lang_corpus(depth: usize) -> BiLevel {
    enumerate_biterms(lang_signature(), &Pools::lang(), depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mendler::arith;

    #[test]
    fn arith_counts() {
        let sig = arith::signature();
        let pools = Pools::arith();
        assert_eq!(enumerate_terms(sig, &pools, 1).len(), 5);
        assert_eq!(enumerate_terms(sig, &pools, 2).len(), 30);
        assert_eq!(count_terms(sig, &pools, 3), 5 + 30 * 30);
        assert_eq!(enumerate_terms(sig, &pools, 3).len(), 905);
        assert_eq!(enumerate_terms(sig, &pools, 1)[0].to_string(), "(lit -2)");
    }

    #[test]
    fn lang_depth_two_by_hand() {
        // depth 1: env {} | var x | con x a
        // depth 2 decs: env {} + env {x: E1} (2) + match (2) + join (1)
        // depth 2 exps: var, con, clos {} (2), clos {x} (4), app (4), scope (2)
        assert_eq!(count_biterms(lang_signature(), &Pools::lang(), 1), (1, 2));
        assert_eq!(count_biterms(lang_signature(), &Pools::lang(), 2), (6, 14));
    }

    #[test]
    fn lang_counts_match_enumeration() {
        for d in 1..=3 {
            let (c1, c2) = count_biterms(lang_signature(), &Pools::lang(), d);
            let level = lang_corpus(d);
            assert_eq!((level.first.len() as u128, level.second.len() as u128), (c1, c2));
        }
    }
}
