use super::*;

// Even and odd naturals: evens are `zero | esucc(odd)`, odds are `osucc(even)`.
fn parity() -> BiSignature {
    BiSignature::new(
        "parity",
        [("zero", vec![]), ("esucc", vec![BiSlotKind::Rec(Component::Second)])],
        [("osucc", vec![BiSlotKind::Rec(Component::First)])],
    )
    .unwrap()
}

fn nat(sig: &BiSignature, n: usize) -> BiTerm {
    let mut t = sig.in_1(BiNode::new("zero", vec![], vec![])).unwrap();
    for i in 0..n {
        t = if i % 2 == 0 {
            sig.in_2(BiNode::new("osucc", vec![BiRec::First(t)], vec![])).unwrap()
        } else {
            sig.in_1(BiNode::new("esucc", vec![BiRec::Second(t)], vec![])).unwrap()
        };
    }
    t
}

struct Count;

impl BiMendlerAlgebra<usize, usize> for Count {
    fn step1<'h>(
        &self,
        _: &dyn Fn(Handle1<'h>) -> usize,
        rec2: &dyn Fn(Handle2<'h>) -> usize,
        node: HandleNode<'h>,
    ) -> usize {
        match node.into_rec().pop() {
            Some(BiRec::Second(h)) => 1 + rec2(h),
            _ => 0,
        }
    }

    fn step2<'h>(
        &self,
        rec1: &dyn Fn(Handle1<'h>) -> usize,
        _: &dyn Fn(Handle2<'h>) -> usize,
        node: HandleNode<'h>,
    ) -> usize {
        match node.into_rec().pop() {
            Some(BiRec::First(h)) => 1 + rec1(h),
            _ => unreachable!("osucc has one first-sort slot"),
        }
    }
}

#[test]
fn bifold_counts_across_sorts() {
    let sig = parity();
    assert_eq!(bifold_1(&Count, &nat(&sig, 4)).unwrap(), 4);
    assert_eq!(bifold_2(&Count, &nat(&sig, 5)).unwrap(), 5);
    assert!(bifold_1(&Count, &nat(&sig, 3)).is_err());
}

#[test]
fn sorts_are_checked() {
    let sig = parity();
    let zero = nat(&sig, 0);
    assert!(sig.in_1(BiNode::new("esucc", vec![BiRec::Second(zero.clone())], vec![])).is_err());
    assert!(sig.in_2(BiNode::new("zero", vec![], vec![])).is_err());
    assert!(BiSignature::new("dup", [("a", vec![])], [("a", vec![])]).is_err());
}

#[test]
fn json_round_trip() {
    let sig = parity();
    let t = nat(&sig, 3);
    assert_eq!(sig.term_from_json(&t.to_json()).unwrap(), t);
}
