use super::*;

fn arith() -> Signature {
    Signature::new(
        "arith",
        [("lit", vec![SlotKind::Payload(PayloadType::Int)]), ("add", vec![SlotKind::Rec, SlotKind::Rec])],
    )
    .unwrap()
}

fn lit(sig: &Signature, n: i64) -> Term {
    sig.in_(Node::new("lit", vec![], vec![Payload::Int(n)])).unwrap()
}

fn add(sig: &Signature, a: Term, b: Term) -> Term {
    sig.in_(Node::new("add", vec![a, b], vec![])).unwrap()
}

fn eval_alg(n: Node<i64>) -> i64 {
    match n.ctor() {
        "lit" => n.payload()[0].as_int().unwrap(),
        _ => n.rec()[0] + n.rec()[1],
    }
}

#[test]
fn malformed_nodes_are_rejected() {
    let sig = arith();
    let err = sig.in_(Node::new("add", vec![lit(&sig, 1)], vec![])).unwrap_err();
    assert!(matches!(err, KernelError::Malformed { .. }));
    let err = sig.in_(Node::new("lit", vec![], vec![Payload::Id("x".into())])).unwrap_err();
    assert!(matches!(err, KernelError::Malformed { .. }));
    let err = sig.in_(Node::new("mul", vec![], vec![])).unwrap_err();
    assert!(matches!(err, KernelError::UnknownConstructor { .. }));
}

#[test]
fn duplicate_constructor_names() {
    let err = Signature::new("bad", [("a", vec![]), ("a", vec![SlotKind::Rec])]).unwrap_err();
    assert_eq!(err, KernelError::DuplicateConstructor("a".into()));
}

#[test]
fn fold_and_mfold_agree() {
    let sig = arith();
    let t = add(&sig, add(&sig, lit(&sig, 1), lit(&sig, 1)), lit(&sig, 2));
    assert_eq!(fold_c(&eval_alg, &t), 4);
    assert_eq!(mfold(&lift(eval_alg), &t), 4);
}

#[test]
fn mendler_closure_counts_nodes() {
    let sig = arith();
    let size = mendler::<usize, _>(|rec, n| 1 + n.into_rec().into_iter().map(rec).sum::<usize>());
    let t = add(&sig, lit(&sig, 1), add(&sig, lit(&sig, 2), lit(&sig, 3)));
    assert_eq!(mfold(&size, &t), t.size());
}

#[test]
fn pre_in_with_constant() {
    let sig = arith();
    let zero = lit(&sig, 0);
    let t = sig.pre_in(|_: ()| zero.clone(), Node::new("add", vec![(), ()], vec![])).unwrap();
    assert_eq!(t, add(&sig, lit(&sig, 0), lit(&sig, 0)));
}

#[test]
fn uniqueness_verdicts() {
    let sig = arith();
    let samples = vec![lit(&sig, 1), add(&sig, lit(&sig, 2), lit(&sig, -1))];
    let m = lift(eval_alg);
    let good = |t: &Term| fold_c(&eval_alg, t);
    assert_eq!(check_uniqueness(&m, &good, &samples).unwrap(), Uniqueness::Holds { checked: 2 });
    let constant = |_: &Term| 0i64;
    assert_eq!(
        check_uniqueness(&m, &constant, &samples).unwrap(),
        Uniqueness::HypothesisViolation { sample: lit(&sig, 1) }
    );
    let nan = |_: &Term| f64::NAN;
    let mf = lift(|_: Node<f64>| f64::NAN);
    assert!(matches!(check_uniqueness(&mf, &nan, &samples), Err(KernelError::UnsupportedCarrier(_))));
}

#[test]
fn coproduct_projection() {
    let g1 = Signature::new("g1", [("lit", vec![SlotKind::Payload(PayloadType::Int)])]).unwrap();
    let g2 = Signature::new("g2", [("add", vec![SlotKind::Rec, SlotKind::Rec])]).unwrap();
    let cop = Coproduct::new("g", g1, g2).unwrap();
    let n: Node<()> = cop.inject_left(Node::new("lit", vec![], vec![Payload::Int(3)])).unwrap();
    assert_eq!(cop.project(n.clone()), Some(Summand::Left(n)));
    let a: Node<u8> = cop.inject_right(Node::new("add", vec![1, 2], vec![])).unwrap();
    assert_eq!(cop.project_left(a), None);
    assert!(cop.inject_left(Node::<u8>::new("add", vec![1, 2], vec![])).is_err());
    assert!(cop.project(Node::<u8>::new("mul", vec![], vec![])).is_none());
}

#[test]
fn json_round_trip() {
    let sig = arith();
    let t = add(&sig, lit(&sig, 2), lit(&sig, 3));
    let json = t.to_json();
    assert_eq!(
        json,
        serde_json::json!({"ctor": "add", "rec": [
            {"ctor": "lit", "rec": [], "payload": [{"int": 2}]},
            {"ctor": "lit", "rec": [], "payload": [{"int": 3}]}
        ], "payload": []})
    );
    assert_eq!(sig.term_from_json(&json).unwrap(), t);
    assert!(sig.term_from_json(&serde_json::json!({"ctor": "lit"})).is_err());
}

#[test]
fn church_round_trip() {
    let sig = arith();
    let t = add(&sig, lit(&sig, 2), add(&sig, lit(&sig, 3), lit(&sig, -1)));
    let f = church::reify(&t);
    assert_eq!(church::reflect(&f), t);
    assert_eq!(f.mfold(&lift(eval_alg)), 4);
    let node = f.out_();
    assert_eq!(node.ctor(), "add");
    assert_eq!(church::reflect(&node.rec()[1]), t.out_().rec()[1]);
    let rolled = church::FoldTerm::in_(&sig, node).unwrap();
    assert_eq!(church::reflect(&rolled), t);
}

#[cfg(debug_assertions)]
#[test]
#[should_panic(expected = "outside the step")]
fn handles_cannot_cross_steps() {
    use std::cell::Cell;
    let sig = arith();
    let t = add(&sig, lit(&sig, 1), lit(&sig, 2));
    // Smuggle a handle out of one step by its slot/nonce and replay it into
    // another step's recursion procedure.
    let stolen: Cell<Option<(usize, u64)>> = Cell::new(None);
    let m = mendler::<i64, _>(|rec, n| {
        if let Some((slot, nonce)) = stolen.get() {
            return rec(Handle::new(slot, nonce));
        }
        if let Some(h) = n.rec().first() {
            stolen.set(Some((h.slot, h.nonce)));
            return rec(*h);
        }
        0
    });
    mfold(&m, &t);
}
