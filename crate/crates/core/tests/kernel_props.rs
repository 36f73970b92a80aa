use mendler::arith::{self, add, eval, eval_algebra, eval_g1, eval_g2, lit, Val};
use mendler::kernel::church::{reflect, reify};
use mendler::kernel::{check_uniqueness, fmap, fold_c, lift, mendler, mfold, Node, Summand, Term, Uniqueness};
use proptest::prelude::*;

/// Independent reference: structural recursion on the printed form.
fn oracle(t: &Term) -> i64 {
    let s = arith::print(t);
    fn go(s: &str) -> (i64, &str) {
        if let Some(rest) = s.strip_prefix("(lit ") {
            let end = rest.find(')').unwrap();
            (rest[..end].parse().unwrap(), &rest[end + 1..])
        } else {
            let rest = s.strip_prefix("(add ").unwrap();
            let (a, rest) = go(rest);
            let (b, rest) = go(rest.strip_prefix(' ').unwrap());
            (a.wrapping_add(b), rest.strip_prefix(')').unwrap())
        }
    }
    go(&s).0
}

fn term() -> impl Strategy<Value = Term> {
    any::<i64>()
        .prop_map(|x| lit(x % 1000))
        .prop_recursive(6, 64, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| add(a, b)))
}

fn size(n: Node<usize>) -> usize {
    1 + n.rec().iter().sum::<usize>()
}

proptest! {
    #[test]
    fn fmap_identity(t in term()) {
        let n = t.out_().clone();
        prop_assert_eq!(fmap(|x| x, n.clone()), n);
    }

    #[test]
    fn fmap_composition(t in term()) {
        let n = t.out_().clone();
        let f = |t: Term| t.size();
        let g = |k: usize| k * 3 + 1;
        prop_assert_eq!(fmap(|x| g(f(x)), n.clone()), fmap(g, fmap(f, n)));
    }

    #[test]
    fn in_out_round_trip(t in term()) {
        prop_assert_eq!(arith::signature().in_(t.out_().clone()).unwrap(), t);
    }

    #[test]
    fn eval_matches_oracle(t in term()) {
        prop_assert_eq!(eval(&t), Val(oracle(&t)));
    }

    #[test]
    fn fold_computation_rule(t in term()) {
        let unrolled = size(fmap(|c: Term| fold_c(&size, &c), t.out_().clone()));
        prop_assert_eq!(fold_c(&size, &t), unrolled);
        prop_assert_eq!(fold_c(&size, &t), t.size());
    }

    #[test]
    fn lifted_mendler_fold_is_the_fold(t in term()) {
        prop_assert_eq!(mfold(&lift(eval_algebra), &t), fold_c(&eval_algebra, &t));
        prop_assert_eq!(mfold(&lift(size), &t), t.size());
    }

    #[test]
    fn mendler_step_may_skip_children(t in term()) {
        // Leftmost spine length; the right children are never visited.
        let spine = mendler::<usize, _>(|rec, n| n.rec().first().map_or(0, |h| 1 + rec(*h)));
        let mut expect = 0;
        let mut cur = t.clone();
        while let Some(first) = cur.out_().rec().first().cloned() {
            expect += 1;
            cur = first;
        }
        prop_assert_eq!(mfold(&spine, &t), expect);
    }

    #[test]
    fn church_encoding_round_trips(t in term()) {
        let f = reify(&t);
        prop_assert_eq!(reflect(&f), t.clone());
        prop_assert_eq!(f.mfold(&lift(eval_algebra)), eval(&t));
    }

    #[test]
    fn json_round_trip(t in term()) {
        prop_assert_eq!(arith::signature().term_from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn surface_round_trip(t in term()) {
        prop_assert_eq!(arith::parse(&arith::print(&t)).unwrap(), t);
    }

    #[test]
    fn coproduct_dispatch(t in term()) {
        let cop = arith::trm();
        let n = t.out_().clone();
        let back = match cop.project(n.clone()).unwrap() {
            Summand::Left(m) => cop.inject_left(m).unwrap(),
            Summand::Right(m) => cop.inject_right(m).unwrap(),
        };
        prop_assert_eq!(back, n);
        prop_assert_eq!(fold_c(&cop.algebra(eval_g1, eval_g2), &t), eval(&t));
    }

    #[test]
    fn uniqueness_against_the_oracle(ts in prop::collection::vec(term(), 1..20)) {
        let m = lift(eval_algebra);
        let h = |t: &Term| Val(oracle(t));
        prop_assert_eq!(check_uniqueness(&m, &h, &ts).unwrap(), Uniqueness::Holds { checked: ts.len() });
    }
}

#[test]
fn broken_h_violates_the_hypothesis() {
    let m = lift(eval_algebra);
    let off_by_one = |t: &Term| Val(oracle(t) + 1);
    let samples = [add(lit(1), lit(2))];
    assert!(matches!(check_uniqueness(&m, &off_by_one, &samples), Ok(Uniqueness::HypothesisViolation { .. })));
}
