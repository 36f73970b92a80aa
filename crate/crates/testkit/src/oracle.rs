//! Reference implementations written by direct recursion on term structure.
//! Nothing here goes through the kernel's folds.

use mendler::arith::Val;
use mendler::kernel::{Payload, Term};

/// Evaluates an arithmetic term: `lit x` is `x`, `add` adds (wrapping).
///
/// Panics on a term outside the arithmetic signature.
pub fn oracle_eval(t: &Term) -> Val {
    let node = t.out_();
    match (node.ctor(), node.rec(), node.payload()) {
        ("lit", [], [Payload::Int(x)]) => Val(*x),
        ("add", [a, b], []) => Val(oracle_eval(a).0.wrapping_add(oracle_eval(b).0)),
        _ => panic!("oracle_eval: not an arithmetic term: {t}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mendler::arith::{add, lit};

    #[test]
    fn literal_and_sum() {
        assert_eq!(oracle_eval(&lit(3)), Val(3));
        assert_eq!(oracle_eval(&add(lit(2), lit(3))), Val(5));
        assert_eq!(oracle_eval(&add(lit(i64::MAX), lit(1))), Val(i64::MIN));
    }
}
