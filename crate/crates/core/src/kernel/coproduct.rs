use super::{Algebra, KernelError, Node, Signature};

/// `F1 + F2`: the tagged union of two signatures' constructor sets.
///
/// Summands must have disjoint constructor names, so a node's constructor
/// determines its injection. Injections keep the node's data unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coproduct {
    left: Signature,
    right: Signature,
    sum: Signature,
}

/// A coproduct node after case analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Summand<A> {
    Left(Node<A>),
    Right(Node<A>),
}

impl Coproduct {
    pub fn new(name: &str, left: Signature, right: Signature) -> Result<Self, KernelError> {
        let ctors = left
            .constructors()
            .iter()
            .chain(right.constructors())
            .map(|c| (c.name(), c.slots().to_vec()))
            .collect::<Vec<_>>();
        let sum = Signature::new(name, ctors)?;
        Ok(Coproduct { left, right, sum })
    }

    pub fn left(&self) -> &Signature {
        &self.left
    }

    pub fn right(&self) -> &Signature {
        &self.right
    }

    /// The combined signature whose fixpoint is the modular datatype.
    pub fn signature(&self) -> &Signature {
        &self.sum
    }

    pub fn inject_left<A>(&self, node: Node<A>) -> Result<Node<A>, KernelError> {
        self.left.check_node(&node)?;
        Ok(node)
    }

    pub fn inject_right<A>(&self, node: Node<A>) -> Result<Node<A>, KernelError> {
        self.right.check_node(&node)?;
        Ok(node)
    }

    /// Total case analysis; `None` only for constructors foreign to both
    /// summands.
    pub fn project<A>(&self, node: Node<A>) -> Option<Summand<A>> {
        if self.left.contains(node.ctor()) {
            Some(Summand::Left(node))
        } else if self.right.contains(node.ctor()) {
            Some(Summand::Right(node))
        } else {
            None
        }
    }

    pub fn project_left<A>(&self, node: Node<A>) -> Option<Node<A>> {
        match self.project(node)? {
            Summand::Left(n) => Some(n),
            Summand::Right(_) => None,
        }
    }

    pub fn project_right<A>(&self, node: Node<A>) -> Option<Node<A>> {
        match self.project(node)? {
            Summand::Right(n) => Some(n),
            Summand::Left(_) => None,
        }
    }

    /// Combines one algebra per summand into an algebra for the sum,
    /// dispatching on the injection.
    pub fn algebra<'a, C, L, R>(&'a self, left: L, right: R) -> SumAlgebra<'a, L, R>
    where
        L: Algebra<C>,
        R: Algebra<C>,
    {
        SumAlgebra { cop: self, left, right }
    }
}

pub struct SumAlgebra<'a, L, R> {
    cop: &'a Coproduct,
    left: L,
    right: R,
}

impl<C, L: Algebra<C>, R: Algebra<C>> Algebra<C> for SumAlgebra<'_, L, R> {
    fn apply(&self, node: Node<C>) -> C {
        match self.cop.project(node) {
            Some(Summand::Left(n)) => self.left.apply(n),
            Some(Summand::Right(n)) => self.right.apply(n),
            None => panic!("node does not belong to coproduct {}", self.cop.sum.name()),
        }
    }
}
