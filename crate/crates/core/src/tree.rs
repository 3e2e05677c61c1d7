//! Oriented binary trees over element sets.
//!
//! Every internal node is a split `(A, B)` of its members where the left part
//! is meant to precede the right part. Reading the leaves from left to right
//! gives the linear order `≤_T` used throughout.

use ndarray::Array2;

use crate::error::{domain, Error, Result};
use crate::poset::{Clustering, CrispRelation, ElementId, RelaxedOrder};
use crate::set::ElementSet;

/// A node of an oriented binary tree, caching its member set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    members: ElementSet,
    size: usize,
    kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf(ElementId),
    Internal(Box<Node>, Box<Node>),
}

impl Node {
    pub fn leaf(x: ElementId) -> Node {
        Node {
            members: ElementSet::singleton(x),
            size: 1,
            kind: NodeKind::Leaf(x),
        }
    }

    /// Joins two subtrees with `left` preceding `right`.
    pub fn join(left: Node, right: Node) -> Result<Node> {
        if !left.members.is_disjoint(&right.members) {
            return domain(format!(
                "subtrees share elements: {:?} and {:?}",
                left.members, right.members
            ));
        }
        Ok(Node {
            members: left.members.union(&right.members),
            size: left.size + right.size,
            kind: NodeKind::Internal(Box::new(left), Box::new(right)),
        })
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }

    pub fn children(&self) -> Option<(&Node, &Node)> {
        match &self.kind {
            NodeKind::Leaf(_) => None,
            NodeKind::Internal(l, r) => Some((l, r)),
        }
    }

    fn push_leaves(&self, out: &mut Vec<ElementId>) {
        match &self.kind {
            NodeKind::Leaf(x) => out.push(*x),
            NodeKind::Internal(l, r) => {
                l.push_leaves(out);
                r.push_leaves(out);
            }
        }
    }

    fn push_splits<'a>(&'a self, out: &mut Vec<Split<'a>>) {
        if let NodeKind::Internal(l, r) = &self.kind {
            out.push(Split {
                size: self.size,
                left: &l.members,
                right: &r.members,
            });
            l.push_splits(out);
            r.push_splits(out);
        }
    }

    fn map_leaves(&self, phi: &[ElementId]) -> Node {
        match &self.kind {
            NodeKind::Leaf(x) => Node::leaf(phi[*x]),
            NodeKind::Internal(l, r) => {
                Node::join(l.map_leaves(phi), r.map_leaves(phi)).expect("bijection keeps children disjoint")
            }
        }
    }
}

/// An internal node seen as the split of its members into left and right.
#[derive(Clone, Copy, Debug)]
pub struct Split<'a> {
    pub size: usize,
    pub left: &'a ElementSet,
    pub right: &'a ElementSet,
}

/// A split `(A, B)` of a set into two nonempty disjoint parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedSplit {
    pub a: ElementSet,
    pub b: ElementSet,
}

impl OrderedSplit {
    pub fn new(a: ElementSet, b: ElementSet) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return domain("both sides of a split must be nonempty");
        }
        if !a.is_disjoint(&b) {
            return domain("the sides of a split must be disjoint");
        }
        Ok(Self { a, b })
    }
}

/// Pairwise ultrametric distances `|T[x∨y]| − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltraMetricMatrix {
    d: Array2<usize>,
}

impl UltraMetricMatrix {
    pub fn n(&self) -> usize {
        self.d.nrows()
    }

    pub fn get(&self, x: ElementId, y: ElementId) -> usize {
        self.d[[x, y]]
    }

    pub fn matrix(&self) -> &Array2<usize> {
        &self.d
    }

    /// Checks `d(x,z) ≤ max{d(x,y), d(y,z)}` on every triple.
    pub fn satisfies_ultrametric_inequality(&self) -> bool {
        let n = self.n();
        (0..n).all(|x| {
            (0..n).all(|y| (0..n).all(|z| self.d[[x, z]] <= self.d[[x, y]].max(self.d[[y, z]])))
        })
    }
}

/// A balanced split together with the path nodes it was read from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedSplit {
    pub split: OrderedSplit,
    /// `(left child, right child)` for each node of the head sequence.
    pub head: Vec<(ElementSet, ElementSet)>,
}

impl BalancedSplit {
    /// Size of the last head-sequence node.
    pub fn terminal_size(&self) -> usize {
        let (l, r) = self.head.last().expect("head sequence is nonempty");
        l.len() + r.len()
    }
}

/// A binary tree whose leaves are exactly the elements `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedBinaryTree {
    root: Node,
    order: Vec<ElementId>,
    position: Vec<usize>,
}

impl OrientedBinaryTree {
    pub fn new(root: Node) -> Result<Self> {
        let n = root.size;
        if root.members != ElementSet::full(n) {
            return domain(format!(
                "tree leaves {:?} are not the elements 0..{n}",
                root.members
            ));
        }
        let mut order = Vec::with_capacity(n);
        root.push_leaves(&mut order);
        let mut position = vec![0; n];
        for (i, &x) in order.iter().enumerate() {
            position[x] = i;
        }
        Ok(Self {
            root,
            order,
            position,
        })
    }

    /// The left-deep tree `((…(x1, x2), x3)…, xn)`.
    pub fn caterpillar(order: &[ElementId]) -> Result<Self> {
        let (&first, rest) = order
            .split_first()
            .ok_or_else(|| Error::Domain("a tree needs at least one leaf".into()))?;
        let mut node = Node::leaf(first);
        for &x in rest {
            node = Node::join(node, Node::leaf(x))?;
        }
        Self::new(node)
    }

    /// A tree of minimal depth whose leaf order is `order`.
    pub fn balanced(order: &[ElementId]) -> Result<Self> {
        fn build(order: &[ElementId]) -> Result<Node> {
            match order {
                [] => domain("a tree needs at least one leaf"),
                [x] => Ok(Node::leaf(*x)),
                _ => {
                    let (l, r) = order.split_at(order.len() / 2);
                    Node::join(build(l)?, build(r)?)
                }
            }
        }
        Self::new(build(order)?)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Leaves from left to right.
    pub fn leaf_order(&self) -> &[ElementId] {
        &self.order
    }

    /// Index of `x` in the leaf order.
    pub fn position(&self, x: ElementId) -> usize {
        self.position[x]
    }

    /// `x ≤_T y`.
    pub fn precedes(&self, x: ElementId, y: ElementId) -> bool {
        self.position[x] <= self.position[y]
    }

    /// All internal nodes in pre-order.
    pub fn splits(&self) -> Vec<Split<'_>> {
        let mut out = Vec::with_capacity(self.n().saturating_sub(1));
        self.root.push_splits(&mut out);
        out
    }

    fn check_element(&self, x: ElementId) -> Result<()> {
        if x < self.n() {
            Ok(())
        } else {
            domain(format!("element {x} is not a leaf of a tree over {} elements", self.n()))
        }
    }

    /// Number of leaves below the lowest common ancestor of `x` and `y`.
    pub fn join_size(&self, x: ElementId, y: ElementId) -> Result<usize> {
        self.check_element(x)?;
        self.check_element(y)?;
        let mut node = &self.root;
        while let Some((l, r)) = node.children() {
            match (l.members.contains(x), l.members.contains(y)) {
                (true, true) => node = l,
                (false, false) => node = r,
                _ => break,
            }
        }
        Ok(node.size)
    }

    pub fn ultrametric(&self) -> UltraMetricMatrix {
        let n = self.n();
        let mut d = Array2::zeros((n, n));
        for s in self.splits() {
            for a in s.left.iter() {
                for b in s.right.iter() {
                    d[[a, b]] = s.size - 1;
                    d[[b, a]] = s.size - 1;
                }
            }
        }
        UltraMetricMatrix { d }
    }

    /// The ultrametric scaled into `[0, 1]` by `n − 1`.
    pub fn normalized_ultrametric(&self) -> Result<Array2<f64>> {
        let n = self.n();
        if n < 2 {
            return domain("the normalised ultrametric needs at least two elements");
        }
        Ok(self.ultrametric().d.mapv(|v| v as f64 / (n - 1) as f64))
    }

    /// The blocks of `u_T ≤ t`, listed left to right.
    pub fn flat_clustering_at(&self, t: f64) -> Result<Clustering> {
        if t.is_nan() || t < 0.0 {
            return domain(format!("threshold must be nonnegative, got {t}"));
        }
        fn cut(node: &Node, t: f64, out: &mut Vec<Vec<ElementId>>) {
            match node.children() {
                Some((l, r)) if (node.size - 1) as f64 > t => {
                    cut(l, t, out);
                    cut(r, t, out);
                }
                _ => {
                    let mut block = Vec::with_capacity(node.size);
                    node.push_leaves(&mut block);
                    out.push(block);
                }
            }
        }
        let mut blocks = Vec::new();
        cut(&self.root, t, &mut blocks);
        Clustering::from_blocks(self.n(), blocks)
    }

    /// Distinct ultrametric levels at which the flat clustering changes,
    /// starting with 0 (singletons).
    pub fn levels(&self) -> Vec<usize> {
        let mut levels: Vec<usize> = std::iter::once(0)
            .chain(self.splits().iter().map(|s| s.size - 1))
            .collect();
        levels.sort_unstable();
        levels.dedup();
        levels
    }

    /// A related pair `(x, y)` with `y` placed before `x`, if any.
    pub fn order_violation(&self, r: &CrispRelation) -> Result<Option<(ElementId, ElementId)>> {
        if r.n() != self.n() {
            return domain(format!(
                "relation covers {} elements but the tree covers {}",
                r.n(),
                self.n()
            ));
        }
        if !r.is_acyclic() {
            return domain("order preservation is only defined for acyclic relations");
        }
        Ok(r.edges().find(|&(x, y)| !self.precedes(x, y)))
    }

    /// True iff every split `(A, B)` has no pair `b → a` with `a ∈ A`, `b ∈ B`.
    pub fn is_order_preserving(&self, r: &CrispRelation) -> Result<bool> {
        Ok(self.order_violation(r)?.is_none())
    }

    /// The same tree with every leaf `x` relabelled `phi[x]`.
    pub fn induced_tree(&self, phi: &[ElementId]) -> Result<Self> {
        let n = self.n();
        if phi.len() != n || phi.iter().copied().collect::<ElementSet>() != ElementSet::full(n) {
            return domain(format!("mapping {phi:?} is not a permutation of 0..{n}"));
        }
        Self::new(self.root.map_leaves(phi))
    }

    /// `g(x,y)` if `x ≤_T y`, otherwise `g(y,x)`.
    pub fn t_symmetrisation_value(&self, omega: &RelaxedOrder, x: ElementId, y: ElementId) -> Result<f64> {
        self.check_element(x)?;
        self.check_element(y)?;
        if self.precedes(x, y) {
            omega.antisymmetrisation(x, y)
        } else {
            omega.antisymmetrisation(y, x)
        }
    }

    /// Total weight of the cluster graph: join sizes times the
    /// tree-symmetrised antisymmetrisation, over unordered pairs.
    pub fn cluster_graph_total(&self, omega: &RelaxedOrder) -> Result<f64> {
        let n = self.n();
        if omega.n() != n {
            return domain(format!("omega covers {} elements, tree covers {n}", omega.n()));
        }
        let mut total = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                total += self.join_size(x, y)? as f64 * self.t_symmetrisation_value(omega, x, y)?;
            }
        }
        Ok(total)
    }

    /// Largest fraction of comparable pairs reversed by a single split.
    pub fn delta_goodness(&self, r: &CrispRelation) -> Result<f64> {
        if r.n() != self.n() {
            return domain(format!(
                "relation covers {} elements but the tree covers {}",
                r.n(),
                self.n()
            ));
        }
        if !r.is_acyclic() {
            return domain("delta goodness needs an acyclic relation");
        }
        let closure = r.transitive_closure();
        let pairs = closure.edge_count();
        if pairs == 0 {
            return domain("delta goodness is undefined without comparable pairs");
        }
        let worst = self
            .splits()
            .iter()
            .map(|s| closure.indicator_sum(s.right, s.left))
            .max()
            .unwrap_or(0);
        Ok(worst as f64 / pairs as f64)
    }

    /// Walks the maximum cardinality path (left on ties), splitting off the
    /// smaller child at each step until one accumulated side reaches `n/3`.
    pub fn balanced_t_split(&self) -> Result<BalancedSplit> {
        let n = self.n();
        if n < 2 {
            return domain("a balanced split needs at least two elements");
        }
        let third = |s: &ElementSet| 3 * s.len() >= n;
        let full = ElementSet::full(n);
        let (mut acc_a, mut acc_b) = (ElementSet::new(), ElementSet::new());
        let mut head = Vec::new();
        let mut node = &self.root;
        while let Some((l, r)) = node.children() {
            head.push((l.members.clone(), r.members.clone()));
            if l.size < r.size {
                acc_a = acc_a.union(&l.members);
                node = r;
            } else {
                acc_b = acc_b.union(&r.members);
                node = l;
            }
            if third(&acc_a) {
                let b = full.difference(&acc_a);
                return Ok(BalancedSplit {
                    split: OrderedSplit::new(acc_a, b)?,
                    head,
                });
            }
            if third(&acc_b) {
                let a = full.difference(&acc_b);
                return Ok(BalancedSplit {
                    split: OrderedSplit::new(a, acc_b)?,
                    head,
                });
            }
        }
        unreachable!("a path to a leaf always splits off at least (n-1)/2 elements")
    }
}
