//! Element sets carrying a similarity and a relaxed order, plus crisp
//! partial-order utilities.
//!
//! Elements are dense indices `0..n`. Every pairwise matrix has an unused
//! diagonal; constructors zero it so that downstream sums never pick it up.

use std::collections::VecDeque;

use ndarray::Array2;

use crate::error::{domain, Result};
use crate::set::ElementSet;

/// Index of an element in `0..n`.
pub type ElementId = usize;

/// Convex weight between the similarity and the order objectives.
///
/// `Alpha(1.0)` optimises for dissimilarity only, `Alpha(0.0)` for the order
/// relation only.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    /// The balanced weight. Optimising at one half is the same as optimising
    /// the unweighted sum of dissimilarity and antisymmetrised order.
    pub const HALF: Alpha = Alpha(0.5);

    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Alpha(alpha))
        } else {
            domain(format!("alpha must lie in [0, 1], got {alpha}"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = crate::Error;
    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

fn check_square_unit(m: &Array2<f64>, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return domain(format!("{what} must be square, got {:?}", m.dim()));
    }
    for ((i, j), &v) in m.indexed_iter() {
        if i != j && !(0.0..=1.0).contains(&v) {
            return domain(format!("{what}({i},{j}) = {v} lies outside [0, 1]"));
        }
    }
    Ok(())
}

fn distinct(x: ElementId, y: ElementId) -> Result<()> {
    if x == y {
        domain(format!("pairwise functions need distinct elements, got ({x},{x})"))
    } else {
        Ok(())
    }
}

/// A weight `ω(x, y) ∈ [0, 1]` for every ordered pair, read as the
/// probability that `x` precedes `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedOrder {
    w: Array2<f64>,
}

impl RelaxedOrder {
    pub fn new(mut w: Array2<f64>) -> Result<Self> {
        check_square_unit(&w, "omega")?;
        w.diag_mut().fill(0.0);
        Ok(Self { w })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            w: Array2::zeros((n, n)),
        }
    }

    /// The indicator of a crisp relation.
    pub fn indicator(r: &CrispRelation) -> Self {
        Self::from_relation(r, 1.0, 0.0).expect("indicator weights are valid")
    }

    /// `p` on related pairs and `q` elsewhere.
    pub fn from_relation(r: &CrispRelation, p: f64, q: f64) -> Result<Self> {
        let n = r.n();
        let w = Array2::from_shape_fn((n, n), |(i, j)| if r.has(i, j) { p } else { q });
        Self::new(w)
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn get(&self, x: ElementId, y: ElementId) -> f64 {
        self.w[[x, y]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.w
    }

    /// Signed net comparability `ω(x,y) − ω(y,x)`.
    pub fn antisymmetrisation(&self, x: ElementId, y: ElementId) -> Result<f64> {
        distinct(x, y)?;
        Ok(self.g(x, y))
    }

    /// `1 − g(x,y)`, the nonnegative dual of the antisymmetrisation.
    pub fn dual_antisymmetrisation(&self, x: ElementId, y: ElementId) -> Result<f64> {
        Ok(1.0 - self.antisymmetrisation(x, y)?)
    }

    pub(crate) fn g(&self, x: ElementId, y: ElementId) -> f64 {
        self.w[[x, y]] - self.w[[y, x]]
    }
}

/// A symmetric similarity `s(x, y) ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Similarity {
    s: Array2<f64>,
}

impl Similarity {
    pub fn new(mut s: Array2<f64>) -> Result<Self> {
        check_square_unit(&s, "similarity")?;
        let n = s.nrows();
        for i in 0..n {
            for j in i + 1..n {
                if s[[i, j]] != s[[j, i]] {
                    return domain(format!(
                        "similarity is not symmetric at ({i},{j}): {} vs {}",
                        s[[i, j]],
                        s[[j, i]]
                    ));
                }
            }
        }
        s.diag_mut().fill(0.0);
        Ok(Self { s })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(Array2::from_elem((n, n), value))
    }

    /// Builds `s = 1 − d` from a dissimilarity matrix.
    pub fn from_dissimilarity(d: &Array2<f64>) -> Result<Self> {
        Self::new(d.mapv(|v| 1.0 - v))
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    pub fn get(&self, x: ElementId, y: ElementId) -> f64 {
        self.s[[x, y]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.s
    }

    /// The dissimilarity `s_d(x, y) = 1 − s(x, y)`.
    pub fn dual(&self, x: ElementId, y: ElementId) -> Result<f64> {
        distinct(x, y)?;
        Ok(1.0 - self.s[[x, y]])
    }
}

/// Elements with a similarity and a relaxed order over them.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedSimilaritySpace {
    similarity: Similarity,
    omega: RelaxedOrder,
    labels: Option<Vec<String>>,
}

impl OrderedSimilaritySpace {
    pub fn new(similarity: Similarity, omega: RelaxedOrder) -> Result<Self> {
        if similarity.n() != omega.n() {
            return domain(format!(
                "similarity covers {} elements but omega covers {}",
                similarity.n(),
                omega.n()
            ));
        }
        Ok(Self {
            similarity,
            omega,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return domain(format!(
                "{} labels given for {} elements",
                labels.len(),
                self.n()
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.omega.n()
    }

    pub fn similarity(&self) -> &Similarity {
        &self.similarity
    }

    pub fn omega(&self) -> &RelaxedOrder {
        &self.omega
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `x`, falling back to its index.
    pub fn label(&self, x: ElementId) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// `f(x,y) = s_d(x,y) + g(x,y)`, in `[-1, 2]`.
    pub fn split_value(&self, x: ElementId, y: ElementId) -> Result<f64> {
        Ok(self.similarity.dual(x, y)? + self.omega.g(x, y))
    }

    /// `α·s_d(x,y) + (1 − α)·g(x,y)`.
    pub fn split_value_alpha(&self, alpha: Alpha, x: ElementId, y: ElementId) -> Result<f64> {
        distinct(x, y)?;
        Ok(self.f_alpha(alpha, x, y))
    }

    /// `1 − f_α(x,y) = α·s(x,y) + (1 − α)·g_d(x,y)`, nonnegative.
    pub fn dual_split_weight(&self, alpha: Alpha, x: ElementId, y: ElementId) -> Result<f64> {
        Ok(1.0 - self.split_value_alpha(alpha, x, y)?)
    }

    /// `f_d(x,y) = 2 − f(x,y)`, in `[0, 3]`.
    pub fn dual_split_value(&self, x: ElementId, y: ElementId) -> Result<f64> {
        Ok(2.0 - self.split_value(x, y)?)
    }

    pub(crate) fn f_alpha(&self, alpha: Alpha, x: ElementId, y: ElementId) -> f64 {
        let a = alpha.get();
        a * (1.0 - self.similarity.get(x, y)) + (1.0 - a) * self.omega.g(x, y)
    }
}

/// A strict (irreflexive) binary relation stored as a dense adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrispRelation {
    adj: Array2<bool>,
}

impl CrispRelation {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: Array2::from_elem((n, n), false),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (ElementId, ElementId)>) -> Result<Self> {
        let mut r = Self::empty(n);
        for (x, y) in edges {
            r.add(x, y)?;
        }
        Ok(r)
    }

    /// Adds `x → y`. Self-loops and out-of-range endpoints are rejected.
    pub fn add(&mut self, x: ElementId, y: ElementId) -> Result<()> {
        let n = self.n();
        if x >= n || y >= n {
            return domain(format!("edge ({x},{y}) out of range for {n} elements"));
        }
        if x == y {
            return domain(format!("relation is stored irreflexively; got ({x},{x})"));
        }
        self.adj[[x, y]] = true;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.nrows()
    }

    pub fn has(&self, x: ElementId, y: ElementId) -> bool {
        self.adj[[x, y]]
    }

    pub fn edges(&self) -> impl Iterator<Item = (ElementId, ElementId)> + '_ {
        self.adj
            .indexed_iter()
            .filter(|(_, &e)| e)
            .map(|(ij, _)| ij)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count()
    }

    fn reachability(&self) -> Vec<ElementSet> {
        let n = self.n();
        let mut reach: Vec<ElementSet> = (0..n)
            .map(|i| (0..n).filter(|&j| self.adj[[i, j]]).collect())
            .collect();
        for k in 0..n {
            let via = reach[k].clone();
            for row in reach.iter_mut() {
                if row.contains(k) {
                    *row = row.union(&via);
                }
            }
        }
        reach
    }

    /// Reachability closure. Elements on a cycle reach themselves, which is
    /// reported by [`CrispRelation::is_acyclic`] rather than stored.
    pub fn transitive_closure(&self) -> CrispRelation {
        let reach = self.reachability();
        let n = self.n();
        CrispRelation {
            adj: Array2::from_shape_fn((n, n), |(i, j)| i != j && reach[i].contains(j)),
        }
    }

    /// Elements lying on a directed cycle.
    pub fn cyclic_elements(&self) -> ElementSet {
        self.reachability()
            .iter()
            .enumerate()
            .filter(|(i, row)| row.contains(*i))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// True iff the relation is transitively closed and has no cycle.
    pub fn is_strict_partial_order(&self) -> bool {
        self.is_acyclic() && self.transitive_closure() == *self
    }

    /// Kahn's algorithm; `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<ElementId>> {
        let n = self.n();
        let mut indegree: Vec<usize> = (0..n)
            .map(|j| (0..n).filter(|&i| self.adj[[i, j]]).count())
            .collect();
        let mut queue: VecDeque<_> = (0..n).filter(|&j| indegree[j] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for y in 0..n {
                if self.adj[[x, y]] {
                    indegree[y] -= 1;
                    if indegree[y] == 0 {
                        queue.push_back(y);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Number of pairs `(a, b) ∈ A × B` with `a → b`.
    pub fn indicator_sum(&self, a: &ElementSet, b: &ElementSet) -> usize {
        a.iter()
            .map(|x| b.iter().filter(|&y| self.adj[[x, y]]).count())
            .sum()
    }

    /// Length in edges of a longest chain from `x` to `y`; zero when `y` is
    /// not reachable from `x`. Any acyclic relation is accepted, so cover
    /// relations and their closures give the same answer.
    pub fn jmp(&self, x: ElementId, y: ElementId) -> Result<usize> {
        let order = self
            .topological_order()
            .ok_or_else(|| crate::Error::Domain("jmp needs an acyclic relation".into()))?;
        let n = self.n();
        if x >= n || y >= n {
            return domain(format!("elements ({x},{y}) out of range for {n} elements"));
        }
        let mut longest: Vec<Option<usize>> = vec![None; n];
        longest[x] = Some(0);
        for &u in order.iter().skip_while(|&&u| u != x) {
            let Some(d) = longest[u] else { continue };
            for v in 0..n {
                if self.adj[[u, v]] && longest[v].is_none_or(|dv| dv < d + 1) {
                    longest[v] = Some(d + 1);
                }
            }
        }
        Ok(longest[y].unwrap_or(0))
    }

    /// Ordered separation `max{jmp(x,y), jmp(y,x)}`.
    pub fn sep(&self, x: ElementId, y: ElementId) -> Result<usize> {
        Ok(self.jmp(x, y)?.max(self.jmp(y, x)?))
    }
}

/// A partition of `0..n` into nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    block_of: Vec<usize>,
    blocks: Vec<Vec<ElementId>>,
}

impl Clustering {
    pub fn from_blocks(n: usize, blocks: Vec<Vec<ElementId>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        for (b, members) in blocks.iter().enumerate() {
            if members.is_empty() {
                return domain(format!("block {b} is empty"));
            }
            for &x in members {
                if x >= n {
                    return domain(format!("element {x} out of range for {n} elements"));
                }
                if block_of[x] != usize::MAX {
                    return domain(format!("element {x} appears in two blocks"));
                }
                block_of[x] = b;
            }
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return domain(format!("element {x} is not covered by any block"));
        }
        Ok(Self { block_of, blocks })
    }

    /// Blocks numbered in order of first appearance.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<ElementId>> = Vec::new();
        let block_of = labels
            .iter()
            .enumerate()
            .map(|(x, l)| {
                let b = *ids.entry(l).or_insert_with(|| {
                    blocks.push(Vec::new());
                    blocks.len() - 1
                });
                blocks[b].push(x);
                b
            })
            .collect();
        Self { block_of, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn one_block(n: usize) -> Self {
        Self::from_labels(&vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, x: ElementId) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn blocks(&self) -> &[Vec<ElementId>] {
        &self.blocks
    }

    /// Blocks with sorted members, sorted by smallest member.
    pub fn canonical(&self) -> Vec<Vec<ElementId>> {
        let mut blocks: Vec<Vec<_>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        blocks
    }

    pub fn same_partition(&self, other: &Clustering) -> bool {
        self.canonical() == other.canonical()
    }

    /// Block-level edges `C_i → C_j` (`i ≠ j`) wherever some member of
    /// `C_i` relates to some member of `C_j`, before closure.
    pub fn quotient_edges(&self, r: &CrispRelation) -> CrispRelation {
        let mut q = CrispRelation::empty(self.num_blocks());
        for (x, y) in r.edges() {
            let (bx, by) = (self.block_of[x], self.block_of[y]);
            if bx != by {
                q.adj[[bx, by]] = true;
            }
        }
        q
    }
}

/// The relation a clustering inherits from an order on its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedRelation {
    /// Transitively closed block relation, indexed like `Clustering::blocks`.
    pub relation: CrispRelation,
    /// Whether the closure is acyclic, i.e. a strict partial order on blocks.
    pub is_partial_order: bool,
}

pub fn induced_relation(r: &CrispRelation, c: &Clustering) -> Result<InducedRelation> {
    if r.n() != c.n() {
        return domain(format!(
            "relation covers {} elements but clustering covers {}",
            r.n(),
            c.n()
        ));
    }
    let quotient = c.quotient_edges(r);
    let is_partial_order = quotient.is_acyclic();
    Ok(InducedRelation {
        relation: quotient.transitive_closure(),
        is_partial_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn space(sd: f64, w_xy: f64, w_yx: f64) -> OrderedSimilaritySpace {
        let s = Similarity::new(array![[0.0, 1.0 - sd], [1.0 - sd, 0.0]]).unwrap();
        let w = RelaxedOrder::new(array![[0.0, w_xy], [w_yx, 0.0]]).unwrap();
        OrderedSimilaritySpace::new(s, w).unwrap()
    }

    #[test]
    fn antisymmetrisation_examples() {
        let w = RelaxedOrder::new(array![[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(w.antisymmetrisation(0, 1).unwrap(), 1.0);
        assert_eq!(w.antisymmetrisation(1, 0).unwrap(), -1.0);
        let w = RelaxedOrder::new(array![[0.0, 0.5], [0.5, 0.0]]).unwrap();
        assert_eq!(w.antisymmetrisation(0, 1).unwrap(), 0.0);
        assert!(w.antisymmetrisation(1, 1).is_err());
    }

    #[test]
    fn dual_similarity_examples() {
        let s = Similarity::new(array![[0.0, 1.0, 0.0], [1.0, 0.0, 0.72], [0.0, 0.72, 0.0]]).unwrap();
        assert_eq!(s.dual(0, 1).unwrap(), 0.0);
        assert_eq!(s.dual(0, 2).unwrap(), 1.0);
        assert!((s.dual(1, 2).unwrap() - 0.28).abs() < 1e-15);
        assert!(s.dual(2, 2).is_err());
    }

    #[test]
    fn split_values() {
        assert_eq!(space(1.0, 1.0, 0.0).split_value(0, 1).unwrap(), 2.0);
        assert_eq!(space(0.0, 0.3, 0.3).split_value(0, 1).unwrap(), 0.0);
        let sp = space(0.4, 0.9, 0.1);
        assert!((sp.split_value(0, 1).unwrap() - 1.2).abs() < 1e-12);
        assert!((sp.dual_split_value(0, 1).unwrap() - 0.8).abs() < 1e-12);
        assert!(sp.split_value(0, 0).is_err());
    }

    #[test]
    fn split_value_alpha_endpoints_and_midpoint() {
        let sp = space(0.4, 0.9, 0.1);
        let one = Alpha::new(1.0).unwrap();
        let zero = Alpha::new(0.0).unwrap();
        assert!((sp.split_value_alpha(one, 0, 1).unwrap() - 0.4).abs() < 1e-12);
        assert!((sp.split_value_alpha(zero, 0, 1).unwrap() - 0.8).abs() < 1e-12);
        let f = sp.split_value_alpha(Alpha::HALF, 0, 1).unwrap();
        assert!((f - 0.6).abs() < 1e-12);
        assert!((sp.dual_split_weight(Alpha::HALF, 0, 1).unwrap() - 0.4).abs() < 1e-12);
        assert!(Alpha::new(1.5).is_err());
        assert!(Alpha::new(-0.1).is_err());
    }

    #[test]
    fn dual_split_value_decomposes() {
        let sp = space(0.4, 0.9, 0.1);
        let fd = sp.dual_split_value(0, 1).unwrap();
        let s = sp.similarity().get(0, 1);
        let gd = sp.omega().dual_antisymmetrisation(0, 1).unwrap();
        assert!((fd - (s + gd)).abs() < 1e-15);
        let full = space(1.0, 1.0, 0.0);
        assert_eq!(full.dual_split_value(0, 1).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(Similarity::new(array![[0.0, 0.2], [0.3, 0.0]]).is_err());
        assert!(RelaxedOrder::new(array![[0.0, 1.2], [0.0, 0.0]]).is_err());
        assert!(Similarity::new(Array2::zeros((2, 3))).is_err());
        let s = Similarity::constant(2, 0.0).unwrap();
        assert!(OrderedSimilaritySpace::new(s, RelaxedOrder::zeros(3)).is_err());
    }

    #[test]
    fn closure_examples() {
        let r = CrispRelation::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = r.transitive_closure();
        assert!(c.has(0, 2));
        assert_eq!(c.edge_count(), 3);
        assert_eq!(CrispRelation::empty(4).transitive_closure(), CrispRelation::empty(4));

        let cycle = CrispRelation::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let c = cycle.transitive_closure();
        assert_eq!(c.edge_count(), 12);
        assert_eq!(cycle.cyclic_elements().len(), 4);
        assert!(!cycle.is_acyclic());
    }

    #[test]
    fn partial_order_predicate() {
        let chain = CrispRelation::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(chain.is_strict_partial_order());
        let cover = CrispRelation::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(!cover.is_strict_partial_order());
        let two_cycle = CrispRelation::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert!(!two_cycle.is_strict_partial_order());
        assert!(CrispRelation::from_edges(2, [(1, 1)]).is_err());
    }

    #[test]
    fn indicator_sum_examples() {
        let r = CrispRelation::from_edges(4, [(0, 1)]).unwrap();
        let a = ElementSet::singleton(0);
        let b = ElementSet::singleton(1);
        assert_eq!(r.indicator_sum(&a, &b), 1);
        assert_eq!(r.indicator_sum(&b, &a), 0);
        let c: ElementSet = [2, 3].into_iter().collect();
        assert_eq!(r.indicator_sum(&a, &c), 0);
    }

    #[test]
    fn jmp_and_sep() {
        let cover = CrispRelation::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(cover.jmp(0, 2).unwrap(), 2);
        assert_eq!(cover.transitive_closure().jmp(0, 2).unwrap(), 2);
        assert_eq!(cover.jmp(2, 0).unwrap(), 0);
        assert_eq!(cover.jmp(0, 3).unwrap(), 0);
        assert_eq!(cover.sep(2, 0).unwrap(), 2);
        assert_eq!(cover.sep(1, 1).unwrap(), 0);
        let cyclic = CrispRelation::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert!(cyclic.jmp(0, 1).is_err());
    }

    #[test]
    fn jmp_follows_longest_chain_not_shortest_path() {
        // 0 → 3 directly, and 0 → 1 → 2 → 3.
        let r = CrispRelation::from_edges(4, [(0, 3), (0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(r.jmp(0, 3).unwrap(), 3);
    }

    // a=0, b=1, c=2, d=3 with a<b and c<d.
    fn parts() -> CrispRelation {
        CrispRelation::from_edges(4, [(0, 1), (2, 3)]).unwrap()
    }

    #[test]
    fn induced_relation_copy_pairs() {
        let c = Clustering::from_blocks(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let ind = induced_relation(&parts(), &c).unwrap();
        assert!(ind.is_partial_order);
        assert_eq!(ind.relation.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn induced_relation_crossed_pairs_is_cyclic() {
        let c = Clustering::from_blocks(4, vec![vec![0, 3], vec![1, 2]]).unwrap();
        let ind = induced_relation(&parts(), &c).unwrap();
        assert!(!ind.is_partial_order);
    }

    #[test]
    fn induced_relation_of_singletons_is_closure() {
        let r = CrispRelation::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let ind = induced_relation(&r, &Clustering::singletons(3)).unwrap();
        assert_eq!(ind.relation, r.transitive_closure());
        assert!(ind.is_partial_order);
    }

    #[test]
    fn clustering_validation() {
        assert!(Clustering::from_blocks(3, vec![vec![0, 1]]).is_err());
        assert!(Clustering::from_blocks(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Clustering::from_blocks(2, vec![vec![0, 1], vec![]]).is_err());
        let a = Clustering::from_labels(&["x", "y", "x"]);
        let b = Clustering::from_blocks(3, vec![vec![1], vec![2, 0]]).unwrap();
        assert!(a.same_partition(&b));
        assert_eq!(a.num_blocks(), 2);
    }
}
