//! Tree values and costs.
//!
//! Each objective sums `|T[x∨y]| · w(x,y)` over the pairs `x <_T y`, for a
//! pairwise weight `w` picked by [`ObjectiveKind`]. Values are maximised and
//! costs are minimised.

use ndarray::Array2;

use crate::error::{domain, Result};
use crate::poset::{Alpha, OrderedSimilaritySpace};
use crate::set::ElementSet;
use crate::tree::OrientedBinaryTree;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObjectiveKind {
    /// Weight `f = s_d + g`.
    ValF,
    /// Weight `g`, the antisymmetrised order.
    ValG,
    /// Weight `s_d = 1 − s`.
    ValSd,
    /// Weight `α·s_d + (1 − α)·g`.
    ValAlpha(Alpha),
    /// Weight `s`; the classical similarity cost.
    CostS,
    /// Weight `g_d = 1 − g`.
    CostGd,
    /// Weight `f_d = 2 − f`.
    CostFd,
    /// Weight `1 − f_α`.
    CostAlphaDual(Alpha),
}

impl ObjectiveKind {
    pub fn is_cost(self) -> bool {
        matches!(
            self,
            ObjectiveKind::CostS
                | ObjectiveKind::CostGd
                | ObjectiveKind::CostFd
                | ObjectiveKind::CostAlphaDual(_)
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::ValF => "val_f",
            ObjectiveKind::ValG => "val_g",
            ObjectiveKind::ValSd => "val_sd",
            ObjectiveKind::ValAlpha(_) => "val_alpha",
            ObjectiveKind::CostS => "cost_s",
            ObjectiveKind::CostGd => "cost_gd",
            ObjectiveKind::CostFd => "cost_fd",
            ObjectiveKind::CostAlphaDual(_) => "cost_alpha_dual",
        }
    }

    pub fn alpha(self) -> Option<Alpha> {
        match self {
            ObjectiveKind::ValAlpha(a) | ObjectiveKind::CostAlphaDual(a) => Some(a),
            _ => None,
        }
    }
}

/// `Σ_{x <_T y} |T[x∨y]|`, the same for every tree on `n` leaves.
pub fn total_join_weight(n: usize) -> f64 {
    let n = n as f64;
    (n * n * n - n) / 3.0
}

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(self) -> f64 {
        self.sum + self.carry
    }
}

/// The pairwise weight matrix of one objective, diagonal zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PairWeights {
    w: Array2<f64>,
}

impl PairWeights {
    pub fn new(space: &OrderedSimilaritySpace, kind: ObjectiveKind) -> Self {
        let n = space.n();
        let s = space.similarity();
        let om = space.omega();
        let w = Array2::from_shape_fn((n, n), |(x, y)| {
            if x == y {
                return 0.0;
            }
            let sd = 1.0 - s.get(x, y);
            let g = om.get(x, y) - om.get(y, x);
            match kind {
                ObjectiveKind::ValF => sd + g,
                ObjectiveKind::ValG => g,
                ObjectiveKind::ValSd => sd,
                ObjectiveKind::ValAlpha(a) => a.get() * sd + (1.0 - a.get()) * g,
                ObjectiveKind::CostS => s.get(x, y),
                ObjectiveKind::CostGd => 1.0 - g,
                ObjectiveKind::CostFd => 2.0 - (sd + g),
                ObjectiveKind::CostAlphaDual(a) => 1.0 - (a.get() * sd + (1.0 - a.get()) * g),
            }
        });
        Self { w }
    }

    /// Wraps an arbitrary weight matrix; the diagonal is ignored.
    pub fn from_matrix(mut w: Array2<f64>) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return domain(format!("weights must be square, got {:?}", w.dim()));
        }
        w.diag_mut().fill(0.0);
        Ok(Self { w })
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.w[[x, y]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.w
    }

    /// `w(A, B) = Σ_{a∈A, b∈B} w(a, b)`.
    pub fn cross(&self, a: &ElementSet, b: &ElementSet) -> f64 {
        let mut acc = Accumulator::default();
        for x in a.iter() {
            for y in b.iter() {
                acc.add(self.w[[x, y]]);
            }
        }
        acc.total()
    }

    /// `Σ_{S → (A,B)} |S| · w(A, B)` over the internal nodes of `tree`.
    pub fn tree_value(&self, tree: &OrientedBinaryTree) -> Result<f64> {
        if tree.n() != self.n() {
            return domain(format!(
                "tree covers {} elements but the weights cover {}",
                tree.n(),
                self.n()
            ));
        }
        let mut acc = Accumulator::default();
        for s in tree.splits() {
            let size = s.size as f64;
            for x in s.left.iter() {
                for y in s.right.iter() {
                    acc.add(size * self.w[[x, y]]);
                }
            }
        }
        Ok(acc.total())
    }
}

pub fn evaluate(space: &OrderedSimilaritySpace, tree: &OrientedBinaryTree, kind: ObjectiveKind) -> Result<f64> {
    PairWeights::new(space, kind).tree_value(tree)
}

/// `(val_sd(T), val_g(T))`; `val_α = α·val_sd + (1 − α)·val_g`.
pub fn value_decomposition(space: &OrderedSimilaritySpace, tree: &OrientedBinaryTree) -> Result<(f64, f64)> {
    Ok((
        evaluate(space, tree, ObjectiveKind::ValSd)?,
        evaluate(space, tree, ObjectiveKind::ValG)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{RelaxedOrder, Similarity};
    use ndarray::array;

    fn pair_space(sd: f64, w_xy: f64, w_yx: f64) -> OrderedSimilaritySpace {
        let s = Similarity::new(array![[0.0, 1.0 - sd], [1.0 - sd, 0.0]]).unwrap();
        let w = RelaxedOrder::new(array![[0.0, w_xy], [w_yx, 0.0]]).unwrap();
        OrderedSimilaritySpace::new(s, w).unwrap()
    }

    #[test]
    fn single_pair_value() {
        let sp = pair_space(0.4, 0.9, 0.1);
        let t = OrientedBinaryTree::caterpillar(&[0, 1]).unwrap();
        assert!((evaluate(&sp, &t, ObjectiveKind::ValF).unwrap() - 2.4).abs() < 1e-12);
        let rev = OrientedBinaryTree::caterpillar(&[1, 0]).unwrap();
        assert!((evaluate(&sp, &rev, ObjectiveKind::ValF).unwrap() - 2.0 * (0.4 - 0.8)).abs() < 1e-12);
    }

    #[test]
    fn constant_weight_gives_total_join_weight() {
        let w = PairWeights::from_matrix(Array2::ones((3, 3))).unwrap();
        for order in [[0, 1, 2], [2, 0, 1]] {
            let t = OrientedBinaryTree::caterpillar(&order).unwrap();
            assert_eq!(w.tree_value(&t).unwrap(), 8.0);
            let b = OrientedBinaryTree::balanced(&order).unwrap();
            assert_eq!(w.tree_value(&b).unwrap(), 8.0);
        }
        assert_eq!(total_join_weight(3), 8.0);
    }

    #[test]
    fn symmetric_omega_has_zero_order_value() {
        let s = Similarity::constant(4, 0.3).unwrap();
        let w = RelaxedOrder::new(Array2::from_elem((4, 4), 0.6)).unwrap();
        let sp = OrderedSimilaritySpace::new(s, w).unwrap();
        let t = OrientedBinaryTree::balanced(&[3, 1, 0, 2]).unwrap();
        assert_eq!(evaluate(&sp, &t, ObjectiveKind::ValG).unwrap(), 0.0);
    }

    #[test]
    fn leaf_set_mismatch() {
        let sp = pair_space(0.4, 0.9, 0.1);
        let t = OrientedBinaryTree::caterpillar(&[0, 1, 2]).unwrap();
        assert!(evaluate(&sp, &t, ObjectiveKind::ValF).is_err());
    }

    #[test]
    fn decomposition_endpoints() {
        let sp = pair_space(0.4, 0.9, 0.1);
        let t = OrientedBinaryTree::caterpillar(&[0, 1]).unwrap();
        let (sd, g) = value_decomposition(&sp, &t).unwrap();
        let at = |a| evaluate(&sp, &t, ObjectiveKind::ValAlpha(Alpha::new(a).unwrap())).unwrap();
        assert_eq!(at(0.0), g);
        assert_eq!(at(1.0), sd);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = Accumulator::default();
        acc.add(1e16);
        for _ in 0..10 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.total(), 10.0);
    }
}
