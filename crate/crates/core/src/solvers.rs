//! Optimal trees by dynamic programming over subsets, and the recursive
//! sparsest-cut approximation.

use std::time::{Duration, Instant};

use crate::cuts::{AutoCut, CutFunction, ExactCut, LocalSearchCut, DEFAULT_CUT_LIMIT};
use crate::error::{domain, Error, Result};
use crate::objective::{evaluate, ObjectiveKind, PairWeights};
use crate::poset::{Alpha, OrderedSimilaritySpace};
use crate::set::ElementSet;
use crate::tree::{Node, OrientedBinaryTree};

/// Default largest instance for the exact solver.
pub const DEFAULT_EXACT_LIMIT: usize = 14;
/// The exact solver refuses anything larger regardless of configuration.
pub const MAX_EXACT_LIMIT: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Approx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximise,
    Minimise,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    /// Ordered splits scored (DP transitions or cut evaluations).
    pub splits_evaluated: u64,
    /// Internal nodes of the returned tree.
    pub internal_nodes: usize,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub tree: OrientedBinaryTree,
    /// `val_α` of the tree, recomputed from scratch.
    pub value: f64,
    pub alpha: Alpha,
    pub solver: SolverKind,
    /// Name of the cut function for approximate runs.
    pub cut: Option<&'static str>,
    pub stats: SolveStats,
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// An optimal tree for the tree objective with pairwise weights `w`.
///
/// Every subset `S` gets `V(S) = best over ordered splits (A, B) of
/// |S|·w(A,B) + V(A) + V(B)`. Among tied splits the numerically smallest
/// left-side mask wins.
pub fn exact_optimal_tree_for(w: &PairWeights, sense: Sense, limit: usize) -> Result<(OrientedBinaryTree, u64)> {
    let n = w.n();
    let limit = limit.min(MAX_EXACT_LIMIT);
    if n > limit {
        return Err(Error::Capacity {
            what: "the exact solver",
            size: n,
            limit,
            hint: "use the approximate solver for larger spaces",
        });
    }
    if n == 0 {
        return domain("cannot build a tree over zero elements");
    }
    let full = (1usize << n) - 1;
    // row_to[a][mask] = Σ_{b ∈ mask} w(a, b)
    let mut row_to = vec![vec![0.0f64; 1 << n]; n];
    for (a, row) in row_to.iter_mut().enumerate() {
        for mask in 1..=full {
            let b = mask.trailing_zeros() as usize;
            row[mask] = row[mask & (mask - 1)] + w.get(a, b);
        }
    }
    let sign = match sense {
        Sense::Maximise => 1.0,
        Sense::Minimise => -1.0,
    };
    let mut value = vec![0.0f64; 1 << n];
    let mut choice = vec![0usize; 1 << n];
    let mut transitions = 0u64;
    for s in 1..=full {
        if s & (s - 1) == 0 {
            continue;
        }
        let size = s.count_ones() as f64;
        let mut best = f64::NEG_INFINITY;
        let mut best_a = 0;
        // Proper nonempty submasks in decreasing order.
        let mut a = (s - 1) & s;
        while a != 0 {
            let b = s ^ a;
            let mut cross = 0.0;
            let mut rest = a;
            while rest != 0 {
                let x = rest.trailing_zeros() as usize;
                cross += row_to[x][b];
                rest &= rest - 1;
            }
            let v = sign * size * cross + value[a] + value[b];
            transitions += 1;
            let better = if best_a == 0 {
                true
            } else if tied(v, best) {
                a < best_a
            } else {
                v > best
            };
            if better {
                best = v;
                best_a = a;
            }
            a = (a - 1) & s;
        }
        value[s] = best;
        choice[s] = best_a;
    }

    fn build(s: usize, choice: &[usize]) -> Node {
        if s & (s - 1) == 0 {
            return Node::leaf(s.trailing_zeros() as usize);
        }
        let a = choice[s];
        Node::join(build(a, choice), build(s ^ a, choice)).expect("DP sides are disjoint")
    }
    Ok((OrientedBinaryTree::new(build(full, &choice))?, transitions))
}

/// A global maximiser of `val_α`.
pub fn exact_optimal_tree(space: &OrderedSimilaritySpace, alpha: Alpha, limit: usize) -> Result<SolveResult> {
    let start = Instant::now();
    let w = PairWeights::new(space, ObjectiveKind::ValAlpha(alpha));
    let (tree, transitions) = exact_optimal_tree_for(&w, Sense::Maximise, limit)?;
    let value = w.tree_value(&tree)?;
    Ok(SolveResult {
        stats: SolveStats {
            splits_evaluated: transitions,
            internal_nodes: tree.n() - 1,
            wall_time: start.elapsed(),
        },
        tree,
        value,
        alpha,
        solver: SolverKind::Exact,
        cut: None,
    })
}

/// Per-subproblem seed so that sibling recursions draw independent streams
/// regardless of evaluation order.
fn subproblem_seed(seed: u64, s: &ElementSet) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for x in s.iter() {
        h = (h ^ x as u64).wrapping_mul(0x1000_0000_01b3);
        h ^= h >> 29;
    }
    h
}

/// Recursive directed sparsest cuts on the dual weights `1 − f_α`.
pub fn make_tree(
    space: &OrderedSimilaritySpace,
    alpha: Alpha,
    cut: &dyn CutFunction,
    cut_name: &'static str,
    seed: u64,
) -> Result<SolveResult> {
    let start = Instant::now();
    let n = space.n();
    if n == 0 {
        return domain("cannot build a tree over zero elements");
    }
    let dual = PairWeights::new(space, ObjectiveKind::CostAlphaDual(alpha));

    fn recurse(dual: &PairWeights, s: ElementSet, cut: &dyn CutFunction, seed: u64) -> Result<(Node, u64)> {
        if s.len() == 1 {
            return Ok((Node::leaf(s.first().expect("nonempty")), 0));
        }
        let c = cut.cut(dual, &s, subproblem_seed(seed, &s))?;
        let (left, right) = rayon::join(
            || recurse(dual, c.split.a.clone(), cut, seed),
            || recurse(dual, c.split.b.clone(), cut, seed),
        );
        let ((l, el), (r, er)) = (left?, right?);
        Ok((Node::join(l, r)?, c.evaluations + el + er))
    }

    let (root, evaluations) = recurse(&dual, ElementSet::full(n), cut, seed)?;
    let tree = OrientedBinaryTree::new(root)?;
    let value = evaluate(space, &tree, ObjectiveKind::ValAlpha(alpha))?;
    Ok(SolveResult {
        stats: SolveStats {
            splits_evaluated: evaluations,
            internal_nodes: n - 1,
            wall_time: start.elapsed(),
        },
        tree,
        value,
        alpha,
        solver: SolverKind::Approx,
        cut: Some(cut_name),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutChoice {
    Exact,
    Local,
    Auto,
}

impl CutChoice {
    pub fn name(self) -> &'static str {
        match self {
            CutChoice::Exact => "exact",
            CutChoice::Local => "local",
            CutChoice::Auto => "auto",
        }
    }
}

/// Everything needed to turn a space and an `α` into a tree.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverConfig {
    pub solver: SolverKind,
    pub cut: CutChoice,
    pub exact_limit: usize,
    pub cut_limit: usize,
    pub restarts: usize,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let local = LocalSearchCut::default();
        Self {
            solver: SolverKind::Exact,
            cut: CutChoice::Exact,
            exact_limit: DEFAULT_EXACT_LIMIT,
            cut_limit: DEFAULT_CUT_LIMIT,
            restarts: local.restarts,
            max_passes: local.max_passes,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn solve(&self, space: &OrderedSimilaritySpace, alpha: Alpha) -> Result<SolveResult> {
        let exact = ExactCut { limit: self.cut_limit };
        let local = LocalSearchCut {
            restarts: self.restarts,
            max_passes: self.max_passes,
        };
        match (self.solver, self.cut) {
            (SolverKind::Exact, _) => exact_optimal_tree(space, alpha, self.exact_limit),
            (SolverKind::Approx, CutChoice::Exact) => make_tree(space, alpha, &exact, "exact", self.seed),
            (SolverKind::Approx, CutChoice::Local) => make_tree(space, alpha, &local, "local", self.seed),
            (SolverKind::Approx, CutChoice::Auto) => {
                make_tree(space, alpha, &AutoCut { exact, local }, "auto", self.seed)
            }
        }
    }
}

/// `27·α_θ·ln(n)/2`, the worst-case ratio of the recursive cut tree's
/// `cost_fd` to the optimum given an `α_θ`-approximate cut.
pub fn approximation_bound(n: usize, alpha_theta: f64) -> Result<f64> {
    if n < 2 {
        return domain("the approximation bound needs n ≥ 2");
    }
    if !(alpha_theta >= 1.0) {
        return domain(format!("cut approximation factor must be ≥ 1, got {alpha_theta}"));
    }
    Ok(27.0 * alpha_theta * (n as f64).ln() / 2.0)
}
