#![allow(dead_code)]

use ndarray::Array2;
use ophc::{OrderedSimilaritySpace, RelaxedOrder, Similarity};

pub const STATES: [&str; 7] = ["Az", "Ca", "Id", "Nv", "Or", "Ut", "Wa"];

/// Fraction of each row state's movers that go to the column state.
const MIGRATION: [[f64; 7]; 7] = [
    [0.0, 0.064, 0.006, 0.018, 0.014, 0.012, 0.022],
    [0.089, 0.0, 0.016, 0.072, 0.061, 0.033, 0.069],
    [0.004, 0.009, 0.0, 0.007, 0.011, 0.014, 0.020],
    [0.016, 0.065, 0.006, 0.0, 0.013, 0.008, 0.009],
    [0.008, 0.033, 0.013, 0.003, 0.0, 0.004, 0.052],
    [0.019, 0.016, 0.011, 0.006, 0.006, 0.0, 0.009],
    [0.025, 0.065, 0.016, 0.008, 0.039, 0.009, 0.0],
];

/// Migration flows as a relaxed order with no similarity information.
pub fn migration() -> OrderedSimilaritySpace {
    let w = Array2::from_shape_fn((7, 7), |(i, j)| MIGRATION[i][j]);
    OrderedSimilaritySpace::new(Similarity::constant(7, 0.0).unwrap(), RelaxedOrder::new(w).unwrap())
        .unwrap()
        .with_labels(STATES.iter().map(|s| s.to_string()).collect())
        .unwrap()
}

pub fn state(name: &str) -> usize {
    STATES.iter().position(|&s| s == name).unwrap()
}

/// Upper triangle of the Jaccard distances between the seven family
/// members, rows 1..6.
const KENNEDY_DISTANCE: [&[f64]; 6] = [
    &[0.29, 0.31, 0.53, 0.53, 0.50, 0.63],
    &[0.40, 0.50, 0.59, 0.62, 0.73],
    &[0.61, 0.53, 0.65, 0.70],
    &[0.44, 0.50, 0.47],
    &[0.65, 0.56],
    &[0.28],
];

/// `(descendant, ancestor)` pairs in 1-based labels, before closure.
const KENNEDY_PARENTS: [(usize, usize); 6] = [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)];

/// The family space over labels 1..=7 stored at indices 0..=6, with
/// `ω(x, y) = 1` iff `x` descends from `y`.
pub fn kennedy() -> OrderedSimilaritySpace {
    let mut d = Array2::zeros((7, 7));
    for (i, row) in KENNEDY_DISTANCE.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let j = i + 1 + k;
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    let r = ophc::CrispRelation::from_edges(7, KENNEDY_PARENTS.iter().map(|&(a, b)| (a - 1, b - 1)))
        .unwrap()
        .transitive_closure();
    OrderedSimilaritySpace::new(Similarity::from_dissimilarity(&d).unwrap(), RelaxedOrder::indicator(&r)).unwrap()
}

/// Every ordered split `(A, B)` of `elems` into nonempty parts.
pub fn ordered_splits(elems: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let k = elems.len();
    (1u32..(1 << k) - 1)
        .map(|mask| {
            let (a, b): (Vec<usize>, Vec<usize>) = (0..k).partition(|&i| mask >> i & 1 == 1);
            (a.iter().map(|&i| elems[i]).collect(), b.iter().map(|&i| elems[i]).collect())
        })
        .collect()
}

/// Every oriented binary tree with leaf set `elems`.
pub fn all_trees(elems: &[usize]) -> Vec<ophc::Node> {
    if elems.len() == 1 {
        return vec![ophc::Node::leaf(elems[0])];
    }
    let mut out = Vec::new();
    for (a, b) in ordered_splits(elems) {
        let rights = all_trees(&b);
        for l in all_trees(&a) {
            for r in &rights {
                out.push(ophc::Node::join(l.clone(), r.clone()).unwrap());
            }
        }
    }
    out
}

/// `Σ_{a∈A, b∈B} w(a, b)` by plain loops.
pub fn cross(w: &Array2<f64>, a: &[usize], b: &[usize]) -> f64 {
    a.iter().flat_map(|&x| b.iter().map(move |&y| w[[x, y]])).sum()
}

/// Values of every oriented binary tree on `elems`, without building trees.
pub fn all_tree_values(w: &Array2<f64>, elems: &[usize]) -> Vec<f64> {
    if elems.len() == 1 {
        return vec![0.0];
    }
    let n = elems.len() as f64;
    let mut out = Vec::new();
    for (a, b) in ordered_splits(elems) {
        let here = n * cross(w, &a, &b);
        let rights = all_tree_values(w, &b);
        for l in all_tree_values(w, &a) {
            for r in &rights {
                out.push(here + l + r);
            }
        }
    }
    out
}

/// Tree value by walking the nodes: `Σ |S|·w(left, right)`.
pub fn naive_value(w: &Array2<f64>, node: &ophc::Node) -> f64 {
    match node.children() {
        None => 0.0,
        Some((l, r)) => {
            node.size() as f64 * cross(w, &l.members().to_vec(), &r.members().to_vec())
                + naive_value(w, l)
                + naive_value(w, r)
        }
    }
}

/// Number of oriented binary trees on `n` leaves: `n!·Catalan(n−1)`.
pub fn tree_count(n: usize) -> usize {
    let fact: usize = (1..=n).product();
    let mut catalan = 1usize;
    for k in 0..n.saturating_sub(1) {
        catalan = catalan * 2 * (2 * k + 1) / (k + 2);
    }
    fact * catalan
}
