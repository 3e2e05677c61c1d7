//! Quality of a flat clustering against a planted one.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::poset::{induced_relation, Clustering, CrispRelation};
use crate::tree::OrientedBinaryTree;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    /// Adjusted Rand index of the chosen level against the truth.
    pub ari: f64,
    /// Fraction of ordered pairs classified alike by both clusterings.
    pub order_agreement: f64,
    /// One minus the fraction of elements whose block lies on a cycle.
    pub loops: f64,
    /// Largest fraction of truth-comparable pairs reversed by one split of
    /// the tree; zero when the truth has no comparable pairs.
    pub delta_good: f64,
    /// Threshold of the chosen flat clustering.
    pub chosen_t: f64,
}

fn choose2(k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64 / 2.0
}

/// Hubert–Arabie adjusted Rand index.
pub fn adjusted_rand(a: &Clustering, b: &Clustering) -> Result<f64> {
    if a.n() != b.n() {
        return domain(format!("clusterings cover {} and {} elements", a.n(), b.n()));
    }
    let n = a.n();
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    for x in 0..n {
        *table.entry((a.block_of(x), b.block_of(x))).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| choose2(c)).sum();
    let sum_a: f64 = a.blocks().iter().map(|blk| choose2(blk.len())).sum();
    let sum_b: f64 = b.blocks().iter().map(|blk| choose2(blk.len())).sum();
    let expected = sum_a * sum_b / choose2(n).max(1.0);
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        // Both all-singletons or both one block.
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairClass {
    Same,
    Before,
    After,
    Incomparable,
    /// Related both ways through a cycle of blocks.
    Both,
}

fn classify(c: &Clustering, rel: &CrispRelation, x: usize, y: usize) -> PairClass {
    let (bx, by) = (c.block_of(x), c.block_of(y));
    if bx == by {
        return PairClass::Same;
    }
    match (rel.has(bx, by), rel.has(by, bx)) {
        (true, true) => PairClass::Both,
        (true, false) => PairClass::Before,
        (false, true) => PairClass::After,
        (false, false) => PairClass::Incomparable,
    }
}

/// Fraction of ordered pairs `(x, y)`, `x ≠ y`, that both clusterings put
/// in the same block, or in blocks related the same way by the relation
/// each clustering induces from `order`.
pub fn order_agreement(truth: &Clustering, order: &CrispRelation, candidate: &Clustering) -> Result<f64> {
    let t = induced_relation(order, truth)?.relation;
    let c = induced_relation(order, candidate)?.relation;
    let n = truth.n();
    if n < 2 {
        return Ok(1.0);
    }
    let mut agree = 0usize;
    for x in 0..n {
        for y in 0..n {
            if x != y && classify(truth, &t, x, y) == classify(candidate, &c, x, y) {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (n * (n - 1)) as f64)
}

/// `1 −` the fraction of elements whose block sits on a cycle of the
/// block-level relation.
pub fn loops_measure(r: &CrispRelation, c: &Clustering) -> Result<f64> {
    if r.n() != c.n() {
        return domain(format!("relation covers {} elements, clustering {}", r.n(), c.n()));
    }
    let n = c.n();
    if n == 0 {
        return Ok(1.0);
    }
    let quotient = c.quotient_edges(r);
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..c.num_blocks()).map(|_| graph.add_node(())).collect();
    for (a, b) in quotient.edges() {
        graph.add_edge(nodes[a], nodes[b], ());
    }
    let participants: usize = tarjan_scc(&graph)
        .iter()
        .filter(|scc| scc.len() >= 2)
        .flatten()
        .map(|node| c.blocks()[node.index()].len())
        .sum();
    Ok(1.0 - participants as f64 / n as f64)
}

/// A flat level of a tree picked for its agreement with the truth.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatChoice {
    pub clustering: Clustering,
    pub t: f64,
    pub report: QualityReport,
}

/// Scans every distinct flat clustering of `tree` and keeps the one with
/// the highest ARI against `truth`, preferring the lowest threshold.
pub fn best_flat_by_ari(tree: &OrientedBinaryTree, truth: &Clustering, order: &CrispRelation) -> Result<FlatChoice> {
    if truth.n() != tree.n() || order.n() != tree.n() {
        return domain(format!(
            "tree covers {} elements, truth {} and order {}",
            tree.n(),
            truth.n(),
            order.n()
        ));
    }
    let mut best: Option<(Clustering, f64, f64)> = None;
    for level in tree.levels() {
        let t = level as f64;
        let flat = tree.flat_clustering_at(t)?;
        let ari = adjusted_rand(&flat, truth)?;
        if best.as_ref().is_none_or(|(_, _, b)| ari > *b) {
            best = Some((flat, t, ari));
        }
    }
    let (clustering, t, ari) = best.expect("every tree has the singleton level");
    let delta_good = if order.transitive_closure().edge_count() == 0 {
        0.0
    } else {
        tree.delta_goodness(order)?
    };
    let report = QualityReport {
        ari,
        order_agreement: order_agreement(truth, order, &clustering)?,
        loops: loops_measure(order, &clustering)?,
        delta_good,
        chosen_t: t,
    };
    Ok(FlatChoice { clustering, t, report })
}
