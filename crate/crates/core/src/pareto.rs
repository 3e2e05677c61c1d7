//! Trading similarity against order: sweeps over `α` and the resulting
//! Pareto front in `(val_sd, val_g)`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::metrics::{best_flat_by_ari, QualityReport};
use crate::objective::value_decomposition;
use crate::poset::{Alpha, Clustering, CrispRelation, OrderedSimilaritySpace};
use crate::solvers::SolverConfig;
use crate::tree::OrientedBinaryTree;

/// Number of evenly spaced `α` values in the default grid.
pub const DEFAULT_GRID_SIZE: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub alpha: Alpha,
    pub tree: OrientedBinaryTree,
    pub val_sd: f64,
    pub val_g: f64,
    pub val_alpha: f64,
    pub quality: Option<QualityReport>,
}

impl SweepPoint {
    fn objectives(&self) -> (f64, f64) {
        (self.val_sd, self.val_g)
    }
}

/// A grid point whose solve failed.
#[derive(Debug)]
pub struct SweepFailure {
    pub alpha: Alpha,
    pub error: Error,
}

/// `size` evenly spaced values from 0 to 1 inclusive.
pub fn alpha_grid(size: usize) -> Result<Vec<Alpha>> {
    match size {
        0 => domain("an alpha grid needs at least one point"),
        1 => Ok(vec![Alpha::new(0.0)?]),
        _ => (0..size)
            .map(|i| Alpha::new(i as f64 / (size - 1) as f64))
            .collect(),
    }
}

/// Ground truth for scoring sweep points.
#[derive(Clone, Copy, Debug)]
pub struct Truth<'a> {
    pub clustering: &'a Clustering,
    pub order: &'a CrispRelation,
}

fn point(
    space: &OrderedSimilaritySpace,
    alpha: Alpha,
    config: &SolverConfig,
    truth: Option<Truth<'_>>,
) -> Result<SweepPoint> {
    let solved = config.solve(space, alpha)?;
    let (val_sd, val_g) = value_decomposition(space, &solved.tree)?;
    let quality = match truth {
        Some(t) => Some(best_flat_by_ari(&solved.tree, t.clustering, t.order)?.report),
        None => None,
    };
    Ok(SweepPoint {
        alpha,
        tree: solved.tree,
        val_sd,
        val_g,
        val_alpha: solved.value,
        quality,
    })
}

/// One solve per grid value, in grid order. Failures are kept per point.
pub fn sweep_alpha(
    space: &OrderedSimilaritySpace,
    grid: &[Alpha],
    config: &SolverConfig,
    truth: Option<Truth<'_>>,
) -> Result<Vec<std::result::Result<SweepPoint, SweepFailure>>> {
    if grid.is_empty() {
        return domain("the alpha grid is empty");
    }
    Ok(grid
        .par_iter()
        .map(|&alpha| point(space, alpha, config, truth).map_err(|error| SweepFailure { alpha, error }))
        .collect())
}

fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
}

/// Points not dominated by any other, sorted by `val_sd`.
pub fn pareto_front(points: &[SweepPoint]) -> Vec<SweepPoint> {
    let mut front: Vec<SweepPoint> = points
        .iter()
        .filter(|p| !points.iter().any(|q| dominates(q.objectives(), p.objectives())))
        .cloned()
        .collect();
    front.sort_by(|a, b| a.val_sd.total_cmp(&b.val_sd).then(b.val_g.total_cmp(&a.val_g)));
    front
}

/// An interval of `α` narrower than the requested resolution across which
/// the optimal `(val_sd, val_g)` changes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub lo: f64,
    pub hi: f64,
}

/// Bisects `[lo, hi]`, closing every subinterval whose endpoints share an
/// optimum and narrowing the rest down to width `tol`.
pub fn refine_alpha(
    space: &OrderedSimilaritySpace,
    lo: f64,
    hi: f64,
    tol: f64,
    config: &SolverConfig,
) -> Result<Vec<Breakpoint>> {
    if !(tol > 0.0) {
        return domain(format!("resolution must be positive, got {tol}"));
    }
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return domain(format!("need 0 ≤ lo < hi ≤ 1, got [{lo}, {hi}]"));
    }
    let same = |a: (f64, f64), b: (f64, f64)| {
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
        close(a.0, b.0) && close(a.1, b.1)
    };
    let mut cache: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    let mut probe = |alpha: f64| -> Result<(f64, f64)> {
        if let Some(&v) = cache.get(&alpha.to_bits()) {
            return Ok(v);
        }
        let solved = config.solve(space, Alpha::new(alpha)?)?;
        let v = value_decomposition(space, &solved.tree)?;
        cache.insert(alpha.to_bits(), v);
        Ok(v)
    };
    let mut breakpoints = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let (va, vb) = (probe(a)?, probe(b)?);
        if same(va, vb) {
            continue;
        }
        if b - a <= tol {
            breakpoints.push(Breakpoint { lo: a, hi: b });
            continue;
        }
        let mid = (a + b) / 2.0;
        stack.push((mid, b));
        stack.push((a, mid));
    }
    Ok(breakpoints)
}
