//! Random instances with known structure, and the bounds that go with them.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::poset::{Clustering, CrispRelation, OrderedSimilaritySpace, RelaxedOrder, Similarity};
use crate::set::ElementSet;
use crate::tree::{Node, OrientedBinaryTree};

/// Largest number of redraws for one rejection-sampled similarity.
pub const MAX_REDRAWS: usize = 1_000_000;

/// RNG for one purpose of one generator run. Distinct streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The hidden structure behind a generated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedTruth {
    pub clustering: Clustering,
    /// Strict partial order on the elements.
    pub order: CrispRelation,
    /// The planted lower and upper halves, for bipartite instances.
    pub planted_split: Option<(ElementSet, ElementSet)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedBipartiteSpec {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    /// Constant similarity between all pairs.
    #[serde(default)]
    pub similarity: f64,
}

impl PlantedBipartiteSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 != 0 {
            return domain(format!("planted bipartite orders need a positive even n, got {}", self.n));
        }
        if !(0.0 <= self.q && self.q < self.p && self.p <= 1.0) {
            return domain(format!("need 0 ≤ q < p ≤ 1, got p={} q={}", self.p, self.q));
        }
        if !(0.0..=1.0).contains(&self.similarity) {
            return domain(format!("similarity {} lies outside [0, 1]", self.similarity));
        }
        Ok(())
    }
}

/// A random equal split `A* | B*` with every `a ∈ A*` below every `b ∈ B*`.
/// Each ordered pair independently gets `ω = 1` with probability `p` when it
/// follows the planted order and `q` otherwise.
pub fn planted_bipartite(spec: &PlantedBipartiteSpec) -> Result<(OrderedSimilaritySpace, PlantedTruth)> {
    spec.validate()?;
    let n = spec.n;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut stream_rng(spec.seed, 0));
    let lower: ElementSet = perm[..n / 2].iter().copied().collect();
    let upper: ElementSet = perm[n / 2..].iter().copied().collect();

    let order = CrispRelation::from_edges(
        n,
        lower.iter().flat_map(|a| upper.iter().map(move |b| (a, b))),
    )?;
    let mut rng = stream_rng(spec.seed, 1);
    let mut w = Array2::zeros((n, n));
    for x in 0..n {
        for y in 0..n {
            if x != y {
                let prob = if order.has(x, y) { spec.p } else { spec.q };
                w[[x, y]] = if rng.random_bool(prob) { 1.0 } else { 0.0 };
            }
        }
    }
    let space = OrderedSimilaritySpace::new(Similarity::constant(n, spec.similarity)?, RelaxedOrder::new(w)?)?;
    let clustering = Clustering::from_blocks(n, vec![lower.to_vec(), upper.to_vec()])?;
    Ok((
        space,
        PlantedTruth {
            clustering,
            order,
            planted_split: Some((lower, upper)),
        },
    ))
}

/// An ordered similarity space to be copied.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseSpace {
    pub order: CrispRelation,
    /// Off-diagonal similarities; self-similarity is taken to be 1.
    pub similarity: Similarity,
}

impl BaseSpace {
    /// A chain `0 < 1 < … < n−1` with the given similarity.
    pub fn chain(similarity: Similarity) -> Result<Self> {
        let n = similarity.n();
        let order = CrispRelation::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))?;
        Ok(Self { order, similarity })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyPasteSpec {
    pub base_n: usize,
    /// Number of copies in addition to the original.
    pub copies: usize,
    pub mu: f64,
    /// Variance of the normal noise.
    pub sigma2: f64,
    pub seed: u64,
    /// Edge probability of the synthesized base order.
    #[serde(default = "default_edge_probability")]
    pub edge_probability: f64,
}

fn default_edge_probability() -> f64 {
    0.3
}

impl CopyPasteSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_n == 0 {
            return domain("the base space needs at least one element");
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return domain(format!("noise variance must be positive, got {}", self.sigma2));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return domain(format!("noise location must be nonnegative, got {}", self.mu));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return domain(format!("edge probability {} lies outside [0, 1]", self.edge_probability));
        }
        Ok(())
    }

    /// A random base: a random linear extension with each compatible pair
    /// related with `edge_probability`, closed transitively, and uniform
    /// random similarities.
    pub fn synthesize_base(&self) -> Result<BaseSpace> {
        let mut rng = stream_rng(self.seed, 0);
        let order = random_partial_order(self.base_n, self.edge_probability, &mut rng);
        let similarity = random_similarity(self.base_n, false, &mut rng);
        Ok(BaseSpace { order, similarity })
    }
}

/// `copies + 1` disjoint copies of `base` under the union order. Similarity
/// inside a copy is the base similarity; across copies it is the base value
/// minus a normal draw, redrawn until the result lies in `[0, 1]`. Element
/// `i` of copy `j` gets index `j·base_n + i`; the truth clusters collect
/// each base element's copies.
pub fn copy_paste_partition(
    spec: &CopyPasteSpec,
    base: Option<&BaseSpace>,
) -> Result<(OrderedSimilaritySpace, PlantedTruth)> {
    spec.validate()?;
    let synthesized;
    let base = match base {
        Some(b) => b,
        None => {
            synthesized = spec.synthesize_base()?;
            &synthesized
        }
    };
    let k = base.order.n();
    if k != spec.base_n || base.similarity.n() != k {
        return domain(format!(
            "base space has {} elements and similarity over {}, spec says {}",
            k,
            base.similarity.n(),
            spec.base_n
        ));
    }
    if !base.order.is_acyclic() {
        return domain("the base order must be acyclic");
    }
    let total = k * (spec.copies + 1);
    let noise = Normal::new(spec.mu, spec.sigma2.sqrt())
        .map_err(|e| crate::Error::Domain(format!("invalid noise distribution: {e}")))?;
    let mut rng = stream_rng(spec.seed, 1);
    let base_s = |p: usize, q: usize| if p == q { 1.0 } else { base.similarity.get(p, q) };

    let mut s = Array2::zeros((total, total));
    for x in 0..total {
        for y in x + 1..total {
            let (cx, p) = (x / k, x % k);
            let (cy, q) = (y / k, y % k);
            let v = if cx == cy {
                base_s(p, q)
            } else {
                let s0 = base_s(p, q);
                let mut draws = 0;
                loop {
                    let v = s0 - noise.sample(&mut rng);
                    if (0.0..=1.0).contains(&v) {
                        break v;
                    }
                    draws += 1;
                    if draws >= MAX_REDRAWS {
                        return domain(format!(
                            "no admissible similarity for base value {s0} after {MAX_REDRAWS} draws"
                        ));
                    }
                }
            };
            s[[x, y]] = v;
            s[[y, x]] = v;
        }
    }
    let closure = base.order.transitive_closure();
    let order = CrispRelation::from_edges(
        total,
        (0..=spec.copies).flat_map(|c| closure.edges().map(move |(p, q)| (c * k + p, c * k + q))),
    )?;
    let space = OrderedSimilaritySpace::new(Similarity::new(s)?, RelaxedOrder::indicator(&order))?;
    let clustering = Clustering::from_labels(&(0..total).map(|x| x % k).collect::<Vec<_>>());
    Ok((
        space,
        PlantedTruth {
            clustering,
            order,
            planted_split: None,
        },
    ))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        domain(format!("confidence parameter must be positive, got {eps}"))
    }
}

/// The δ for which an optimal `val_g` tree of a planted bipartite instance
/// is δ-good with probability at least `1 − eps`.
pub fn delta_bound(n: usize, p: f64, q: f64, eps: f64) -> Result<f64> {
    if n < 2 {
        return domain("delta bound needs n ≥ 2");
    }
    if !(0.0 < eps && eps < 1.0) {
        return domain(format!("eps must lie in (0, 1), got {eps}"));
    }
    if !(0.0 <= q && q < p && p <= 1.0) {
        return domain(format!("need 0 ≤ q < p ≤ 1, got p={p} q={q}"));
    }
    let n = n as f64;
    Ok(8.0 / (p - q) * (2.0 * (2.0 * n).ln() / n + (2.0 / eps).ln() / (n * n)).sqrt())
}

/// Deviation scale `n²·sqrt(2n·ln(2n) + ln(2/eps))` of a tree value from
/// its expectation.
pub fn concentration_bound(n: usize, eps: f64) -> Result<f64> {
    if n < 1 {
        return domain("concentration bound needs n ≥ 1");
    }
    check_eps(eps)?;
    let n = n as f64;
    Ok(n * n * (2.0 * n * (2.0 * n).ln() + (2.0 / eps).ln()).sqrt())
}

/// A uniformly random value, or a multiple of 1/64 when `dyadic` so that
/// tree values are exact in floating point.
fn unit(rng: &mut impl Rng, dyadic: bool) -> f64 {
    if dyadic {
        rng.random_range(0..=64u32) as f64 / 64.0
    } else {
        rng.random::<f64>()
    }
}

pub fn random_similarity(n: usize, dyadic: bool, rng: &mut impl Rng) -> Similarity {
    let mut s = Array2::zeros((n, n));
    for x in 0..n {
        for y in x + 1..n {
            let v = unit(rng, dyadic);
            s[[x, y]] = v;
            s[[y, x]] = v;
        }
    }
    Similarity::new(s).expect("values lie in [0, 1] and are symmetric")
}

/// Random similarity and fully random relaxed order.
pub fn random_space(n: usize, dyadic: bool, rng: &mut impl Rng) -> OrderedSimilaritySpace {
    let s = random_similarity(n, dyadic, rng);
    let w = Array2::from_shape_fn((n, n), |_| unit(rng, dyadic));
    OrderedSimilaritySpace::new(s, RelaxedOrder::new(w).expect("unit weights")).expect("matching sizes")
}

/// Transitive closure of a random DAG: a random linear extension with each
/// forward pair related independently with probability `density`.
pub fn random_partial_order(n: usize, density: f64, rng: &mut impl Rng) -> CrispRelation {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut r = CrispRelation::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                r.add(perm[i], perm[j]).expect("distinct in-range elements");
            }
        }
    }
    r.transitive_closure()
}

/// A random oriented tree: random leaf order, random split points.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> OrientedBinaryTree {
    fn build(order: &[usize], rng: &mut impl Rng) -> Node {
        if order.len() == 1 {
            return Node::leaf(order[0]);
        }
        let cut = rng.random_range(1..order.len());
        let (l, r) = order.split_at(cut);
        Node::join(build(l, rng), build(r, rng)).expect("disjoint halves")
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    OrientedBinaryTree::new(build(&order, rng)).expect("covers 0..n")
}

/// A random tree whose leaf order is a linear extension of `r`, so it is
/// order preserving.
pub fn random_order_preserving_tree(r: &CrispRelation, rng: &mut impl Rng) -> OrientedBinaryTree {
    let n = r.n();
    // Random topological order: repeatedly pick a random minimal element.
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while !remaining.is_empty() {
        let minimal: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&y| !remaining.iter().any(|&x| r.has(x, y)))
            .collect();
        let pick = minimal[rng.random_range(0..minimal.len())];
        remaining.retain(|&x| x != pick);
        order.push(pick);
    }
    fn build(order: &[usize], rng: &mut impl Rng) -> Node {
        if order.len() == 1 {
            return Node::leaf(order[0]);
        }
        let cut = rng.random_range(1..order.len());
        let (l, r) = order.split_at(cut);
        Node::join(build(l, rng), build(r, rng)).expect("disjoint halves")
    }
    OrientedBinaryTree::new(build(&order, rng)).expect("covers 0..n")
}
