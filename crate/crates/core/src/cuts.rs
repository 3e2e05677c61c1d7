//! Directed sparsest cuts.
//!
//! The density of an ordered split `(A, B)` under a weight `w` is
//! `w(A, B) / (|A|·|B|)`. Swapping the sides generally changes it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::objective::PairWeights;
use crate::set::ElementSet;
use crate::tree::OrderedSplit;

/// Default largest set handed to exhaustive enumeration.
pub const DEFAULT_CUT_LIMIT: usize = 22;
/// Enumeration refuses anything larger regardless of configuration.
pub const MAX_CUT_LIMIT: usize = 30;

/// Relative tolerance under which two densities count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CutResult {
    pub split: OrderedSplit,
    pub density: f64,
    /// Number of splits whose density was evaluated.
    pub evaluations: u64,
}

pub fn directed_cut_density(w: &PairWeights, split: &OrderedSplit) -> Result<f64> {
    if split.a.is_empty() || split.b.is_empty() {
        return domain("cut density needs two nonempty sides");
    }
    if split.a.union(&split.b).iter().any(|x| x >= w.n()) {
        return domain(format!("split mentions elements outside 0..{}", w.n()));
    }
    Ok(w.cross(&split.a, &split.b) / (split.a.len() * split.b.len()) as f64)
}

/// `f(A, B) / (|A|·|B|)`. Under `f_d = 2 − f` the same split has density
/// `2` minus this, so densest cuts under `f` are sparsest cuts under `f_d`.
pub fn densest_cut_density(f: &PairWeights, split: &OrderedSplit) -> Result<f64> {
    directed_cut_density(f, split)
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Dense copy of `w` restricted to `elements`, in increasing element order.
struct Local {
    elements: Vec<usize>,
    w: Vec<f64>,
}

impl Local {
    fn new(w: &PairWeights, elements: &ElementSet) -> Result<Self> {
        let elements = elements.to_vec();
        if let Some(&x) = elements.iter().find(|&&x| x >= w.n()) {
            return domain(format!("element {x} outside 0..{}", w.n()));
        }
        let m = elements.len();
        let mut lw = vec![0.0; m * m];
        for (i, &x) in elements.iter().enumerate() {
            for (j, &y) in elements.iter().enumerate() {
                lw[i * m + j] = w.get(x, y);
            }
        }
        Ok(Self { elements, w: lw })
    }

    fn m(&self) -> usize {
        self.elements.len()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.m() + j]
    }

    fn split(&self, in_a: impl Fn(usize) -> bool) -> Result<OrderedSplit> {
        let (mut a, mut b) = (ElementSet::new(), ElementSet::new());
        for (i, &x) in self.elements.iter().enumerate() {
            if in_a(i) {
                a.insert(x);
            } else {
                b.insert(x);
            }
        }
        OrderedSplit::new(a, b)
    }
}

/// Running sums for one side assignment.
///
/// `from_a[y] = Σ_{a∈A} w(a,y)` and `to_b[y] = Σ_{b∈B} w(y,b)`.
struct SideSums {
    cross: f64,
    size_a: usize,
    from_a: Vec<f64>,
    to_b: Vec<f64>,
}

impl SideSums {
    fn new(local: &Local, in_a: &dyn Fn(usize) -> bool) -> Self {
        let m = local.m();
        let mut from_a = vec![0.0; m];
        let mut to_b = vec![0.0; m];
        let mut size_a = 0;
        for i in 0..m {
            if in_a(i) {
                size_a += 1;
                for y in 0..m {
                    from_a[y] += local.at(i, y);
                }
            } else {
                for y in 0..m {
                    to_b[y] += local.at(y, i);
                }
            }
        }
        let cross = (0..m).filter(|&i| in_a(i)).map(|i| to_b[i]).sum();
        Self {
            cross,
            size_a,
            from_a,
            to_b,
        }
    }

    fn density(&self, m: usize) -> f64 {
        self.cross / (self.size_a * (m - self.size_a)) as f64
    }

    fn move_to_a(&mut self, local: &Local, x: usize) {
        self.cross += self.to_b[x] - self.from_a[x];
        self.size_a += 1;
        for y in 0..local.m() {
            self.from_a[y] += local.at(x, y);
            self.to_b[y] -= local.at(y, x);
        }
    }

    fn move_to_b(&mut self, local: &Local, x: usize) {
        self.cross += self.from_a[x] - self.to_b[x];
        self.size_a -= 1;
        for y in 0..local.m() {
            self.from_a[y] -= local.at(x, y);
            self.to_b[y] += local.at(y, x);
        }
    }
}

/// Best `(density, mask)` seen so far; ties keep the smaller mask.
#[derive(Clone, Copy)]
struct Best {
    density: f64,
    mask: u64,
}

impl Best {
    const NONE: Best = Best {
        density: f64::INFINITY,
        mask: u64::MAX,
    };

    fn offer(&mut self, density: f64, mask: u64) {
        if tied(density, self.density) {
            if mask < self.mask {
                self.mask = mask;
                self.density = self.density.min(density);
            }
        } else if density < self.density {
            *self = Best { density, mask };
        }
    }
}

/// Minimum-density ordered split of `elements` by exhaustive enumeration.
///
/// Ties are resolved towards the numerically smallest `A`, reading bit `i`
/// as the `i`-th smallest element.
pub fn exact_directed_sparsest_cut(w: &PairWeights, elements: &ElementSet, limit: usize) -> Result<CutResult> {
    let m = elements.len();
    if m < 2 {
        return domain("a cut needs at least two elements");
    }
    let limit = limit.min(MAX_CUT_LIMIT);
    if m > limit {
        return Err(Error::Capacity {
            what: "exact cut enumeration",
            size: m,
            limit,
            hint: "use the local search cut for larger sets",
        });
    }
    let local = Local::new(w, elements)?;

    // The top `high` bits select a chunk; the rest are walked in Gray order.
    let high = m.saturating_sub(12).min(8);
    let low = m - high;
    let full: u64 = (1 << m) - 1;
    let chunk = |c: u64| -> Best {
        let base = c << low;
        let mut sums = SideSums::new(&local, &|i| base >> i & 1 == 1);
        let mut best = Best::NONE;
        let mut mask = base;
        if mask != 0 && mask != full {
            best.offer(sums.density(m), mask);
        }
        for step in 1u64..1 << low {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            if mask >> bit & 1 == 1 {
                sums.move_to_a(&local, bit);
            } else {
                sums.move_to_b(&local, bit);
            }
            if mask != 0 && mask != full {
                best.offer(sums.density(m), mask);
            }
        }
        best
    };
    let per_chunk: Vec<Best> = (0..1u64 << high).into_par_iter().map(chunk).collect();
    let mut best = Best::NONE;
    for b in per_chunk {
        best.offer(b.density, b.mask);
    }

    let split = local.split(|i| best.mask >> i & 1 == 1)?;
    let density = directed_cut_density(w, &split)?;
    Ok(CutResult {
        split,
        density,
        evaluations: full - 1,
    })
}

/// Best of several randomly started first-improvement searches over
/// single-element moves and cross swaps. Restart `r` draws from stream `r`
/// of a ChaCha generator keyed by `seed`.
pub fn local_search_cut(
    w: &PairWeights,
    elements: &ElementSet,
    seed: u64,
    restarts: usize,
    max_passes: usize,
) -> Result<CutResult> {
    let local = Local::new(w, elements)?;
    let m = local.m();
    if m < 2 {
        return domain("a cut needs at least two elements");
    }
    let restarts = restarts.max(1);
    let runs: Vec<(Vec<bool>, f64, u64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            descend(&local, &mut rng, max_passes)
        })
        .collect();

    let mut evaluations = 0;
    let mut best: Option<(Vec<bool>, f64)> = None;
    for (side, density, evals) in runs {
        evaluations += evals;
        let better = match &best {
            None => true,
            Some((_, d)) => density < *d && !tied(density, *d),
        };
        if better {
            best = Some((side, density));
        }
    }
    let (side, _) = best.expect("at least one restart");
    let split = local.split(|i| side[i])?;
    let density = directed_cut_density(w, &split)?;
    Ok(CutResult {
        split,
        density,
        evaluations,
    })
}

fn descend(local: &Local, rng: &mut ChaCha8Rng, max_passes: usize) -> (Vec<bool>, f64, u64) {
    let m = local.m();
    let mut in_a: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
    let size_a = in_a.iter().filter(|&&a| a).count();
    if size_a == 0 || size_a == m {
        let x = rng.random_range(0..m);
        in_a[x] = !in_a[x];
    }
    let mut sums = SideSums::new(local, &|i| in_a[i]);
    let mut density = sums.density(m);
    let mut evaluations = 1u64;
    let improves = |new: f64, old: f64| new < old && !tied(new, old);

    for _ in 0..max_passes {
        let mut improved = false;
        for x in 0..m {
            let size_b = m - sums.size_a;
            let (cross, size_a) = if in_a[x] {
                if sums.size_a == 1 {
                    continue;
                }
                (sums.cross + sums.from_a[x] - sums.to_b[x], sums.size_a - 1)
            } else {
                if size_b == 1 {
                    continue;
                }
                (sums.cross + sums.to_b[x] - sums.from_a[x], sums.size_a + 1)
            };
            evaluations += 1;
            let candidate = cross / (size_a * (m - size_a)) as f64;
            if improves(candidate, density) {
                if in_a[x] {
                    sums.move_to_b(local, x);
                } else {
                    sums.move_to_a(local, x);
                }
                in_a[x] = !in_a[x];
                density = sums.density(m);
                improved = true;
            }
        }
        for a in 0..m {
            for b in 0..m {
                if !in_a[a] || in_a[b] {
                    continue;
                }
                let cross = sums.cross - sums.to_b[a] + sums.from_a[a] + sums.to_b[b] + local.at(b, a)
                    - sums.from_a[b]
                    + local.at(a, b);
                evaluations += 1;
                let candidate = cross / (sums.size_a * (m - sums.size_a)) as f64;
                if improves(candidate, density) {
                    sums.move_to_b(local, a);
                    sums.move_to_a(local, b);
                    in_a[a] = false;
                    in_a[b] = true;
                    density = sums.density(m);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    (in_a, density, evaluations)
}

/// Anything that proposes an ordered split of a set for the recursive
/// tree builder.
pub trait CutFunction: Sync {
    fn cut(&self, w: &PairWeights, elements: &ElementSet, seed: u64) -> Result<CutResult>;
}

/// Exhaustive enumeration up to `limit` elements.
#[derive(Clone, Copy, Debug)]
pub struct ExactCut {
    pub limit: usize,
}

impl Default for ExactCut {
    fn default() -> Self {
        Self {
            limit: DEFAULT_CUT_LIMIT,
        }
    }
}

impl CutFunction for ExactCut {
    fn cut(&self, w: &PairWeights, elements: &ElementSet, _seed: u64) -> Result<CutResult> {
        exact_directed_sparsest_cut(w, elements, self.limit)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LocalSearchCut {
    pub restarts: usize,
    pub max_passes: usize,
}

impl Default for LocalSearchCut {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_passes: 50,
        }
    }
}

impl CutFunction for LocalSearchCut {
    fn cut(&self, w: &PairWeights, elements: &ElementSet, seed: u64) -> Result<CutResult> {
        local_search_cut(w, elements, seed, self.restarts, self.max_passes)
    }
}

/// Exact enumeration when the set is small enough, local search otherwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct AutoCut {
    pub exact: ExactCut,
    pub local: LocalSearchCut,
}

impl CutFunction for AutoCut {
    fn cut(&self, w: &PairWeights, elements: &ElementSet, seed: u64) -> Result<CutResult> {
        if elements.len() <= self.exact.limit.min(MAX_CUT_LIMIT) {
            self.exact.cut(w, elements, seed)
        } else {
            self.local.cut(w, elements, seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::Rng;

    fn set(v: &[usize]) -> ElementSet {
        v.iter().copied().collect()
    }

    fn split(a: &[usize], b: &[usize]) -> OrderedSplit {
        OrderedSplit::new(set(a), set(b)).unwrap()
    }

    /// Plain double loop over every mask.
    fn naive(w: &PairWeights, m: usize) -> (f64, u64) {
        let mut best = (f64::INFINITY, 0);
        for mask in 1u64..(1 << m) - 1 {
            let (mut cross, mut na) = (0.0, 0);
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    na += 1;
                    for j in 0..m {
                        if mask >> j & 1 == 0 {
                            cross += w.get(i, j);
                        }
                    }
                }
            }
            let d = cross / (na * (m - na)) as f64;
            if d < best.0 - 1e-12 {
                best = (d, mask);
            }
        }
        best
    }

    fn random_weights(n: usize, seed: u64) -> PairWeights {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PairWeights::from_matrix(Array2::from_shape_fn((n, n), |_| rng.random::<f64>())).unwrap()
    }

    #[test]
    fn density_examples() {
        let w = PairWeights::from_matrix(array![[0.0, 0.4], [0.0, 0.0]]).unwrap();
        assert_eq!(directed_cut_density(&w, &split(&[0], &[1])).unwrap(), 0.4);
        let u = PairWeights::from_matrix(Array2::from_elem((4, 4), 0.7)).unwrap();
        assert!((directed_cut_density(&u, &split(&[0, 2], &[1, 3])).unwrap() - 0.7).abs() < 1e-15);
        assert!((directed_cut_density(&u, &split(&[0], &[1, 2, 3])).unwrap() - 0.7).abs() < 1e-15);
        let d = PairWeights::from_matrix(array![[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(directed_cut_density(&d, &split(&[1], &[0])).unwrap(), 0.0);
        assert_eq!(directed_cut_density(&d, &split(&[0], &[1])).unwrap(), 1.0);
    }

    #[test]
    fn densest_and_sparsest_sum_to_two() {
        let f = PairWeights::from_matrix(Array2::zeros((3, 3))).unwrap();
        let fd = PairWeights::from_matrix(Array2::from_elem((3, 3), 2.0)).unwrap();
        let s = split(&[0], &[1, 2]);
        assert_eq!(densest_cut_density(&f, &s).unwrap(), 0.0);
        assert_eq!(directed_cut_density(&fd, &s).unwrap(), 2.0);
    }

    #[test]
    fn exact_on_two_elements_picks_lower_orientation() {
        let w = PairWeights::from_matrix(array![[0.0, 0.9], [0.2, 0.0]]).unwrap();
        let c = exact_directed_sparsest_cut(&w, &set(&[0, 1]), DEFAULT_CUT_LIMIT).unwrap();
        assert_eq!(c.split, split(&[1], &[0]));
        assert_eq!(c.density, 0.2);
        assert_eq!(c.evaluations, 2);
    }

    #[test]
    fn exact_matches_naive_enumeration() {
        for seed in 0..20 {
            let n = 3 + (seed as usize % 10);
            let w = random_weights(n, seed);
            let c = exact_directed_sparsest_cut(&w, &ElementSet::full(n), DEFAULT_CUT_LIMIT).unwrap();
            let (d, mask) = naive(&w, n);
            assert!((c.density - d).abs() < 1e-12, "n={n} seed={seed}");
            let a: ElementSet = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            assert_eq!(c.split.a, a, "n={n} seed={seed}");
        }
    }

    #[test]
    fn exact_on_a_subset_and_chunked_sizes() {
        let w = random_weights(16, 99);
        let elems = set(&[1, 3, 4, 8, 9, 10, 11, 12, 13, 14, 15, 0, 2, 5]);
        let c = exact_directed_sparsest_cut(&w, &elems, DEFAULT_CUT_LIMIT).unwrap();
        assert!(c.split.a.union(&c.split.b) == elems);
        let mut best = f64::INFINITY;
        let v = elems.to_vec();
        for mask in 1u32..(1 << v.len()) - 1 {
            let a: ElementSet = (0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect();
            let b = elems.difference(&a);
            best = best.min(directed_cut_density(&w, &OrderedSplit::new(a, b).unwrap()).unwrap());
        }
        assert!((c.density - best).abs() < 1e-12);
    }

    #[test]
    fn exact_tie_break_prefers_smallest_mask() {
        let w = PairWeights::from_matrix(Array2::from_elem((4, 4), 0.5)).unwrap();
        let c = exact_directed_sparsest_cut(&w, &ElementSet::full(4), DEFAULT_CUT_LIMIT).unwrap();
        assert_eq!(c.split, split(&[0], &[1, 2, 3]));
    }

    #[test]
    fn exact_capacity_and_domain_errors() {
        let w = random_weights(5, 1);
        assert!(matches!(
            exact_directed_sparsest_cut(&w, &ElementSet::full(5), 4),
            Err(Error::Capacity { .. })
        ));
        assert!(exact_directed_sparsest_cut(&w, &set(&[2]), 22).is_err());
    }

    #[test]
    fn planted_order_cut_has_zero_crossing_weight() {
        // Dual weights 1 − g of a complete bipartite order A* = {0,1,2} < B* = {3,4,5}
        // with s_d ≡ 0: pairs inside a side weigh 1, A*→B* weighs 0, B*→A* weighs 2.
        let w = PairWeights::from_matrix(Array2::from_shape_fn((6, 6), |(x, y)| match (x < 3, y < 3) {
            (true, false) => 0.0,
            (false, true) => 2.0,
            _ => 1.0,
        }))
        .unwrap();
        let c = exact_directed_sparsest_cut(&w, &ElementSet::full(6), DEFAULT_CUT_LIMIT).unwrap();
        assert_eq!(c.split, split(&[0, 1, 2], &[3, 4, 5]));
        assert_eq!(c.density, 0.0);
    }

    #[test]
    fn local_search_on_two_elements_is_exact() {
        let w = PairWeights::from_matrix(array![[0.0, 0.9], [0.2, 0.0]]).unwrap();
        for seed in 0..8 {
            let c = local_search_cut(&w, &set(&[0, 1]), seed, 1, 10).unwrap();
            assert_eq!(c.split, split(&[1], &[0]));
        }
    }

    #[test]
    fn local_search_never_beats_exact_and_is_reproducible() {
        for seed in 0..20 {
            let w = random_weights(9, 1000 + seed);
            let all = ElementSet::full(9);
            let exact = exact_directed_sparsest_cut(&w, &all, DEFAULT_CUT_LIMIT).unwrap();
            let a = local_search_cut(&w, &all, seed, 4, 20).unwrap();
            let b = local_search_cut(&w, &all, seed, 4, 20).unwrap();
            assert_eq!(a, b);
            assert!(a.density >= exact.density - 1e-12);
        }
    }

    #[test]
    fn local_search_is_thread_count_independent() {
        let w = random_weights(14, 5);
        let all = ElementSet::full(14);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| local_search_cut(&w, &all, 42, 8, 30).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn exact_is_thread_count_independent() {
        let w = random_weights(15, 8);
        let all = ElementSet::full(15);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| exact_directed_sparsest_cut(&w, &all, 22).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn auto_switches_on_size() {
        let w = random_weights(6, 3);
        let auto = AutoCut {
            exact: ExactCut { limit: 4 },
            local: LocalSearchCut::default(),
        };
        let small = auto.cut(&w, &set(&[0, 1, 2]), 0).unwrap();
        assert_eq!(small.evaluations, 6);
        assert!(auto.cut(&w, &ElementSet::full(6), 0).is_ok());
    }
}
