//! The selection engine: nearest-neighbor depth over a candidate pool,
//! minimization over an arbitrary search pool, the practical index
//! selection, group partitioning and the binomial concentration helpers.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// A (pseudo)metric on points of type `P`.
///
/// Implementations must be symmetric, nonnegative, satisfy the triangle
/// inequality and vanish on identical points. Distinct points at distance
/// zero are allowed (pseudometric).
pub trait Metric<P: ?Sized> {
    fn distance(&self, a: &P, b: &P) -> f64;
}

impl<P: ?Sized, F> Metric<P> for F
where
    F: Fn(&P, &P) -> f64,
{
    fn distance(&self, a: &P, b: &P) -> f64 {
        self(a, b)
    }
}

/// Absolute-value metric on the real line.
#[derive(Debug, Clone, Copy, Default)]
pub struct AbsMetric;

impl Metric<f64> for AbsMetric {
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
}

/// Euclidean metric on fixed-dimension points.
#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanMetric;

impl<const D: usize> Metric<[f64; D]> for EuclideanMetric {
    fn distance(&self, a: &[f64; D], b: &[f64; D]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

impl Metric<Vec<f64>> for EuclideanMetric {
    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// The `K` group estimators seen as points of a metric space, together with
/// the depth-order parameter `q`.
///
/// Candidate order is stable: indices returned by the selection operations
/// always refer to positions in the slice handed in at construction.
pub struct CandidatePool<'a, P, M> {
    candidates: &'a [P],
    metric: M,
    q: f64,
}

/// Outcome of [`CandidatePool::select_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrosSelection {
    /// Smallest index attaining the minimal depth.
    pub selected_index: usize,
    /// Depth of the selected candidate.
    pub selected_depth: f64,
    /// Depth of every candidate with respect to the pool.
    pub depth_profile: Vec<f64>,
}

impl<'a, P, M: Metric<P>> CandidatePool<'a, P, M> {
    /// Builds a pool with the default depth parameter `q = 1/2`.
    pub fn new(candidates: &'a [P], metric: M) -> Result<Self> {
        Self::with_q(candidates, metric, 0.5)
    }

    /// Builds a pool with an explicit `q` in `[1/2, 1]`.
    pub fn with_q(candidates: &'a [P], metric: M, q: f64) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::EmptyPool);
        }
        if !(0.5..=1.0).contains(&q) {
            return Err(Error::InvalidQ(q));
        }
        Ok(Self {
            candidates,
            metric,
            q,
        })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn candidates(&self) -> &'a [P] {
        self.candidates
    }

    /// Depth order `m = floor(K q) + 1`, clamped to `K` (the clamp only
    /// matters at q = 1).
    pub fn depth_order(&self) -> usize {
        let k = self.candidates.len();
        usize::min((k as f64 * self.q).floor() as usize + 1, k)
    }

    /// Depth of `point`: the distance to its m-th nearest candidate,
    /// self-distances included.
    pub fn depth(&self, point: &P) -> f64 {
        let mut dists: Vec<f64> = self
            .candidates
            .iter()
            .map(|c| self.metric.distance(c, point))
            .collect();
        kth_smallest(&mut dists, self.depth_order() - 1)
    }

    /// Selects the candidate of minimal depth; ties break to the smallest
    /// index. Fills the symmetric distance matrix once, so at most
    /// `K(K-1)/2` metric evaluations are performed.
    pub fn select_index(&self) -> GrosSelection {
        let k = self.candidates.len();
        let m = self.depth_order();
        let mut dist = vec![0.0; k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                let d = self.metric.distance(&self.candidates[i], &self.candidates[j]);
                dist[i * k + j] = d;
                dist[j * k + i] = d;
            }
        }
        let mut scratch = vec![0.0; k];
        let depth_profile: Vec<f64> = (0..k)
            .map(|j| {
                scratch.copy_from_slice(&dist[j * k..(j + 1) * k]);
                kth_smallest(&mut scratch, m - 1)
            })
            .collect();
        let (selected_index, selected_depth) = argmin_first(&depth_profile);
        GrosSelection {
            selected_index,
            selected_depth,
            depth_profile,
        }
    }

    /// Minimizes the depth functional over an explicit search pool and
    /// returns `(index into search_pool, depth)`. The first element
    /// attaining the minimum wins. With `search_pool` equal to the
    /// candidates themselves this coincides with [`Self::select_index`].
    pub fn minimize_over_pool(&self, search_pool: &[P]) -> Result<(usize, f64)> {
        if search_pool.is_empty() {
            return Err(Error::EmptySearchPool);
        }
        let depths: Vec<f64> = search_pool.iter().map(|p| self.depth(p)).collect();
        Ok(argmin_first(&depths))
    }
}

/// The m-th smallest entry (zero-based `k`) of `values`, by in-place
/// selection.
fn kth_smallest(values: &mut [f64], k: usize) -> f64 {
    let (_, kth, _) = values.select_nth_unstable_by(k, f64::total_cmp);
    *kth
}

/// First index attaining the minimum; comparisons are exact on the computed
/// values, no epsilon.
fn argmin_first(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    (best, values[best])
}

/// Number of groups `K = ceil(8 ln(1/delta))` achieving confidence `delta`.
pub fn choose_k(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    Ok(usize::max((8.0 * (1.0 / delta).ln()).ceil() as usize, 1))
}

/// A uniformly random balanced partition of `0..n` into `k` disjoint index
/// groups: shuffle, then deal round-robin. Group sizes differ by at most
/// one.
pub fn partition_indices<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    if k < 1 || k > n {
        return Err(Error::InvalidPartition { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut groups: Vec<Vec<usize>> = (0..k).map(|_| Vec::with_capacity(n / k + 1)).collect();
    for (pos, idx) in order.into_iter().enumerate() {
        groups[pos % k].push(idx);
    }
    Ok(groups)
}

/// Hoeffding bound `exp(-2 (floor(K/2) - K p)^2 / K)` on the probability
/// that at least half of `K` independent Bernoulli(p) failures occur.
pub fn binomial_tail_bound(k: usize, p: f64) -> Result<f64> {
    let half = (k / 2) as f64;
    let kp = k as f64 * p;
    if kp > half {
        return Err(Error::BoundNotApplicable { k, p });
    }
    Ok((-2.0 * (half - kp).powi(2) / k as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool<'a>(cands: &'a [f64]) -> CandidatePool<'a, f64, AbsMetric> {
        CandidatePool::new(cands, AbsMetric).unwrap()
    }

    #[test]
    fn choose_k_examples() {
        assert_eq!(choose_k((-1.0f64).exp()).unwrap(), 8);
        assert_eq!(choose_k(0.05).unwrap(), 24);
        assert_eq!(choose_k(0.01).unwrap(), 37);
        assert!(choose_k(0.0).is_err());
        assert!(choose_k(1.0).is_err());
    }

    #[test]
    fn partition_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let groups = partition_indices(10, 5, &mut rng).unwrap();
        assert!(groups.iter().all(|g| g.len() == 2));

        let groups = partition_indices(10, 3, &mut rng).unwrap();
        let mut sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 4]);

        let groups = partition_indices(5, 5, &mut rng).unwrap();
        assert!(groups.iter().all(|g| g.len() == 1));
    }

    #[test]
    fn partition_covers_and_is_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let groups = partition_indices(23, 4, &mut rng).unwrap();
        let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn partition_deterministic() {
        let a = partition_indices(50, 7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = partition_indices(50, 7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn partition_rejects_bad_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(partition_indices(3, 4, &mut rng).is_err());
        assert!(partition_indices(3, 0, &mut rng).is_err());
    }

    #[test]
    fn depth_examples() {
        let cands = [0.0, 1.0, 2.0, 3.0, 10.0];
        assert_eq!(pool(&cands).depth(&2.0), 1.0);

        let single = [5.0];
        assert_eq!(pool(&single).depth(&7.0), 2.0);

        let same = [4.0, 4.0, 4.0];
        assert_eq!(pool(&same).depth(&6.5), 2.5);
    }

    #[test]
    fn select_index_examples() {
        let cands = [0.0, 1.0, 2.0, 3.0, 10.0];
        let sel = pool(&cands).select_index();
        assert_eq!(sel.selected_index, 1);
        assert_eq!(sel.selected_depth, 1.0);
        assert_eq!(sel.depth_profile, vec![2.0, 1.0, 1.0, 2.0, 8.0]);

        let cands = [0.0, 1.0, 100.0];
        let sel = pool(&cands).select_index();
        assert_eq!(sel.selected_index, 0);
        assert_eq!(sel.selected_depth, 1.0);

        let same = [3.0; 6];
        let sel = pool(&same).select_index();
        assert_eq!(sel.selected_index, 0);
        assert_eq!(sel.selected_depth, 0.0);
    }

    #[test]
    fn minimize_over_pool_examples() {
        let cands = [0.0, 1.0, 2.0, 3.0, 10.0];
        let p = pool(&cands);

        // Over the candidates themselves this is select_index.
        let (idx, depth) = p.minimize_over_pool(&cands).unwrap();
        let sel = p.select_index();
        assert_eq!(idx, sel.selected_index);
        assert_eq!(depth, sel.selected_depth);

        let (idx, depth) = p.minimize_over_pool(&[1.5]).unwrap();
        assert_eq!(idx, 0);
        assert_eq!(depth, 1.5);

        let grid: Vec<f64> = (0..=6).map(|i| i as f64 * 0.5).collect();
        let (idx, depth) = p.minimize_over_pool(&grid).unwrap();
        assert_eq!(grid[idx], 1.0);
        assert_eq!(depth, 1.0);

        assert!(p.minimize_over_pool(&[]).is_err());
    }

    #[test]
    fn binomial_tail_bound_examples() {
        let b = binomial_tail_bound(8, 0.25).unwrap();
        assert!((b - (-1.0f64).exp()).abs() < 1e-12);

        // Kp = floor(K/2): exponent zero.
        assert_eq!(binomial_tail_bound(8, 0.5).unwrap(), 1.0);

        let b = binomial_tail_bound(24, 0.25).unwrap();
        assert!((b - (-3.0f64).exp()).abs() < 1e-12);

        assert!(binomial_tail_bound(8, 0.6).is_err());
    }

    #[test]
    fn depth_order_at_extremes() {
        let cands = [0.0, 1.0, 2.0];
        let p = CandidatePool::with_q(&cands, AbsMetric, 1.0).unwrap();
        assert_eq!(p.depth_order(), 3);
        let p = CandidatePool::with_q(&cands, AbsMetric, 0.5).unwrap();
        assert_eq!(p.depth_order(), 2);
        assert!(CandidatePool::with_q(&cands, AbsMetric, 0.3).is_err());
    }

    /// Exhaustive oracle: depth as min over index sets I of size m of
    /// max_{j in I} d(mu_j, point).
    fn depth_by_enumeration(cands: &[f64], point: f64, m: usize) -> f64 {
        use itertools::Itertools;
        (0..cands.len())
            .combinations(m)
            .map(|idx| {
                idx.iter()
                    .map(|&j| (cands[j] - point).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn depth_matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let k = rng.gen_range(1..=12);
            let cands: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let p = pool(&cands);
            let point = rng.gen_range(-6.0..6.0);
            let expect = depth_by_enumeration(&cands, point, p.depth_order());
            assert_eq!(p.depth(&point), expect);
        }
    }

    #[test]
    fn depth_is_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let k = rng.gen_range(1..=15);
            let cands: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let p = pool(&cands);
            let a = rng.gen_range(-10.0..10.0);
            let b = rng.gen_range(-10.0..10.0);
            assert!((p.depth(&a) - p.depth(&b)).abs() <= (a - b).abs() + 1e-12);
        }
    }
}
