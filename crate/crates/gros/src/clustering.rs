//! Lloyd k-means and its robust variant where each centroid update selects
//! a group mean by depth instead of averaging the whole cluster.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::aggregate::{partition_indices, CandidatePool, EuclideanMetric};
use crate::{Error, Result};

/// A fitted clustering: centers, hard assignments and the mean within-class
/// squared distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub centers: Vec<[f64; 2]>,
    pub assignments: Vec<usize>,
    pub within_ss: f64,
}

/// Shared knobs of both fitting routines.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-6,
        }
    }
}

fn sq_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Random distinct sample points as initial centers.
pub fn random_init_centers<R: Rng>(points: &[[f64; 2]], k: usize, rng: &mut R) -> Vec<[f64; 2]> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.shuffle(rng);
    let mut centers = Vec::with_capacity(k);
    for &i in &idx {
        if !centers.contains(&points[i]) {
            centers.push(points[i]);
            if centers.len() == k {
                break;
            }
        }
    }
    // Fewer than k distinct points: cycle through what there is.
    let distinct = centers.len().max(1);
    while centers.len() < k {
        let i = centers.len() % distinct;
        centers.push(centers[i]);
    }
    centers
}

fn assign(points: &[[f64; 2]], centers: &[[f64; 2]]) -> (Vec<usize>, f64) {
    let mut total = 0.0;
    let assignments = points
        .iter()
        .map(|&p| {
            let (mut best, mut best_d) = (0, f64::INFINITY);
            for (j, &c) in centers.iter().enumerate() {
                let d = sq_dist(p, c);
                if d < best_d {
                    best = j;
                    best_d = d;
                }
            }
            total += best_d;
            best
        })
        .collect();
    (assignments, total / points.len() as f64)
}

/// Re-seeds any empty cluster to the point farthest from its current
/// center.
fn fix_empty_clusters(
    points: &[[f64; 2]],
    centers: &mut [[f64; 2]],
    assignments: &mut [usize],
) {
    loop {
        let mut counts = vec![0usize; centers.len()];
        for &a in assignments.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let (far_idx, _) = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, sq_dist(p, centers[assignments[i]])))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty sample");
        centers[empty] = points[far_idx];
        assignments[far_idx] = empty;
    }
}

enum UpdateRule<'r> {
    Mean,
    Gros {
        k_groups: usize,
        rng: &'r mut rand_chacha::ChaCha8Rng,
    },
}

fn lloyd<R: Rng>(
    points: &[[f64; 2]],
    k: usize,
    init_centers: Option<Vec<[f64; 2]>>,
    opts: FitOptions,
    rng: &mut R,
    mut rule: UpdateRule<'_>,
) -> Result<ClusterModel> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::TooManyClusters { k, n });
    }
    let mut centers = match init_centers {
        Some(c) => {
            assert_eq!(c.len(), k, "init_centers must have k entries");
            c
        }
        None => random_init_centers(points, k, rng),
    };

    let mut assignments = vec![0usize; n];
    for _ in 0..opts.max_iter {
        let (a, _) = assign(points, &centers);
        assignments = a;
        fix_empty_clusters(points, &mut centers, &mut assignments);

        let mut movement: f64 = 0.0;
        for j in 0..k {
            let members: Vec<[f64; 2]> = points
                .iter()
                .zip(&assignments)
                .filter(|(_, &a)| a == j)
                .map(|(&p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            let new_center = match &mut rule {
                UpdateRule::Mean => mean_point(&members),
                UpdateRule::Gros { k_groups, rng } => {
                    gros_center(&members, *k_groups, rng)?
                }
            };
            movement = movement.max(sq_dist(centers[j], new_center).sqrt());
            centers[j] = new_center;
        }
        if movement < opts.tol {
            break;
        }
    }
    let (assignments, within_ss) = assign(points, &centers);
    Ok(ClusterModel {
        centers,
        assignments,
        within_ss,
    })
}

fn mean_point(points: &[[f64; 2]]) -> [f64; 2] {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p[0], sy + p[1]));
    [sx / n, sy / n]
}

/// Cluster update of the robust variant: partition members into groups,
/// take group means as candidates, and select the one of minimal depth.
fn gros_center<R: Rng>(members: &[[f64; 2]], k_groups: usize, rng: &mut R) -> Result<[f64; 2]> {
    let k = k_groups.min(members.len()).max(1);
    let groups = partition_indices(members.len(), k, rng)?;
    let means: Vec<[f64; 2]> = groups
        .iter()
        .map(|g| {
            let pts: Vec<[f64; 2]> = g.iter().map(|&i| members[i]).collect();
            mean_point(&pts)
        })
        .collect();
    let pool = CandidatePool::new(&means, EuclideanMetric)?;
    Ok(means[pool.select_index().selected_index])
}

/// Plain Lloyd k-means: alternate nearest-center assignment and mean
/// updates until the centers move less than `tol` or `max_iter` is hit.
pub fn kmeans<R: Rng>(
    points: &[[f64; 2]],
    k: usize,
    init_centers: Option<Vec<[f64; 2]>>,
    opts: FitOptions,
    rng: &mut R,
) -> Result<ClusterModel> {
    lloyd(points, k, init_centers, opts, rng, UpdateRule::Mean)
}

/// Robust k-means: identical to [`kmeans`] except that each centroid update
/// selects among per-group means by depth. The group partition is
/// re-randomized at every update step.
pub fn robust_kmeans<R: Rng>(
    points: &[[f64; 2]],
    k: usize,
    k_groups: usize,
    init_centers: Option<Vec<[f64; 2]>>,
    opts: FitOptions,
    rng: &mut R,
) -> Result<ClusterModel> {
    assert!(k_groups >= 1);
    // The update rule needs its own rng stream so a matched main stream can
    // be compared across methods; split one off deterministically.
    let mut update_rng = {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(rng.gen())
    };
    lloyd(
        points,
        k,
        init_centers,
        opts,
        rng,
        UpdateRule::Gros {
            k_groups,
            rng: &mut update_rng,
        },
    )
}

/// Classification error minimized over all label permutations
/// (`k <= 6`, factorial enumeration).
pub fn classification_error(
    true_labels: &[usize],
    predicted_labels: &[usize],
    k: usize,
) -> Result<f64> {
    use itertools::Itertools;
    if k > 6 {
        return Err(Error::TooManyLabels(k));
    }
    assert_eq!(true_labels.len(), predicted_labels.len());
    let n = true_labels.len() as f64;
    let best = (0..k)
        .permutations(k)
        .map(|perm| {
            true_labels
                .iter()
                .zip(predicted_labels)
                .filter(|(&t, &p)| t != perm[p])
                .count() as f64
                / n
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}
