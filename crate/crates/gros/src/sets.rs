//! Convex-hull support estimation under ring-noise contamination: the
//! classical hull of the full sample and the hull selected from per-group
//! hulls by depth under the Hausdorff distance.

use rand::Rng;

use crate::aggregate::{partition_indices, CandidatePool};
use crate::metrics::polygon::HausdorffMetric;
use crate::metrics::{hausdorff_distance, ConvexPolygon};
use crate::{Error, Result};

/// Where a hull estimate came from.
#[derive(Debug, Clone, PartialEq)]
pub enum HullSource {
    FullSample,
    Group(usize),
    GrosSelected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullEstimate {
    pub polygon: ConvexPolygon,
    pub source: HullSource,
}

/// Monotone-chain convex hull. Collinear interior points are dropped;
/// inputs whose hull degenerates to a point or segment yield 1- or
/// 2-vertex polygons.
pub fn convex_hull(points: &[[f64; 2]]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() == 1 {
        return ConvexPolygon::new(pts);
    }

    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    // lower chain
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // upper chain
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    ConvexPolygon::new(hull)
}

/// Splits the sample into `k_groups`, computes per-group hulls, and selects
/// the hull of minimal depth under the Hausdorff distance. Also returns the
/// full-sample hull baseline.
pub fn rchull_fit<R: Rng>(
    points: &[[f64; 2]],
    k_groups: usize,
    rng: &mut R,
) -> Result<(HullEstimate, Vec<HullEstimate>, HullEstimate)> {
    let groups = partition_indices(points.len(), k_groups, rng)?;
    let hulls: Vec<ConvexPolygon> = groups
        .iter()
        .map(|g| {
            let pts: Vec<[f64; 2]> = g.iter().map(|&i| points[i]).collect();
            convex_hull(&pts)
        })
        .collect::<Result<_>>()?;

    let pool = CandidatePool::new(&hulls, HausdorffMetric)?;
    let selection = pool.select_index();

    let candidates: Vec<HullEstimate> = hulls
        .iter()
        .enumerate()
        .map(|(j, h)| HullEstimate {
            polygon: h.clone(),
            source: HullSource::Group(j),
        })
        .collect();
    let selected = HullEstimate {
        polygon: hulls[selection.selected_index].clone(),
        source: HullSource::GrosSelected,
    };
    let full = HullEstimate {
        polygon: convex_hull(points)?,
        source: HullSource::FullSample,
    };
    Ok((selected, candidates, full))
}

/// Number of vertices of the polygonal stand-in for the unit disk; the
/// inscription error 1 - cos(pi/3600) is below 4e-7.
pub const DISK_VERTEX_COUNT: usize = 3600;

/// Hausdorff distance from a polygon to the unit disk, approximated by a
/// regular 3600-gon inscribed in the unit circle.
pub fn hausdorff_to_unit_disk(p: &ConvexPolygon) -> f64 {
    hausdorff_distance(p, &ConvexPolygon::regular(DISK_VERTEX_COUNT, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hull_of_square_with_interior_points() {
        let mut pts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            pts.push([rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)]);
        }
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 4);
        let mut vs = hull.vertices().to_vec();
        vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vs, vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]);
    }

    #[test]
    fn hull_of_triangle_is_ccw() {
        let hull = convex_hull(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!(hull.len(), 3);
    }

    #[test]
    fn collinear_points_give_segment() {
        let hull = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(hull.vertices(), &[[0.0, 0.0], [2.0, 0.0]]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(convex_hull(&[]).is_err());
        let point = convex_hull(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert_eq!(point.len(), 1);
    }

    #[test]
    fn hull_contains_its_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let pts: Vec<[f64; 2]> = (0..rng.gen_range(1..50))
                .map(|_| [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
                .collect();
            let hull = convex_hull(&pts).unwrap();
            for p in &pts {
                assert!(hull.distance_to_point(*p) < 1e-9);
            }
        }
    }

    #[test]
    fn selected_hull_is_a_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = crate::samplers::sample_ring_mixture(400, 0.01, &mut rng).unwrap();
        let (selected, candidates, _) = rchull_fit(&pts, 8, &mut rng).unwrap();
        assert!(candidates.iter().any(|c| c.polygon == selected.polygon));
    }

    #[test]
    fn single_group_selection_equals_full_hull() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = crate::samplers::sample_ring_mixture(200, 0.0, &mut rng).unwrap();
        let (selected, _, full) = rchull_fit(&pts, 1, &mut rng).unwrap();
        assert_eq!(selected.polygon, full.polygon);
    }

    #[test]
    fn identical_points_collapse() {
        let pts = vec![[0.5, 0.5]; 40];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (selected, _, full) = rchull_fit(&pts, 4, &mut rng).unwrap();
        assert_eq!(selected.polygon.vertices(), &[[0.5, 0.5]]);
        assert_eq!(full.polygon.vertices(), &[[0.5, 0.5]]);
    }

    #[test]
    fn disk_distance_examples() {
        let square =
            ConvexPolygon::new(vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]).unwrap();
        assert!((hausdorff_to_unit_disk(&square) - (2f64.sqrt() - 1.0)).abs() < 1e-4);

        let hexagon = ConvexPolygon::regular(6, 1.0);
        let expect = 1.0 - 3f64.sqrt() / 2.0;
        assert!((hausdorff_to_unit_disk(&hexagon) - expect).abs() < 1e-4);

        let disk = ConvexPolygon::regular(DISK_VERTEX_COUNT, 1.0);
        assert_eq!(hausdorff_to_unit_disk(&disk), 0.0);
    }
}
