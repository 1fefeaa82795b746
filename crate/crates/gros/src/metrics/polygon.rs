//! Convex polygons as filled convex bodies, with the Hausdorff distance
//! between them.

use crate::aggregate::Metric;
use crate::{Error, Result};

pub type Point2 = [f64; 2];

/// A convex polygon given by its counter-clockwise vertex list.
///
/// Degenerate bodies are allowed: one vertex is a point, two vertices a
/// segment. With three or more vertices the boundary must be strictly
/// convex (no repeated or collinear vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        match vertices.len() {
            0 => return Err(Error::InvalidPolygon("no vertices".into())),
            1 => {}
            2 => {
                if vertices[0] == vertices[1] {
                    return Err(Error::InvalidPolygon("repeated segment endpoints".into()));
                }
            }
            n => {
                for i in 0..n {
                    let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                    if c <= 0.0 {
                        return Err(Error::InvalidPolygon(format!(
                            "vertices are not in strictly convex CCW position (turn {i} has cross {c})"
                        )));
                    }
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` around the
    /// origin, starting at angle zero.
    pub fn regular(n: usize, r: f64) -> Self {
        let vertices = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Self::new(vertices).expect("regular polygon is convex")
    }

    /// True if `p` lies in the filled body (boundary included).
    pub fn contains(&self, p: Point2) -> bool {
        match self.vertices.len() {
            1 => self.vertices[0] == p,
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]) == 0.0,
            n => (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0),
        }
    }

    /// Distance from `p` to the filled body: zero inside, otherwise the
    /// minimum over boundary edges.
    pub fn distance_to_point(&self, p: Point2) -> f64 {
        match self.vertices.len() {
            1 => {
                let v = self.vertices[0];
                ((p[0] - v[0]).powi(2) + (p[1] - v[1]).powi(2)).sqrt()
            }
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]),
            n => {
                if self.contains(p) {
                    return 0.0;
                }
                (0..n)
                    .map(|i| point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
}

/// Hausdorff distance between two filled convex polygons.
///
/// The point-to-convex-body distance is a convex function, so each directed
/// distance is attained at a vertex of the source polygon; the maximum over
/// vertices is exact.
pub fn hausdorff_distance(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    let directed = |from: &ConvexPolygon, to: &ConvexPolygon| {
        from.vertices()
            .iter()
            .map(|&v| to.distance_to_point(v))
            .fold(0.0f64, f64::max)
    };
    f64::max(directed(a, b), directed(b, a))
}

/// [`Metric`] adapter for convex polygons.
#[derive(Debug, Clone, Copy, Default)]
pub struct HausdorffMetric;

impl Metric<ConvexPolygon> for HausdorffMetric {
    fn distance(&self, a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
        hausdorff_distance(a, b)
    }
}
