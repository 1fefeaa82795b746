//! Persistence diagrams and the 1-Wasserstein distance between them.

use std::io::{BufRead, Write};

use crate::aggregate::Metric;
use crate::metrics::min_cost_assignment;
use crate::{Error, Result};

/// One feature of a persistence diagram. Essential classes carry
/// `death = f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub dimension: u32,
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(dimension: u32, birth: f64, death: f64) -> Self {
        assert!(death >= birth, "death {death} below birth {birth}");
        Self {
            dimension,
            birth,
            death,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// A finite multiset of (dimension, birth, death) features.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistenceDiagram {
    pub points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<DiagramPoint>) -> Self {
        Self { points }
    }

    pub fn points_in_dim(&self, dimension: u32) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.dimension == dimension)
    }

    /// Writes the `dimension,birth,death` CSV form; essential deaths are
    /// written as `inf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "dimension,birth,death")?;
        for p in &self.points {
            if p.is_essential() {
                writeln!(out, "{},{},inf", p.dimension, p.birth)?;
            } else {
                writeln!(out, "{},{},{}", p.dimension, p.birth, p.death)?;
            }
        }
        Ok(())
    }

    /// Parses the CSV form written by [`Self::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> std::io::Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("dimension")) {
                continue;
            }
            let mut fields = line.split(',');
            let parse_err = || {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("bad diagram row at line {}", lineno + 1),
                )
            };
            let dimension: u32 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(parse_err)?;
            let birth: f64 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(parse_err)?;
            let death_field = fields.next().map(str::trim).ok_or_else(parse_err)?;
            let death = if death_field.eq_ignore_ascii_case("inf") {
                f64::INFINITY
            } else {
                death_field.parse().map_err(|_| parse_err())?
            };
            points.push(DiagramPoint::new(dimension, birth, death));
        }
        Ok(Self::new(points))
    }
}

fn linf(a: &DiagramPoint, b: &DiagramPoint) -> f64 {
    f64::max((a.birth - b.birth).abs(), (a.death - b.death).abs())
}

/// 1-Wasserstein distance between persistence diagrams.
///
/// Per dimension, points match either a point of the other diagram (ground
/// cost L-infinity in the birth-death plane) or their diagonal projection
/// (cost half the persistence); the exact optimum comes from the Hungarian
/// algorithm on the augmented square matrix. Dimensions contribute
/// additively. Essential classes must agree exactly between the two
/// diagrams; matched to each other on births, they contribute zero.
pub fn wasserstein1_distance(p: &PersistenceDiagram, q: &PersistenceDiagram) -> Result<f64> {
    let mut dims: Vec<u32> = p
        .points
        .iter()
        .chain(&q.points)
        .map(|pt| pt.dimension)
        .collect();
    dims.sort_unstable();
    dims.dedup();

    let mut total = 0.0;
    for dim in dims {
        let ess = |d: &PersistenceDiagram| {
            let mut births: Vec<f64> = d
                .points_in_dim(dim)
                .filter(|pt| pt.is_essential())
                .map(|pt| pt.birth)
                .collect();
            births.sort_by(f64::total_cmp);
            births
        };
        let (ep, eq) = (ess(p), ess(q));
        if ep != eq {
            return Err(Error::MismatchedEssentials);
        }
        // Identical essential births: matched pairwise at zero cost.

        let finite = |d: &PersistenceDiagram| -> Vec<DiagramPoint> {
            d.points_in_dim(dim)
                .filter(|pt| !pt.is_essential())
                .copied()
                .collect()
        };
        total += finite_matching_cost(&finite(p), &finite(q));
    }
    Ok(total)
}

fn finite_matching_cost(a: &[DiagramPoint], b: &[DiagramPoint]) -> f64 {
    if a.is_empty() {
        return b.iter().map(|pt| pt.persistence() / 2.0).sum();
    }
    if b.is_empty() {
        return a.iter().map(|pt| pt.persistence() / 2.0).sum();
    }
    // Equal births on both sides (H0 diagrams, where every class is born at
    // scale zero) reduce to a one-dimensional alignment; the quadratic DP
    // avoids the cubic Hungarian solve on the dominant H0 blocks.
    let b0 = a[0].birth;
    if a.iter().chain(b).all(|pt| pt.birth == b0) {
        return equal_birth_matching_cost(a, b, b0);
    }

    let (n, m) = (a.len(), b.len());
    let size = n + m;
    let mut cost = vec![0.0f64; size * size];
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate() {
            cost[i * size + j] = linf(pa, pb);
        }
        for j in m..size {
            cost[i * size + j] = pa.persistence() / 2.0;
        }
    }
    for i in n..size {
        for (j, pb) in b.iter().enumerate() {
            cost[i * size + j] = pb.persistence() / 2.0;
        }
        // diagonal-to-diagonal entries stay zero
    }
    min_cost_assignment(&cost, size).0
}

/// Exact matching cost when every point of both diagrams shares the same
/// birth. Sorting the deaths makes the optimal matching monotone, so a
/// prefix DP over (matched, skipped-to-diagonal) suffices.
fn equal_birth_matching_cost(a: &[DiagramPoint], b: &[DiagramPoint], birth: f64) -> f64 {
    let sorted = |pts: &[DiagramPoint]| {
        let mut d: Vec<f64> = pts.iter().map(|p| p.death).collect();
        d.sort_by(f64::total_cmp);
        d
    };
    let (da, db) = (sorted(a), sorted(b));
    let (n, m) = (da.len(), db.len());
    let diag = |d: f64| (d - birth) / 2.0;

    let mut prev = vec![0.0f64; m + 1];
    for j in 1..=m {
        prev[j] = prev[j - 1] + diag(db[j - 1]);
    }
    let mut cur = vec![0.0f64; m + 1];
    for i in 1..=n {
        cur[0] = prev[0] + diag(da[i - 1]);
        for j in 1..=m {
            let matched = prev[j - 1] + (da[i - 1] - db[j - 1]).abs();
            let drop_a = prev[j] + diag(da[i - 1]);
            let drop_b = cur[j - 1] + diag(db[j - 1]);
            cur[j] = matched.min(drop_a).min(drop_b);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// [`Metric`] adapter for persistence diagrams. Panics on mismatched
/// essential classes, so pools must be built from diagrams sharing their
/// essential structure.
#[derive(Debug, Clone, Copy, Default)]
pub struct Wasserstein1Metric;

impl Metric<PersistenceDiagram> for Wasserstein1Metric {
    fn distance(&self, a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
        wasserstein1_distance(a, b).expect("pool diagrams must share essential classes")
    }
}
