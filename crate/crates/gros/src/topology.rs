//! Vietoris-Rips persistence (H0, H1) for planar point sets, and the
//! depth-selected robust persistence diagram.
//!
//! H0 comes from union-find over the length-sorted edge list; finite H0
//! deaths are exactly the minimum-spanning-tree edge lengths. H1 comes
//! from Z/2 reduction of the triangle boundary matrix. Triangles are
//! enumerated on the fly, grouped under their maximal edge, so the
//! filtration is traversed in order without materializing or sorting the
//! full triangle list.

use rand::Rng;

use crate::aggregate::{partition_indices, CandidatePool, Metric};
use crate::metrics::{wasserstein1_distance, DiagramPoint, PersistenceDiagram};
use crate::{Error, Result};

/// Default cap on the point count; the triangle count (the cost driver)
/// stays below ~5.7e7 under it.
pub const DEFAULT_POINT_CAP: usize = 700;

/// Rips persistence in dimensions 0 and 1 up to `threshold`, with the
/// default point cap.
pub fn rips_persistence(points: &[[f64; 2]], threshold: f64) -> Result<PersistenceDiagram> {
    rips_persistence_capped(points, threshold, DEFAULT_POINT_CAP)
}

/// Rips persistence with an explicit point cap.
///
/// H0 features are born at scale zero and die at the merge scale; each
/// connected component at `threshold` keeps one essential class. H1
/// features are born at the edge closing the cycle and die at the scale of
/// the triangle filling it; cycles still open at `threshold` are truncated
/// there. Zero-persistence features are dropped. Ties are broken by the
/// lexicographic order on (length, vertex indices).
pub fn rips_persistence_capped(
    points: &[[f64; 2]],
    threshold: f64,
    cap: usize,
) -> Result<PersistenceDiagram> {
    assert!(threshold > 0.0);
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if n > cap {
        return Err(Error::RipsCapExceeded { n, cap });
    }

    let dist = |a: usize, b: usize| {
        let dx = points[a][0] - points[b][0];
        let dy = points[a][1] - points[b][1];
        (dx * dx + dy * dy).sqrt()
    };

    // Length-sorted edge list; the position in this list is the edge rank,
    // the total order of the filtration within dimension 1.
    let mut edges: Vec<(f64, u32, u32)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist(i, j);
            if d <= threshold {
                edges.push((d, i as u32, j as u32));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    const ABSENT: u32 = u32::MAX;
    let mut rank = vec![ABSENT; n * n];
    for (r, &(_, i, j)) in edges.iter().enumerate() {
        rank[i as usize * n + j as usize] = r as u32;
        rank[j as usize * n + i as usize] = r as u32;
    }

    // H0: Kruskal union-find. Merging edges are the MST; the others create
    // 1-cycles and are the potential H1 births.
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut diagram_points = Vec::new();
    let mut creates_cycle = vec![false; edges.len()];
    for (r, &(len, i, j)) in edges.iter().enumerate() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a == b {
            creates_cycle[r] = true;
        } else {
            parent[a as usize] = b;
            if len > 0.0 {
                diagram_points.push(DiagramPoint::new(0, 0.0, len));
            }
        }
    }
    for v in 0..n as u32 {
        if find(&mut parent, v) == v {
            diagram_points.push(DiagramPoint::new(0, 0.0, f64::INFINITY));
        }
    }

    // H1 via coboundary reduction over Z/2. Columns are the cycle-creating
    // edges in decreasing filtration order; the MST edges are cleared since
    // they are already paired in dimension 0. A triangle is identified by
    // its three edge ranks sorted descending, packed into one u64 (21 bits
    // per rank, so integer order is the filtration-refining lexicographic
    // order), and the pivot of a column is its minimal remaining cofacet.
    // When the minimal raw cofacet shares the edge's filtration value the
    // pair is emitted immediately with zero persistence and the column is
    // regenerated on demand. This keeps the stored columns to the handful
    // of genuinely persistent classes.
    use std::cmp::Reverse;
    use std::collections::{BinaryHeap, HashMap};

    const RANK_BITS: u32 = 21;
    assert!(edges.len() < 1 << RANK_BITS);
    let pack = |a: u32, b: u32, c: u32| -> u64 {
        let (hi, rest) = if a >= b && a >= c { (a, (b, c)) } else if b >= c { (b, (a, c)) } else { (c, (a, b)) };
        let (mid, lo) = if rest.0 >= rest.1 { rest } else { (rest.1, rest.0) };
        ((hi as u64) << (2 * RANK_BITS)) | ((mid as u64) << RANK_BITS) | lo as u64
    };
    let max_rank_of = |t: u64| (t >> (2 * RANK_BITS)) as u32;

    let coboundary = |r: u32| -> Vec<u64> {
        let (_, i, j) = edges[r as usize];
        let row_i = &rank[i as usize * n..(i as usize + 1) * n];
        let row_j = &rank[j as usize * n..(j as usize + 1) * n];
        let mut out = Vec::new();
        for k in 0..n {
            let (r_ik, r_jk) = (row_i[k], row_j[k]);
            if r_ik == ABSENT || r_jk == ABSENT {
                continue;
            }
            out.push(pack(r, r_ik, r_jk));
        }
        out.sort_unstable();
        out
    };

    // The working column is a k-way merge of sorted streams, one per added
    // coboundary, with only the head of each stream resident in the heap.
    // Long cascades therefore never materialize the stream tails.
    struct MergeHeap {
        heap: BinaryHeap<Reverse<(u64, u32)>>,
        streams: Vec<Vec<u64>>,
        pos: Vec<usize>,
    }

    impl MergeHeap {
        fn new() -> Self {
            Self { heap: BinaryHeap::new(), streams: Vec::new(), pos: Vec::new() }
        }

        fn add_stream(&mut self, stream: Vec<u64>) {
            let id = self.streams.len() as u32;
            if let Some(&first) = stream.first() {
                self.heap.push(Reverse((first, id)));
            }
            self.streams.push(stream);
            self.pos.push(1);
        }

        fn advance(&mut self, id: u32) {
            let p = self.pos[id as usize];
            if let Some(&v) = self.streams[id as usize].get(p) {
                self.heap.push(Reverse((v, id)));
                self.pos[id as usize] = p + 1;
            }
        }

        // Pops the next odd-multiplicity value.
        fn pop_pivot(&mut self) -> Option<u64> {
            while let Some(Reverse((v, s))) = self.heap.pop() {
                self.advance(s);
                let mut odd = true;
                while let Some(&Reverse((u, s2))) = self.heap.peek() {
                    if u != v {
                        break;
                    }
                    self.heap.pop();
                    self.advance(s2);
                    odd = !odd;
                }
                if odd {
                    return Some(v);
                }
            }
            None
        }
    }

    let mut pivot_owner: HashMap<u64, u32> = HashMap::new();
    // Reduced columns are remembered as the flat list of edges whose
    // coboundaries sum to them, and replayed as streams on demand; edges
    // absent from the map are emergent pairs generated by themselves.
    let mut stored_generators: HashMap<u32, Vec<u32>> = HashMap::new();

    for r in (0..edges.len() as u32).rev() {
        if !creates_cycle[r as usize] {
            continue;
        }
        let birth = edges[r as usize].0;

        // Fast path: scan for the minimal cofacet sharing the filtration
        // value of the edge without materializing the coboundary. Such a
        // cofacet is the minimal one overall, and a pivot claimed earlier
        // belongs to a higher-ranked edge with a strictly larger maximal
        // rank, so it is always free: an emergent zero-persistence pair.
        let (_, i, j) = edges[r as usize];
        let row_i = &rank[i as usize * n..(i as usize + 1) * n];
        let row_j = &rank[j as usize * n..(j as usize + 1) * n];
        let mut best = u64::MAX;
        let mut has_cofacet = false;
        for k in 0..n {
            let (r_ik, r_jk) = (row_i[k], row_j[k]);
            if r_ik == ABSENT || r_jk == ABSENT {
                continue;
            }
            has_cofacet = true;
            if r_ik < r && r_jk < r {
                let key = ((r_ik.max(r_jk) as u64) << RANK_BITS) | r_ik.min(r_jk) as u64;
                if key < best {
                    best = key;
                }
            }
        }
        if best != u64::MAX {
            pivot_owner.insert(((r as u64) << (2 * RANK_BITS)) | best, r);
            continue;
        }
        if !has_cofacet {
            if threshold > birth {
                diagram_points.push(DiagramPoint::new(1, birth, threshold));
            }
            continue;
        }

        let mut merge = MergeHeap::new();
        merge.add_stream(coboundary(r));
        let mut generators = vec![r];
        loop {
            let Some(pivot) = merge.pop_pivot() else {
                // The cocycle never becomes a coboundary within the
                // threshold: the loop survives and is truncated.
                if threshold > birth {
                    diagram_points.push(DiagramPoint::new(1, birth, threshold));
                }
                break;
            };
            match pivot_owner.get(&pivot) {
                None => {
                    let death = edges[max_rank_of(pivot) as usize].0;
                    if death > birth {
                        diagram_points.push(DiagramPoint::new(1, birth, death));
                    }
                    pivot_owner.insert(pivot, r);
                    stored_generators.insert(r, generators);
                    break;
                }
                Some(&owner) => {
                    // The popped pivot cancels against the head of the
                    // owning column, so both are replayed.
                    merge.add_stream(vec![pivot]);
                    let gens = match stored_generators.get(&owner) {
                        Some(gens) => gens.clone(),
                        None => vec![owner],
                    };
                    for &g in &gens {
                        merge.add_stream(coboundary(g));
                    }
                    generators.extend(gens);
                }
            }
        }
    }

    Ok(PersistenceDiagram::new(diagram_points))
}

/// Drops essential classes, keeping the finite part that enters the
/// 1-Wasserstein comparisons.
pub fn finite_part(diagram: &PersistenceDiagram) -> PersistenceDiagram {
    PersistenceDiagram::new(
        diagram
            .points
            .iter()
            .filter(|p| !p.is_essential())
            .copied()
            .collect(),
    )
}

/// W1 between the finite parts of two diagrams, the selection metric of
/// the robust diagram.
pub fn finite_w1(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    wasserstein1_distance(&finite_part(a), &finite_part(b))
        .expect("finite parts carry no essential classes")
}

struct FiniteW1Metric;

impl Metric<PersistenceDiagram> for FiniteW1Metric {
    fn distance(&self, a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
        finite_w1(a, b)
    }
}

/// Splits the points into `k_groups`, computes one diagram per group, and
/// selects the diagram of minimal depth under the finite-part W1 metric.
pub fn robust_diagram<R: Rng>(
    points: &[[f64; 2]],
    k_groups: usize,
    threshold: f64,
    rng: &mut R,
) -> Result<(PersistenceDiagram, Vec<PersistenceDiagram>)> {
    let groups = partition_indices(points.len(), k_groups, rng)?;
    let candidates: Vec<PersistenceDiagram> = groups
        .iter()
        .map(|g| {
            let pts: Vec<[f64; 2]> = g.iter().map(|&i| points[i]).collect();
            rips_persistence(&pts, threshold)
        })
        .collect::<Result<_>>()?;
    let pool = CandidatePool::new(&candidates, FiniteW1Metric)?;
    let selected = candidates[pool.select_index().selected_index].clone();
    Ok((selected, candidates))
}
