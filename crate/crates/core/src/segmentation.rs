//! Partition of a polyline into straight-line and totally convex pieces.
//!
//! The pipeline runs once on the input: collinear runs are found first,
//! then inflection edges receive a midpoint, and finally pieces that are
//! only locally convex are bisected until every piece is totally convex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{RefinementConfig, Strictness};
use crate::error::{Error, Result};
use crate::geom::{Point2, Polyline, Topology};
use crate::projective::{join, meet, HPoint};
use crate::scalar::{sign_with_tol, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    StraightLine,
    TotallyConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JunctionKind {
    InflectionPoint,
    ConvexJunction,
    StraightLineJunction,
    SequenceEnd,
}

/// Consecutive vertices `start, start+1, …, start+edges`, indices taken
/// modulo the vertex count for closed polylines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexRange {
    pub start: usize,
    pub edges: usize,
}

impl VertexRange {
    pub fn new(start: usize, edges: usize) -> Self {
        Self { start, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.edges + 1
    }

    /// Last vertex index, reduced modulo `n`.
    pub fn end(&self, n: usize) -> usize {
        (self.start + self.edges) % n
    }

    /// Vertex indices in order, reduced modulo `n`.
    pub fn indices(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.start;
        (0..=self.edges).map(move |k| (start + k) % n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub range: VertexRange,
    /// Convex piece with fewer than five vertices, refined by midpoints.
    pub undersampled: bool,
}

impl Segment {
    pub fn start(&self) -> usize {
        self.range.start
    }

    pub fn edges(&self) -> usize {
        self.range.edges
    }

    /// True when the segment uses the harmonic construction.
    pub fn is_convex(&self) -> bool {
        self.kind == SegmentKind::TotallyConvex && !self.undersampled
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentStructure {
    /// Ordered by start vertex; consecutive segments share an end point.
    pub segments: Vec<Segment>,
    pub junctions: BTreeMap<usize, JunctionKind>,
    pub topology: Topology,
    pub vertex_count: usize,
}

impl SegmentStructure {
    /// A closed polyline consisting of one convex loop without junctions.
    pub fn is_loop(&self) -> bool {
        self.topology == Topology::Closed && self.junctions.is_empty()
    }

    pub fn junction(&self, v: usize) -> Option<JunctionKind> {
        self.junctions.get(&v).copied()
    }

    /// Segment index owning each edge.
    pub fn edge_owners(&self) -> Vec<usize> {
        let n = self.vertex_count;
        let edge_count = match self.topology {
            Topology::Closed => n,
            Topology::Open => n.saturating_sub(1),
        };
        let mut owner = vec![usize::MAX; edge_count];
        for (s, seg) in self.segments.iter().enumerate() {
            for k in 0..seg.range.edges {
                owner[(seg.range.start + k) % n] = s;
            }
        }
        owner
    }

    /// Segments ending at and starting from junction `v`, in that order.
    pub fn neighbors_of(&self, v: usize) -> (Option<usize>, Option<usize>) {
        let n = self.vertex_count;
        let left = self.segments.iter().position(|s| s.range.end(n) == v && s.range.edges > 0);
        let right = self.segments.iter().position(|s| s.range.start == v);
        (left, right)
    }
}

fn chord_distance<T: Scalar>(a: Point2<T>, b: Point2<T>, p: Point2<T>) -> T {
    let d = b - a;
    let len = d.norm();
    if len == T::zero() {
        a.distance(p)
    } else {
        d.cross(p - a).abs() / len
    }
}

/// Signed distance of `p` from the directed line through `a` and `b`.
fn signed_distance<T: Scalar>(a: Point2<T>, b: Point2<T>, p: Point2<T>) -> T {
    let d = b - a;
    let len = d.norm();
    if len == T::zero() {
        T::zero()
    } else {
        d.cross(p - a) / len
    }
}

/// Maximal runs of at least three consecutive vertices whose deviation from
/// the run's end-point chord is at most `tol` times the bounding-box
/// diagonal. Adjacent runs share their end points.
pub fn detect_collinear_runs<T: Scalar>(poly: &Polyline<T>, tol: T) -> Vec<VertexRange> {
    let n = poly.len();
    if n < 3 {
        return Vec::new();
    }
    let eps = tol * poly.diagonal();
    let p = &poly.points;
    let (origin, span) = match poly.topology {
        Topology::Open => (0, n),
        Topology::Closed => {
            let corner = (0..n).find(|&v| chord_distance(p[(v + n - 1) % n], p[(v + 1) % n], p[v]) > eps);
            match corner {
                Some(v) => (v, n + 1),
                None => return Vec::new(),
            }
        }
    };
    let at = |k: usize| p[(origin + k) % n];
    let fits = |s: usize, e: usize| (s + 1..e).all(|k| chord_distance(at(s), at(e), at(k)) <= eps);

    let mut runs = Vec::new();
    let mut s = 0;
    while s + 2 < span {
        let mut e = s + 1;
        while e + 1 < span && fits(s, e + 1) {
            e += 1;
        }
        if e - s >= 2 {
            runs.push(VertexRange::new((origin + s) % n, e - s));
            s = e;
        } else {
            s += 1;
        }
    }
    runs.sort_by_key(|r| r.start);
    runs
}

/// Edges `(i, i+1)` whose outer neighbors `p_{i-1}` and `p_{i+2}` lie
/// strictly on opposite sides of the edge line.
pub fn detect_inflection_edges<T: Scalar>(poly: &Polyline<T>) -> Vec<usize> {
    let n = poly.len();
    let eps = T::proj_tol() * poly.diagonal();
    (0..poly.edge_count())
        .filter(|&i| {
            let (Some(a), Some(d)) = (poly.vertex(i as isize - 1), poly.vertex(i as isize + 2)) else {
                return false;
            };
            let (b, c) = (poly.points[i], poly.points[(i + 1) % n]);
            inflection_between(a, b, c, d, eps)
        })
        .collect()
}

fn inflection_between<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>, d: Point2<T>, eps: T) -> bool {
    let sa = sign_with_tol(signed_distance(b, c, a), eps);
    let sd = sign_with_tol(signed_distance(b, c, d), eps);
    sa * sd < 0
}

fn totally_convex_points<T: Scalar>(pts: &[Point2<T>], closed: bool, eps: T) -> bool {
    let m = pts.len();
    if m < 3 {
        return true;
    }
    let edges = if closed { m } else { m - 1 };
    (0..edges).all(|k| {
        let (a, b) = (pts[k], pts[(k + 1) % m]);
        let mut seen = 0i8;
        pts.iter().all(|&p| match sign_with_tol(signed_distance(a, b, p), eps) {
            0 => true,
            s if seen == 0 => {
                seen = s;
                true
            }
            s => s == seen,
        })
    })
}

/// True when, for every edge of the range, all range vertices lie on the
/// edge line or in one common open half-plane. A range covering a whole
/// closed polyline includes the closing edge.
pub fn is_totally_convex<T: Scalar>(poly: &Polyline<T>, range: VertexRange) -> bool {
    let n = poly.len();
    let eps = T::proj_tol() * poly.diagonal();
    let closed = poly.is_closed() && range.edges >= n;
    let pts: Vec<Point2<T>> =
        if closed { poly.points.clone() } else { range.indices(n).map(|k| poly.points[k]).collect() };
    totally_convex_points(&pts, closed, eps)
}

/// Leaf pieces of the recursive bisection, tagged with whether they were
/// produced by a split.
fn bisect<T: Scalar>(poly: &Polyline<T>, range: VertexRange, depth: usize, out: &mut Vec<(VertexRange, bool)>) {
    if range.edges < 2 || is_totally_convex(poly, range) {
        out.push((range, depth > 0));
        return;
    }
    let left = range.edges.div_ceil(2);
    bisect(poly, VertexRange::new(range.start, left), depth + 1, out);
    bisect(poly, VertexRange::new((range.start + left) % poly.len(), range.edges - left), depth + 1, out);
}

/// Recursively bisects a locally convex range at `j + ⌊(l−j+1)/2⌋` until
/// every piece is totally convex. Adjacent pieces share the split vertex.
pub fn split_until_convex<T: Scalar>(
    poly: &Polyline<T>,
    range: VertexRange,
    strictness: Strictness,
) -> Result<Vec<VertexRange>> {
    let mut leaves = Vec::new();
    bisect(poly, range, 0, &mut leaves);
    let split = leaves.len() > 1;
    for &(piece, _) in &leaves {
        if split && piece.vertex_count() < 5 && strictness == Strictness::Strict {
            return Err(Error::UnsplittableSegment { start: piece.start });
        }
    }
    Ok(leaves.into_iter().map(|(r, _)| r).collect())
}

/// Condition at a convex junction `v`: the intersections
/// `p(v-2)p(v-1) ∩ p(v)p(v+1)` and `p(v-1)p(v) ∩ p(v+1)p(v+2)` lie on the
/// same side of `p(v-1)p(v+1)` as `p(v)`. Unavailable neighbors or
/// intersections at infinity do not count as violations.
pub fn convex_junction_condition<T: Scalar>(poly: &Polyline<T>, v: usize) -> bool {
    let v = v as isize;
    let pts: Option<Vec<Point2<T>>> = (-2..=2).map(|k| poly.vertex(v + k)).collect();
    let Some(pts) = pts else {
        return true;
    };
    let h: Vec<HPoint<T>> = pts.iter().map(|&p| HPoint::from_point(p)).collect();
    let line = |a: usize, b: usize| join(&h[a], &h[b]);
    let (Ok(base), Ok(e01), Ok(e12), Ok(e23), Ok(e34)) = (line(1, 3), line(0, 1), line(2, 3), line(1, 2), line(3, 4))
    else {
        return true;
    };
    let reference = base.signed_distance(pts[2]);
    [meet(&e01, &e12), meet(&e23, &e34)].into_iter().all(|q| match q.ok().and_then(|q| q.to_affine()) {
        Some(q) => base.signed_distance(q) * reference > T::zero(),
        None => true,
    })
}

/// Pieces between consecutive junction vertices.
fn pieces_between(junctions: &[usize], n: usize, topology: Topology) -> Vec<VertexRange> {
    match topology {
        Topology::Open => junctions.windows(2).map(|w| VertexRange::new(w[0], w[1] - w[0])).collect(),
        Topology::Closed => {
            let m = junctions.len();
            (0..m)
                .map(|k| {
                    let (a, b) = (junctions[k], junctions[(k + 1) % m]);
                    let edges = if m == 1 { n } else { (b + n - a) % n };
                    VertexRange::new(a, edges)
                })
                .collect()
        }
    }
}

fn insert_inflection_midpoints<T: Scalar>(
    poly: &Polyline<T>,
    edges: &[usize],
) -> (Polyline<T>, Vec<usize>, Vec<usize>) {
    let n = poly.len();
    let mut points = Vec::with_capacity(n + edges.len());
    let mut map = Vec::with_capacity(n);
    let mut inserted = Vec::with_capacity(edges.len());
    let mut flagged = vec![false; n];
    for &e in edges {
        flagged[e] = true;
    }
    for i in 0..n {
        map.push(points.len());
        points.push(poly.points[i]);
        if flagged[i] {
            let (a, b) = poly.edge(i);
            inserted.push(points.len());
            points.push(a.midpoint(b));
        }
    }
    (Polyline::new(points, poly.topology), map, inserted)
}

/// Segments `poly`, inserting a midpoint on every inflection edge.
///
/// Returns the augmented polyline with its segment structure. Strict mode
/// rejects convex pieces with fewer than five vertices and violated
/// convex-junction conditions; lenient mode marks such pieces as
/// undersampled and logs a warning.
pub fn segment_polyline<T: Scalar>(
    poly: &Polyline<T>,
    cfg: &RefinementConfig,
) -> Result<(Polyline<T>, SegmentStructure)> {
    let n = poly.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let tol = T::of(cfg.collinearity_tol);
    let eps = tol * poly.diagonal();
    let open = !poly.is_closed();

    // Collinear runs; three-vertex runs that cross over are inflections.
    let mut runs = Vec::new();
    let mut crossing = Vec::new();
    for r in detect_collinear_runs(poly, tol) {
        let before = poly.vertex(r.start as isize - 1);
        let after = poly.vertex((r.start + r.edges) as isize + 1);
        let (a, c) = (poly.points[r.start], poly.points[r.end(n)]);
        let crosses = match (before, after, r.edges) {
            (Some(p), Some(q), 2) => {
                sign_with_tol(signed_distance(a, c, p), eps) * sign_with_tol(signed_distance(a, c, q), eps) < 0
            }
            _ => false,
        };
        if crosses {
            crossing.push((r.start + 1) % n);
        } else {
            runs.push(r);
        }
    }

    let mut boundaries: Vec<usize> = runs.iter().flat_map(|r| [r.start, r.end(n)]).collect();
    if open {
        boundaries.extend([0, n - 1]);
    }
    boundaries.sort_unstable();
    boundaries.dedup();

    // Inflection edges inside each non-straight part.
    let run_set: std::collections::HashSet<VertexRange> = runs.iter().copied().collect();
    let parts: Vec<VertexRange> = if boundaries.is_empty() {
        vec![VertexRange::new(0, n)]
    } else {
        pieces_between(&boundaries, n, poly.topology).into_iter().filter(|p| !run_set.contains(p)).collect()
    };
    let mut inflection_edges = Vec::new();
    for part in &parts {
        let cyclic = boundaries.is_empty();
        let ids: Vec<usize> = part.indices(n).collect();
        let edge_ids: Vec<usize> = if cyclic { (0..n).collect() } else { (1..part.edges.saturating_sub(1)).collect() };
        for k in edge_ids {
            let at = |o: isize| ids[((k as isize + o).rem_euclid(ids.len() as isize)) as usize];
            let (a, b, c, d) = (at(-1), at(0), at(1), at(2));
            if inflection_between(poly.points[a], poly.points[b], poly.points[c], poly.points[d], eps) {
                inflection_edges.push(b);
            }
        }
    }
    inflection_edges.sort_unstable();
    inflection_edges.dedup();

    let (aug, map, inserted) = insert_inflection_midpoints(poly, &inflection_edges);
    let m = aug.len();

    let mut junctions: BTreeMap<usize, JunctionKind> = BTreeMap::new();
    for &v in crossing.iter().map(|v| &map[*v]).chain(inserted.iter()) {
        junctions.insert(v, JunctionKind::InflectionPoint);
    }
    for r in &runs {
        for v in [map[r.start], map[r.end(n)]] {
            junctions.insert(v, JunctionKind::StraightLineJunction);
        }
    }
    if open {
        junctions.insert(0, JunctionKind::SequenceEnd);
        junctions.insert(m - 1, JunctionKind::SequenceEnd);
    }
    let mapped_runs: std::collections::HashSet<(usize, usize)> =
        runs.iter().map(|r| (map[r.start], map[r.end(n)])).collect();

    let mut segments = Vec::new();
    let mut convex_junctions = Vec::new();
    let pieces = if junctions.is_empty() {
        vec![VertexRange::new(0, m)]
    } else {
        let keys: Vec<usize> = junctions.keys().copied().collect();
        pieces_between(&keys, m, aug.topology)
    };
    let whole_loop = junctions.is_empty();
    for piece in pieces {
        let is_run = mapped_runs.contains(&(piece.start, piece.end(m))) && piece.edges >= 2;
        if is_run || piece.edges == 1 {
            segments.push(Segment { kind: SegmentKind::StraightLine, range: piece, undersampled: false });
            continue;
        }
        let leaves = if whole_loop && is_totally_convex(&aug, piece) {
            vec![piece]
        } else if whole_loop {
            // A non-convex loop is opened at vertex 0.
            convex_junctions.push(0);
            split_until_convex(&aug, piece, cfg.strictness)?
        } else {
            split_until_convex(&aug, piece, cfg.strictness)?
        };
        let split = leaves.len() > 1;
        for (k, leaf) in leaves.iter().enumerate() {
            if k > 0 {
                convex_junctions.push(leaf.start);
            }
            let count = leaf.vertex_count().min(m);
            let undersampled = count < 5;
            if undersampled {
                match (cfg.strictness, split) {
                    (Strictness::Strict, true) => return Err(Error::UnsplittableSegment { start: leaf.start }),
                    (Strictness::Strict, false) => return Err(Error::TooFewPoints { needed: 5, got: count }),
                    (Strictness::Lenient, _) => log::warn!(
                        "convex piece at vertex {} has only {} vertices; refining it by midpoints",
                        leaf.start,
                        count
                    ),
                }
            }
            segments.push(Segment { kind: SegmentKind::TotallyConvex, range: *leaf, undersampled });
        }
    }
    for v in convex_junctions {
        junctions.entry(v).or_insert(JunctionKind::ConvexJunction);
        if !convex_junction_condition(&aug, v) {
            match cfg.strictness {
                Strictness::Strict => return Err(Error::ConvexJunctionCondition { vertex: v }),
                Strictness::Lenient => log::warn!("convex junction condition violated at vertex {v}"),
            }
        }
    }
    segments.sort_by_key(|s| s.range.start);
    let structure = SegmentStructure { segments, junctions, topology: aug.topology, vertex_count: m };
    Ok((aug, structure))
}
