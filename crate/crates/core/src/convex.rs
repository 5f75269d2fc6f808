//! One refinement step on a totally convex polygon: tangent intersections,
//! parameter-point selection by the angle criterion, and harmonic insertion.

use crate::config::Strictness;
use crate::error::{Error, Result};
use crate::geom::{Point2, Topology};
use crate::projective::{cross_ratio, harmonic_insert, join, meet, HLine, HPoint};
use crate::scalar::Scalar;
use crate::tangent::tangent_lines;

/// Vertices of a totally convex polygon with one tangent line per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexLevelData<T> {
    pub vertices: Vec<HPoint<T>>,
    pub tangents: Vec<HLine<T>>,
    pub topology: Topology,
}

impl<T: Scalar> ConvexLevelData<T> {
    pub fn new(vertices: Vec<HPoint<T>>, tangents: Vec<HLine<T>>, topology: Topology) -> Result<Self> {
        if vertices.len() != tangents.len() {
            return Err(Error::DegenerateConfiguration("one tangent per vertex is required"));
        }
        if vertices.len() < 3 {
            return Err(Error::TooFewPoints { needed: 3, got: vertices.len() });
        }
        Ok(Self { vertices, tangents, topology })
    }

    /// Vertices with tangents from the five-point estimator.
    pub fn estimate(vertices: Vec<HPoint<T>>, topology: Topology) -> Result<Self> {
        let tangents = tangent_lines(&vertices, topology)?;
        Self::new(vertices, tangents, topology)
    }

    pub fn from_affine(points: &[Point2<T>], topology: Topology) -> Result<Self> {
        Self::estimate(points.iter().map(|&p| HPoint::from_point(p)).collect(), topology)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        match self.topology {
            Topology::Closed => self.len(),
            Topology::Open => self.len().saturating_sub(1),
        }
    }

    /// Affine coordinates of every vertex; vertices must be finite.
    pub fn affine_points(&self) -> Vec<Point2<T>> {
        self.vertices.iter().map(|v| affine(v)).collect()
    }
}

fn affine<T: Scalar>(p: &HPoint<T>) -> Point2<T> {
    p.to_affine().unwrap_or_else(|| Point2::new(T::nan(), T::nan()))
}

/// `T_i = L_i ∧ L_{i+1}` for every edge; apexes may lie at infinity.
pub fn tangent_intersections<T: Scalar>(d: &ConvexLevelData<T>) -> Result<Vec<HPoint<T>>> {
    let n = d.len();
    (0..d.edge_count())
        .map(|i| {
            meet(&d.tangents[i], &d.tangents[(i + 1) % n])
                .and_then(|t| t.normalize())
                .map_err(|_| Error::CoincidentTangents { edge: i })
        })
        .collect()
}

/// Angle of a candidate as the pair `(|sin|, |cos|)`; for an apex at
/// infinity the first component is the offset across the pencil direction.
#[derive(Debug, Clone, Copy)]
struct AngleKey<T> {
    sin: T,
    cos: T,
}

impl<T: Scalar> AngleKey<T> {
    /// True when `self` is smaller than `other` by more than `tol`.
    fn beats(&self, other: &Self, tol: T) -> bool {
        other.sin * self.cos - self.sin * other.cos > tol
    }
}

/// Geometry shared by every candidate of one edge.
struct Pencil<T> {
    apex: Option<Point2<T>>,
    /// Unit direction of `g`: apex towards the midpoint, or the pencil direction.
    dir: Point2<T>,
    mid: Point2<T>,
}

impl<T: Scalar> Pencil<T> {
    fn new(i: usize, d: &ConvexLevelData<T>, t: &HPoint<T>) -> Self {
        let n = d.len();
        let mid = affine(&d.vertices[i]).midpoint(affine(&d.vertices[(i + 1) % n]));
        match t.to_affine() {
            Some(apex) => {
                let dir = (mid - apex).normalized().unwrap_or_else(|| Point2::new(T::zero(), T::zero()));
                Self { apex: Some(apex), dir, mid }
            }
            None => {
                let dir = Point2::new(t.x, t.y).normalized().unwrap_or_else(|| Point2::new(T::zero(), T::zero()));
                Self { apex: None, dir, mid }
            }
        }
    }

    /// Signed offset of `p` from `g`; changes sign where the angle vanishes.
    fn side(&self, p: Point2<T>) -> T {
        match self.apex {
            Some(a) => self.dir.cross(p - a),
            None => self.dir.cross(p - self.mid),
        }
    }

    fn key(&self, p: Point2<T>) -> AngleKey<T> {
        match self.apex {
            Some(a) => match (p - a).normalized() {
                Some(h) => AngleKey { sin: self.dir.cross(h).abs(), cos: self.dir.dot(h).abs() },
                None => AngleKey { sin: T::one(), cos: T::zero() },
            },
            None => AngleKey { sin: self.dir.cross(p - self.mid).abs(), cos: T::one() },
        }
    }
}

#[inline]
fn candidate(i: usize, offset: usize, n: usize) -> usize {
    (i + offset) % n
}

/// Best candidate among the offsets in `offsets`, scanning in ascending
/// order and switching only on a strict improvement.
fn scan<T: Scalar>(
    i: usize,
    d: &ConvexLevelData<T>,
    pencil: &Pencil<T>,
    offsets: std::ops::Range<usize>,
) -> Option<usize> {
    let n = d.len();
    let tol = T::proj_tol();
    let mut best: Option<(usize, AngleKey<T>)> = None;
    for off in offsets {
        let j = candidate(i, off, n);
        let key = pencil.key(affine(&d.vertices[j]));
        if best.is_none_or(|(_, b)| key.beats(&b, tol)) {
            best = Some((j, key));
        }
    }
    best.map(|(j, _)| j)
}

/// Parameter vertex for edge `i`: the candidate `p_j` whose line to the apex
/// makes the smallest angle with the line from the apex to the edge
/// midpoint. Candidates are `j = i+2, …, i+n−1` (mod n); ties within the
/// projective tolerance go to the smallest offset.
///
/// This is the exhaustive O(n) reference; [`select_parameter_index_fast`]
/// returns the same index in O(log n) on convex data.
pub fn select_parameter_index<T: Scalar>(i: usize, d: &ConvexLevelData<T>, t_i: &HPoint<T>) -> Result<usize> {
    let n = d.len();
    if n < 3 {
        return Err(Error::NoCandidates { edge: i });
    }
    let pencil = Pencil::new(i, d, t_i);
    scan(i, d, &pencil, 2..n).ok_or(Error::NoCandidates { edge: i })
}

/// Same selection as [`select_parameter_index`], exploiting that the far
/// chain of a convex polygon is angularly monotone as seen from the apex.
/// A bisection on the side of `g` locates the sign change and only a small
/// window around it is scanned. Falls back to the exhaustive scan when the
/// ends of the chain do not bracket `g`.
pub fn select_parameter_index_fast<T: Scalar>(i: usize, d: &ConvexLevelData<T>, t_i: &HPoint<T>) -> Result<usize> {
    const WINDOW: usize = 3;
    let n = d.len();
    if n < 3 {
        return Err(Error::NoCandidates { edge: i });
    }
    if n <= 4 * WINDOW {
        return select_parameter_index(i, d, t_i);
    }
    let pencil = Pencil::new(i, d, t_i);
    let side = |off: usize| pencil.side(affine(&d.vertices[candidate(i, off, n)]));
    let (first, last) = (side(2), side(n - 1));
    if first.signum() == last.signum() || first == T::zero() || last == T::zero() {
        return scan(i, d, &pencil, 2..n).ok_or(Error::NoCandidates { edge: i });
    }
    let (mut lo, mut hi) = (2usize, n - 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if side(mid).signum() == first.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let from = lo.saturating_sub(WINDOW).max(2);
    let to = (hi + WINDOW).min(n);
    scan(i, d, &pencil, from..to).ok_or(Error::NoCandidates { edge: i })
}

/// Record of one harmonic insertion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionEvent<T> {
    pub edge: usize,
    pub parameter: usize,
    pub x: HPoint<T>,
    pub t: HPoint<T>,
    pub p: HPoint<T>,
    pub u: HPoint<T>,
    /// `cr(U, P, X, T)`, which is `-1` for an exact construction.
    pub cross_ratio: T,
}

fn unit_line<T: Scalar>(l: &HLine<T>) -> Result<HLine<T>> {
    l.oriented_normalized().ok_or(Error::DegenerateFrame)
}

fn side_value<T: Scalar>(l: &HLine<T>, p: &HPoint<T>) -> T {
    l.eval(p)
}

/// Inserted point for edge `i`: `N = P_i ∧ P_{i+1}`, `Λ = P_j ∧ T_i`,
/// `X = N ∧ Λ`, and `U` the harmonic conjugate of `P_j` with respect to
/// `X` and `T_i`.
pub fn insert_edge_point<T: Scalar>(i: usize, d: &ConvexLevelData<T>, t_i: &HPoint<T>, j: usize) -> Result<HPoint<T>> {
    insert_edge_point_traced(i, d, t_i, j).map(|e| e.u)
}

/// [`insert_edge_point`] returning the full construction.
pub fn insert_edge_point_traced<T: Scalar>(
    i: usize,
    d: &ConvexLevelData<T>,
    t_i: &HPoint<T>,
    j: usize,
) -> Result<InsertionEvent<T>> {
    let n = d.len();
    let k = (i + 1) % n;
    if j == i || j == k || j >= n {
        return Err(Error::ParameterOutsideRegion { edge: i, parameter: j });
    }
    let (pi, pk, pj) = (d.vertices[i].normalize()?, d.vertices[k].normalize()?, d.vertices[j].normalize()?);
    let t = t_i.normalize()?;
    // Side distances shrink with the edge, so the tolerance does too.
    let h = affine(&pi).distance(affine(&pk));
    let tol = T::proj_tol() * h;
    let li = unit_line(&d.tangents[i])?;
    let lk = unit_line(&d.tangents[k])?;
    let edge = unit_line(&join(&pi, &pk)?)?;

    // Admissible region: polygon side of both tangents, opposite side of the
    // edge from a finite apex.
    let ref_i = side_value(&li, &pk).signum();
    let ref_k = side_value(&lk, &pi).signum();
    let outside = Error::ParameterOutsideRegion { edge: i, parameter: j };
    if side_value(&li, &pj) * ref_i <= tol || side_value(&lk, &pj) * ref_k <= tol {
        return Err(outside);
    }
    let pj_side = side_value(&edge, &pj);
    if pj_side.abs() <= tol {
        return Err(outside);
    }
    if !t.is_at_infinity() && side_value(&edge, &t) * pj_side.signum() >= T::zero() {
        return Err(outside);
    }

    let lambda = join(&pj, &t).map_err(|_| Error::DegenerateFrame)?;
    let x = meet(&edge, &lambda).map_err(|_| Error::DegenerateFrame)?.normalize()?;
    let u = harmonic_insert(&x, &t, &pj)?;

    let inside = !u.is_at_infinity()
        && side_value(&li, &u) * ref_i >= -tol
        && side_value(&lk, &u) * ref_k >= -tol
        && side_value(&edge, &u) * pj_side.signum() <= tol;
    if !inside {
        return Err(Error::OutsideTangentTriangle { edge: i });
    }
    let cr = cross_ratio(&u, &pj, &x, &t)?;
    Ok(InsertionEvent { edge: i, parameter: j, x, t, p: pj, u, cross_ratio: cr })
}

/// Outcome of the standard rule on one edge.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeInsertion<T> {
    Harmonic(InsertionEvent<T>),
    /// The construction failed; the caller inserts the edge midpoint.
    Midpoint(Error),
}

/// Applies the standard rule to edge `i` given the apexes `ts`.
///
/// A degenerate harmonic frame always degrades to a midpoint; other
/// failures do so only in lenient mode.
pub fn standard_insert<T: Scalar>(
    i: usize,
    d: &ConvexLevelData<T>,
    ts: &[HPoint<T>],
    strictness: Strictness,
) -> Result<EdgeInsertion<T>> {
    let attempt = select_parameter_index_fast(i, d, &ts[i]).and_then(|j| insert_edge_point_traced(i, d, &ts[i], j));
    match attempt {
        Ok(ev) => Ok(EdgeInsertion::Harmonic(ev)),
        Err(e @ Error::DegenerateFrame) => {
            log::warn!("edge {i}: {e}; inserting the midpoint");
            Ok(EdgeInsertion::Midpoint(e))
        }
        Err(e) if strictness == Strictness::Lenient => {
            log::warn!("edge {i}: {e}; inserting the midpoint");
            Ok(EdgeInsertion::Midpoint(e))
        }
        Err(e) => Err(e),
    }
}

/// One full refinement level of a totally convex polygon. Old vertices keep
/// the even positions; tangents of the result are re-estimated.
pub fn refine_convex_level<T: Scalar>(d: &ConvexLevelData<T>, strictness: Strictness) -> Result<ConvexLevelData<T>> {
    refine_convex_level_traced(d, strictness).map(|(next, _)| next)
}

/// [`refine_convex_level`] that also returns the insertion events.
pub fn refine_convex_level_traced<T: Scalar>(
    d: &ConvexLevelData<T>,
    strictness: Strictness,
) -> Result<(ConvexLevelData<T>, Vec<InsertionEvent<T>>)> {
    if d.len() < 5 {
        return Err(Error::TooFewPoints { needed: 5, got: d.len() });
    }
    let ts = tangent_intersections(d)?;
    let n = d.len();
    let mut vertices = Vec::with_capacity(2 * n);
    let mut events = Vec::new();
    for i in 0..n {
        vertices.push(d.vertices[i]);
        if i >= d.edge_count() {
            continue;
        }
        match standard_insert(i, d, &ts, strictness)? {
            EdgeInsertion::Harmonic(ev) => {
                vertices.push(ev.u);
                events.push(ev);
            }
            EdgeInsertion::Midpoint(_) => {
                let m = affine(&d.vertices[i]).midpoint(affine(&d.vertices[(i + 1) % n]));
                vertices.push(HPoint::from_point(m));
            }
        }
    }
    Ok((ConvexLevelData::estimate(vertices, d.topology)?, events))
}

/// True when all turning signs agree and none vanishes (relative tolerance).
pub fn is_strictly_convex<T: Scalar>(points: &[Point2<T>], topology: Topology) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    let turns: Vec<i8> = match topology {
        Topology::Closed => (0..n)
            .map(|i| crate::geom::turn_sign(points[(i + n - 1) % n], points[i], points[(i + 1) % n], T::zero_tol()))
            .collect(),
        Topology::Open => {
            (1..n - 1).map(|i| crate::geom::turn_sign(points[i - 1], points[i], points[i + 1], T::zero_tol())).collect()
        }
    };
    let first = turns[0];
    first != 0 && turns.iter().all(|&s| s == first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangent::{conic_through_five, ConicCoefficients};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn regular(n: usize, r: f64, phase: f64) -> Vec<Point2<f64>> {
        (0..n)
            .map(|k| {
                let a = phase + 2.0 * PI * k as f64 / n as f64;
                Point2::new(r * a.cos(), r * a.sin())
            })
            .collect()
    }

    fn circle_data(angles: &[f64], topology: Topology) -> ConvexLevelData<f64> {
        let pts: Vec<_> = angles.iter().map(|a| Point2::new(a.cos(), a.sin())).collect();
        ConvexLevelData::from_affine(&pts, topology).unwrap()
    }

    #[test]
    fn circle_apex_from_axis_tangents() {
        let d = ConvexLevelData::<f64>::new(
            vec![HPoint::affine(1.0, 0.0), HPoint::affine(0.0, 1.0), HPoint::affine(-1.0, 0.0)],
            vec![HLine::new(-1.0, 1.0, 0.0), HLine::new(-1.0, 0.0, 1.0), HLine::new(-1.0, -1.0, 0.0)],
            Topology::Open,
        )
        .unwrap();
        let ts = tangent_intersections(&d).unwrap();
        assert!(ts[0].projectively_eq(&HPoint::affine(1.0, 1.0), 1e-15));
        assert!(ts[1].projectively_eq(&HPoint::affine(-1.0, 1.0), 1e-15));
    }

    #[test]
    fn antipodal_tangents_meet_at_infinity() {
        let d = ConvexLevelData::<f64>::new(
            vec![HPoint::affine(1.0, 0.0), HPoint::affine(-1.0, 0.0), HPoint::affine(0.0, 1.0)],
            vec![HLine::new(-1.0, 1.0, 0.0), HLine::new(-1.0, -1.0, 0.0), HLine::new(-1.0, 0.0, 1.0)],
            Topology::Open,
        )
        .unwrap();
        let t = tangent_intersections(&d).unwrap()[0];
        assert_eq!(t.w, 0.0);
        assert!(t.projectively_eq(&HPoint::at_infinity(0.0, 1.0), 1e-15));
    }

    #[test]
    fn square_with_diagonal_tangents() {
        // Corner tangents perpendicular to the diagonals meet above edge midpoints.
        let corners = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        let vertices = corners.map(|(x, y)| HPoint::affine(x, y)).to_vec();
        let tangents = corners.map(|(x, y)| HLine::new(-2.0, x, y)).to_vec();
        let d = ConvexLevelData::<f64>::new(vertices, tangents, Topology::Closed).unwrap();
        let ts = tangent_intersections(&d).unwrap();
        let expected = [(0.0, 2.0), (-2.0, 0.0), (0.0, -2.0), (2.0, 0.0)];
        for (t, (x, y)) in ts.iter().zip(expected) {
            assert!(t.projectively_eq(&HPoint::affine(x, y), 1e-15), "{t:?}");
        }
    }

    #[test]
    fn pentagon_selects_opposite_vertex() {
        let d = ConvexLevelData::from_affine(&regular(5, 1.0, 0.3), Topology::Closed).unwrap();
        let ts = tangent_intersections(&d).unwrap();
        for i in 0..5 {
            assert_eq!(select_parameter_index(i, &d, &ts[i]).unwrap(), (i + 3) % 5);
        }
    }

    #[test]
    fn hexagon_tie_goes_to_smaller_offset() {
        let d = ConvexLevelData::from_affine(&regular(6, 1.0, 0.0), Topology::Closed).unwrap();
        let ts = tangent_intersections(&d).unwrap();
        for i in 0..6 {
            assert_eq!(select_parameter_index(i, &d, &ts[i]).unwrap(), (i + 3) % 6);
        }
    }

    /// Brute force with the pencil-direction formula, independent of the key encoding.
    fn pencil_oracle(i: usize, pts: &[Point2<f64>], dir: Point2<f64>) -> usize {
        let n = pts.len();
        let m = pts[i].midpoint(pts[(i + 1) % n]);
        let d = dir.normalized().unwrap();
        (2..n)
            .map(|o| (i + o) % n)
            .min_by(|&a, &b| {
                let da = d.cross(pts[a] - m).abs();
                let db = d.cross(pts[b] - m).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap()
    }

    #[test]
    fn apex_at_infinity_uses_pencil_offsets() {
        let pts = regular(5, 1.0, 0.3);
        let d = ConvexLevelData::from_affine(&pts, Topology::Closed).unwrap();
        for i in 0..5 {
            let e = pts[(i + 1) % 5] - pts[i];
            let t = HPoint::at_infinity(-e.y, e.x);
            let expected = pencil_oracle(i, &pts, Point2::new(-e.y, e.x));
            assert_eq!(expected, (i + 3) % 5);
            assert_eq!(select_parameter_index(i, &d, &t).unwrap(), expected);
        }
    }

    #[test]
    fn circle_arc_insertion() {
        let d = ConvexLevelData::<f64>::new(
            vec![HPoint::affine(1.0, 0.0), HPoint::affine(0.0, 1.0), HPoint::affine(-1.0, 0.0)],
            vec![HLine::new(-1.0, 1.0, 0.0), HLine::new(-1.0, 0.0, 1.0), HLine::new(-1.0, -1.0, 0.0)],
            Topology::Open,
        )
        .unwrap();
        let t = HPoint::affine(1.0, 1.0);
        let ev = insert_edge_point_traced(0, &d, &t, 2).unwrap();
        assert!(ev.x.projectively_eq(&HPoint::affine(1.0 / 3.0, 2.0 / 3.0), 1e-14));
        // The line through (-1, 0) and (1, 1) meets the unit circle again at (3/5, 4/5).
        assert!((ev.u.x - 0.6).abs() < 1e-14 && (ev.u.y - 0.8).abs() < 1e-14);
        assert!((ev.cross_ratio + 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_configuration_inserts_on_axis() {
        // Edge (0,0)-(2,0), apex (1,1) below, parameter point on the axis x = 1.
        let d = ConvexLevelData::<f64>::new(
            vec![HPoint::affine(0.0, 0.0), HPoint::affine(2.0, 0.0), HPoint::affine(1.0, -3.0)],
            vec![HLine::new(0.0, 1.0, -1.0), HLine::new(-2.0, 1.0, 1.0), HLine::new(3.0, 0.0, 1.0)],
            Topology::Closed,
        )
        .unwrap();
        let t = HPoint::affine(1.0, 1.0);
        let ev = insert_edge_point_traced(0, &d, &t, 2).unwrap();
        assert!(ev.x.projectively_eq(&HPoint::affine(1.0, 0.0), 1e-15));
        let u = ev.u.to_affine().unwrap();
        assert!((u.x - 1.0).abs() < 1e-15);
        assert!(u.y > 0.0 && u.y < 1.0);
        let cr = cross_ratio(&ev.u, &ev.p, &ev.x, &ev.t).unwrap();
        assert!((cr + 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_outside_region_is_rejected() {
        let d = ConvexLevelData::<f64>::new(
            vec![HPoint::affine(0.0, 0.0), HPoint::affine(2.0, 0.0), HPoint::affine(1.0, 3.0)],
            vec![HLine::new(0.0, 1.0, -1.0), HLine::new(-2.0, 1.0, 1.0), HLine::new(3.0, 0.0, 1.0)],
            Topology::Closed,
        )
        .unwrap();
        let t = HPoint::affine(1.0, 1.0);
        assert_eq!(insert_edge_point(0, &d, &t, 2), Err(Error::ParameterOutsideRegion { edge: 0, parameter: 2 }));
        assert_eq!(insert_edge_point(0, &d, &t, 1), Err(Error::ParameterOutsideRegion { edge: 0, parameter: 1 }));
    }

    fn circle_residual(d: &ConvexLevelData<f64>) -> f64 {
        d.affine_points().iter().map(|p| (p.x * p.x + p.y * p.y - 1.0).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn closed_circle_level_stays_on_circle() {
        let angles = [0.0, 0.5, 1.3, 2.0, 2.9, 3.5, 4.4, 5.1, 5.8];
        let d = circle_data(&angles, Topology::Closed);
        let next = refine_convex_level(&d, Strictness::Strict).unwrap();
        assert_eq!(next.len(), 18);
        assert!(circle_residual(&next) <= 1e-9);
        for (k, v) in d.vertices.iter().enumerate() {
            assert_eq!(next.vertices[2 * k], *v);
        }
        assert!(is_strictly_convex(&next.affine_points(), Topology::Closed));
    }

    #[test]
    fn open_parabola_level_stays_on_parabola() {
        let pts: Vec<Point2<f64>> = [-1.5, -0.7, 0.2, 0.8, 1.9].iter().map(|&x| Point2::new(x, x * x)).collect();
        let d = ConvexLevelData::from_affine(&pts, Topology::Open).unwrap();
        let next = refine_convex_level(&d, Strictness::Strict).unwrap();
        assert_eq!(next.len(), 9);
        let c = ConicCoefficients::new([-1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        for p in next.affine_points() {
            assert!(c.eval(p).abs() <= 1e-12, "{p:?}");
        }
    }

    #[test]
    fn regular_polygon_symmetry_is_preserved() {
        let d = ConvexLevelData::from_affine(&regular(7, 2.0, 0.1), Topology::Closed).unwrap();
        let next = refine_convex_level(&d, Strictness::Strict).unwrap();
        let pts = next.affine_points();
        let rot = 2.0 * PI / 7.0;
        for k in 0..pts.len() {
            let p = pts[k];
            let q = pts[(k + 2) % pts.len()];
            let r = Point2::new(p.x * rot.cos() - p.y * rot.sin(), p.x * rot.sin() + p.y * rot.cos());
            assert!(r.distance(q) < 1e-12);
        }
    }

    /// Strictly convex closed polygon from sorted angles and mildly jittered radii.
    fn convex_polygon() -> impl Strategy<Value = Vec<Point2<f64>>> {
        (8usize..40)
            .prop_flat_map(|n| {
                (proptest::collection::vec(0.2f64..1.0, n), proptest::collection::vec(-0.04f64..0.04, n)).prop_map(
                    |(gaps, jitter)| {
                        let total: f64 = gaps.iter().sum();
                        let mut a = 0.0;
                        gaps.iter()
                            .zip(&jitter)
                            .map(|(g, j)| {
                                a += 2.0 * PI * g / total;
                                Point2::new((1.0 + j) * a.cos() * 1.5, (1.0 + j) * a.sin())
                            })
                            .collect::<Vec<_>>()
                    },
                )
            })
            .prop_filter("strictly convex", |p| is_strictly_convex(p, Topology::Closed))
    }

    proptest! {
        #[test]
        fn fast_selection_matches_exhaustive(pts in convex_polygon()) {
            let d = ConvexLevelData::from_affine(&pts, Topology::Closed).unwrap();
            let ts = tangent_intersections(&d).unwrap();
            for i in 0..d.len() {
                prop_assert_eq!(
                    select_parameter_index_fast(i, &d, &ts[i]).unwrap(),
                    select_parameter_index(i, &d, &ts[i]).unwrap()
                );
            }
        }

        #[test]
        fn refinement_preserves_convexity_and_harmonicity(pts in convex_polygon()) {
            let d = ConvexLevelData::from_affine(&pts, Topology::Closed).unwrap();
            let Ok((next, events)) = refine_convex_level_traced(&d, Strictness::Strict) else {
                return Err(TestCaseError::fail("refinement failed"));
            };
            prop_assert!(is_strictly_convex(&next.affine_points(), Topology::Closed));
            for ev in &events {
                prop_assert!((ev.cross_ratio + 1.0).abs() < 1e-9);
                // Strictly inside the tangent triangle.
                let (a, b) = (affine(&d.vertices[ev.edge]), affine(&d.vertices[(ev.edge + 1) % d.len()]));
                let u = affine(&ev.u);
                let s = crate::geom::orient(a, b, affine(&ev.p)).signum();
                prop_assert!(crate::geom::orient(a, b, u) * s < 0.0);
            }
        }

        #[test]
        fn conic_invariance(a in 0.5f64..3.0, b in 0.5f64..3.0, rot in 0.0f64..PI, gaps in proptest::collection::vec(0.3f64..1.0, 6..14)) {
            let total: f64 = gaps.iter().sum();
            let mut s = 0.0;
            let pts: Vec<Point2<f64>> = gaps.iter().map(|g| {
                s += 2.0 * PI * g / total;
                let (u, v) = (a * s.cos(), b * s.sin());
                Point2::new(u * rot.cos() - v * rot.sin(), u * rot.sin() + v * rot.cos())
            }).collect();
            let d = ConvexLevelData::from_affine(&pts, Topology::Closed).unwrap();
            let h: [HPoint<f64>; 5] = std::array::from_fn(|k| d.vertices[k]);
            let c = conic_through_five(&h).unwrap();
            let next = refine_convex_level(&d, Strictness::Strict).unwrap();
            for p in next.affine_points() {
                let g = c.gradient(p).norm();
                prop_assert!(c.eval(p).abs() / g <= 1e-10);
            }
        }

        #[test]
        fn similarity_equivariance(pts in convex_polygon(), ang in 0.0..std::f64::consts::TAU, s in 0.1f64..10.0, tx in -5.0f64..5.0, ty in -5.0f64..5.0) {
            let f = |p: Point2<f64>| Point2::new(
                s * (p.x * ang.cos() - p.y * ang.sin()) + tx,
                s * (p.x * ang.sin() + p.y * ang.cos()) + ty,
            );
            let d = ConvexLevelData::from_affine(&pts, Topology::Closed).unwrap();
            let moved: Vec<_> = pts.iter().map(|&p| f(p)).collect();
            let dm = ConvexLevelData::from_affine(&moved, Topology::Closed).unwrap();
            let a = refine_convex_level(&d, Strictness::Strict).unwrap().affine_points();
            let b = refine_convex_level(&dm, Strictness::Strict).unwrap().affine_points();
            for (p, q) in a.iter().zip(&b) {
                prop_assert!(f(*p).distance(*q) <= 1e-9 * s.max(1.0) * (1.0 + tx.abs() + ty.abs()));
            }
        }
    }
}
