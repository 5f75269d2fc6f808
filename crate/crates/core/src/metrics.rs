//! Diagnostics on refined polylines: discrete curvature, convexity
//! signature, conic residual, displacement and tangent turning.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{turn_sign, Point2, Polyline, Topology};
use crate::projective::HLine;
use crate::scalar::Scalar;
use crate::tangent::ConicCoefficients;

/// Menger curvature at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample<T> {
    pub vertex: usize,
    pub position: Point2<T>,
    /// Signed inverse circumradius; positive for a left turn.
    pub curvature: T,
    /// Unit left normal of the chord through the two neighbors.
    pub normal: Point2<T>,
    /// Two of the three points coincide.
    pub degenerate: bool,
}

fn menger<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> (T, bool) {
    let (ab, bc, ca) = (a.distance(b), b.distance(c), c.distance(a));
    let denom = ab * bc * ca;
    if denom == T::zero() {
        return (T::zero(), true);
    }
    if turn_sign(a, b, c, T::proj_tol()) == 0 {
        return (T::zero(), false);
    }
    (T::two() * (b - a).cross(c - b) / denom, false)
}

/// Signed curvature of the circle through each vertex and its neighbors,
/// for interior vertices of open polylines and every vertex of closed ones.
pub fn discrete_curvature<T: Scalar>(poly: &Polyline<T>) -> Vec<CurvatureSample<T>> {
    let n = poly.len();
    if n < 3 {
        return Vec::new();
    }
    let range = if poly.is_closed() { 0..n } else { 1..n - 1 };
    range
        .map(|i| {
            let a = poly.points[(i + n - 1) % n];
            let b = poly.points[i];
            let c = poly.points[(i + 1) % n];
            let (curvature, degenerate) = menger(a, b, c);
            let normal = (c - a).perp().normalized().unwrap_or(Point2::new(T::zero(), T::zero()));
            CurvatureSample { vertex: i, position: b, curvature, normal, degenerate }
        })
        .collect()
}

/// Default comb scale: a tenth of the diagonal for the largest curvature.
pub fn default_comb_scale<T: Scalar>(poly: &Polyline<T>, samples: &[CurvatureSample<T>]) -> T {
    let kmax = samples.iter().fold(T::zero(), |m, s| m.max(s.curvature.abs()));
    if kmax > T::zero() {
        T::of(0.1) * poly.diagonal() / kmax
    } else {
        T::zero()
    }
}

/// Comb teeth `(base, tip)` with tip `base + normal·κ·scale`.
pub fn curvature_comb<T: Scalar>(poly: &Polyline<T>, scale: Option<T>) -> Vec<(Point2<T>, Point2<T>)> {
    let samples = discrete_curvature(poly);
    let scale = scale.unwrap_or_else(|| default_comb_scale(poly, &samples));
    samples.iter().map(|s| (s.position, s.position + s.normal * (s.curvature * scale))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexitySignature {
    /// Turning sign per vertex that has two neighbors.
    pub signs: Vec<i8>,
    /// Sign changes between consecutive nonzero entries.
    pub inflections: usize,
}

/// Turning signs and the number of their alternations; zero signs are
/// skipped, and closed polylines wrap around.
pub fn convexity_signature<T: Scalar>(poly: &Polyline<T>) -> ConvexitySignature {
    let n = poly.len();
    if n < 3 {
        return ConvexitySignature { signs: Vec::new(), inflections: 0 };
    }
    let range = if poly.is_closed() { 0..n } else { 1..n - 1 };
    let signs: Vec<i8> = range
        .map(|i| turn_sign(poly.points[(i + n - 1) % n], poly.points[i], poly.points[(i + 1) % n], T::proj_tol()))
        .collect();
    let nz: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
    let mut inflections = nz.windows(2).filter(|w| w[0] != w[1]).count();
    if poly.topology == Topology::Closed && nz.len() > 1 && nz[0] != nz[nz.len() - 1] {
        inflections += 1;
    }
    ConvexitySignature { signs, inflections }
}

/// Largest first-order distance `|F(p)| / |∇F(p)|` of `points` from the conic.
pub fn conic_residual<T: Scalar>(points: &[Point2<T>], c: &ConicCoefficients<T>) -> Result<T> {
    let mut worst = T::zero();
    for &p in points {
        let g = c.gradient(p).norm();
        if g <= T::zero_tol() {
            return Err(Error::GradientVanishes);
        }
        worst = worst.max(c.eval(p).abs() / g);
    }
    Ok(worst)
}

fn height<T: Scalar>(a: Point2<T>, b: Point2<T>, p: Point2<T>) -> T {
    let d = b - a;
    let len = d.norm();
    if len == T::zero() {
        a.distance(p)
    } else {
        d.cross(p - a).abs() / len
    }
}

/// Largest distance of an inserted point from the line of its parent edge.
/// `inserted[i]` flags the vertices of `next` that are new; the remaining
/// vertices must reproduce `prev` exactly, with at most one new vertex per
/// edge.
pub fn displacement_metrics<T: Scalar>(prev: &Polyline<T>, next: &Polyline<T>, inserted: &[bool]) -> Result<T> {
    if inserted.len() != next.len() {
        return Err(Error::ProvenanceMismatch);
    }
    let n = prev.len();
    let mut kept = 0usize;
    let mut pending: Option<Point2<T>> = None;
    let mut worst = T::zero();
    for (q, &new) in next.points.iter().zip(inserted) {
        if new {
            if kept == 0 || pending.is_some() {
                return Err(Error::ProvenanceMismatch);
            }
            pending = Some(*q);
            continue;
        }
        if kept >= n || prev.points[kept] != *q {
            return Err(Error::ProvenanceMismatch);
        }
        if let Some(p) = pending.take() {
            worst = worst.max(height(prev.points[kept - 1], prev.points[kept], p));
        }
        kept += 1;
    }
    if kept != n {
        return Err(Error::ProvenanceMismatch);
    }
    if let Some(p) = pending {
        if !prev.is_closed() {
            return Err(Error::ProvenanceMismatch);
        }
        worst = worst.max(height(prev.points[n - 1], prev.points[0], p));
    }
    Ok(worst)
}

/// Largest angle between the tangent of a level-k vertex and the tangent of
/// the same vertex at level k+1, where `vertex_map[i]` is its new index.
pub fn tangent_turning<T: Scalar>(prev: &[HLine<T>], next: &[HLine<T>], vertex_map: &[usize]) -> T {
    prev.iter()
        .zip(vertex_map)
        .filter_map(|(a, &j)| next.get(j).map(|b| a.angle_to(b)))
        .fold(T::zero(), |m, v| m.max(v))
}

/// Shortest and longest edge.
pub fn edge_length_range<T: Scalar>(poly: &Polyline<T>) -> (T, T) {
    poly.edge_lengths().into_iter().fold((T::infinity(), T::zero()), |(lo, hi), l| (lo.min(l), hi.max(l)))
}
