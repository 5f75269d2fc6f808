//! Affine planar primitives: points, bounding boxes and polylines.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    /// `½(a + b)` evaluated component-wise.
    #[inline]
    pub fn midpoint(self, o: Self) -> Self {
        Self::new((self.x + o.x) * T::half(), (self.y + o.y) * T::half())
    }

    #[inline]
    pub fn distance(self, o: Self) -> T {
        (o - self).norm()
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(Self::new(self.x / n, self.y / n))
        } else {
            None
        }
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive for a left turn.
#[inline]
pub fn orient<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    (b - a).cross(c - a)
}

/// Turning sign at `b` for the path `a → b → c`, with a relative dead zone.
pub fn turn_sign<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>, rel_tol: T) -> i8 {
    let u = b - a;
    let v = c - b;
    let scale = u.norm() * v.norm();
    crate::scalar::sign_with_tol(u.cross(v), rel_tol * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox<T> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn of(points: &[Point2<T>]) -> Option<Self> {
        let first = *points.first()?;
        let mut bb = Self { min: first, max: first };
        for p in &points[1..] {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn diagonal(&self) -> T {
        (self.max - self.min).norm()
    }

    pub fn center(&self) -> Point2<T> {
        self.min.midpoint(self.max)
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    #[default]
    Open,
    Closed,
}

/// Ordered vertex sequence with open or closed topology.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    pub points: Vec<Point2<T>>,
    pub topology: Topology,
}

impl<T: Scalar> Polyline<T> {
    pub fn new(points: Vec<Point2<T>>, topology: Topology) -> Self {
        Self { points, topology }
    }

    pub fn open(points: Vec<Point2<T>>) -> Self {
        Self::new(points, Topology::Open)
    }

    pub fn closed(points: Vec<Point2<T>>) -> Self {
        Self::new(points, Topology::Closed)
    }

    /// Builds a polyline from raw `(x, y)` pairs.
    pub fn from_xy(xy: &[(T, T)], topology: Topology) -> Self {
        Self::new(xy.iter().map(|&(x, y)| Point2::new(x, y)).collect(), topology)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn is_closed(&self) -> bool {
        self.topology == Topology::Closed
    }

    pub fn edge_count(&self) -> usize {
        match (self.topology, self.points.len()) {
            (_, 0) | (_, 1) => 0,
            (Topology::Open, n) => n - 1,
            (Topology::Closed, n) => n,
        }
    }

    /// Vertex at a possibly out-of-range index; wraps for closed polylines.
    pub fn vertex(&self, i: isize) -> Option<Point2<T>> {
        let n = self.points.len() as isize;
        if n == 0 {
            return None;
        }
        match self.topology {
            Topology::Closed => Some(self.points[i.rem_euclid(n) as usize]),
            Topology::Open => (0..n).contains(&i).then(|| self.points[i as usize]),
        }
    }

    /// End points of edge `i` (from vertex `i` to its successor).
    pub fn edge(&self, i: usize) -> (Point2<T>, Point2<T>) {
        let n = self.points.len();
        (self.points[i], self.points[(i + 1) % n])
    }

    pub fn edge_lengths(&self) -> Vec<T> {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.edge(i);
                a.distance(b)
            })
            .collect()
    }

    pub fn bounding_box(&self) -> Option<BoundingBox<T>> {
        BoundingBox::of(&self.points)
    }

    /// Bounding-box diagonal, or zero for an empty polyline.
    pub fn diagonal(&self) -> T {
        self.bounding_box().map(|b| b.diagonal()).unwrap_or_else(T::zero)
    }

    /// Applies an affine map to every vertex.
    pub fn map_points(&self, f: impl Fn(Point2<T>) -> Point2<T>) -> Self {
        Self::new(self.points.iter().map(|&p| f(p)).collect(), self.topology)
    }
}
