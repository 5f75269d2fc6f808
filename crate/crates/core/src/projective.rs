//! Homogeneous points and lines of the projectively extended plane.
//!
//! A point `(w, x, y)` represents the affine point `(x/w, y/w)`, or for
//! `w = 0` the point at infinity in direction `(x, y)`. A line
//! `(l0, l1, l2)` is the locus `l0·w + l1·x + l2·y = 0`. Join and meet are
//! both the 3-vector cross product.
//!
//! Zero tests are relative: a product counts as zero when its largest
//! component is below [`Scalar::ZERO_TOL`] times the product of the input
//! magnitudes.

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::scalar::Scalar;

#[inline]
pub(crate) fn cross3<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub(crate) fn dot3<T: Scalar>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm3<T: Scalar>(a: [T; 3]) -> T {
    dot3(a, a).sqrt()
}

#[inline]
pub(crate) fn max_abs3<T: Scalar>(a: [T; 3]) -> T {
    a[0].abs().max(a[1].abs()).max(a[2].abs())
}

/// Determinant of the 3×3 matrix with rows `a`, `b`, `c`.
#[inline]
pub fn det3<T: Scalar>(a: [T; 3], b: [T; 3], c: [T; 3]) -> T {
    dot3(a, cross3(b, c))
}

fn rescale3<T: Scalar>(a: [T; 3]) -> [T; 3] {
    let m = max_abs3(a);
    if m > T::zero() {
        [a[0] / m, a[1] / m, a[2] / m]
    } else {
        a
    }
}

/// Cross product with a relative zero test; `None` when the inputs coincide.
fn wedge<T: Scalar>(a: [T; 3], b: [T; 3]) -> Option<[T; 3]> {
    let c = cross3(a, b);
    let scale = max_abs3(a) * max_abs3(b);
    if max_abs3(c) <= T::zero_tol() * scale || scale == T::zero() {
        None
    } else {
        Some(c)
    }
}

fn projectively_equal3<T: Scalar>(a: [T; 3], b: [T; 3], tol: T) -> bool {
    norm3(cross3(a, b)) <= tol * norm3(a) * norm3(b)
}

/// Homogeneous point `(w, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HPoint<T> {
    pub w: T,
    pub x: T,
    pub y: T,
}

impl<T: Scalar> HPoint<T> {
    #[inline]
    pub fn new(w: T, x: T, y: T) -> Self {
        Self { w, x, y }
    }

    /// Affine point `(x, y)` with unit weight.
    #[inline]
    pub fn affine(x: T, y: T) -> Self {
        Self::new(T::one(), x, y)
    }

    #[inline]
    pub fn from_point(p: Point2<T>) -> Self {
        Self::affine(p.x, p.y)
    }

    /// Point at infinity in direction `(dx, dy)`.
    #[inline]
    pub fn at_infinity(dx: T, dy: T) -> Self {
        Self::new(T::zero(), dx, dy)
    }

    #[inline]
    pub fn coords(&self) -> [T; 3] {
        [self.w, self.x, self.y]
    }

    #[inline]
    pub fn from_coords(c: [T; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    /// True when the weight is negligible relative to the direction part.
    pub fn is_at_infinity(&self) -> bool {
        self.w.abs() <= T::zero_tol() * max_abs3(self.coords())
    }

    /// Scales so that `w ∈ {0, 1}`; points at infinity get a unit direction.
    pub fn normalize(&self) -> Result<Self> {
        let m = max_abs3(self.coords());
        if m == T::zero() || !m.is_finite() {
            return Err(Error::ZeroVector);
        }
        if self.w.abs() <= T::zero_tol() * m {
            let n = self.x.hypot(self.y);
            if n == T::zero() {
                return Err(Error::ZeroVector);
            }
            Ok(Self::new(T::zero(), self.x / n, self.y / n))
        } else {
            Ok(Self::new(T::one(), self.x / self.w, self.y / self.w))
        }
    }

    /// Affine coordinates, or `None` for a point at infinity.
    pub fn to_affine(&self) -> Option<Point2<T>> {
        if self.is_at_infinity() {
            None
        } else {
            Some(Point2::new(self.x / self.w, self.y / self.w))
        }
    }

    /// Equality up to a nonzero scalar factor.
    pub fn projectively_eq(&self, other: &Self, tol: T) -> bool {
        projectively_equal3(self.coords(), other.coords(), tol)
    }
}

/// Homogeneous line `l0·w + l1·x + l2·y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HLine<T> {
    pub l0: T,
    pub l1: T,
    pub l2: T,
}

impl<T: Scalar> HLine<T> {
    #[inline]
    pub fn new(l0: T, l1: T, l2: T) -> Self {
        Self { l0, l1, l2 }
    }

    #[inline]
    pub fn coords(&self) -> [T; 3] {
        [self.l0, self.l1, self.l2]
    }

    #[inline]
    pub fn from_coords(c: [T; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    /// Value of the line form at `p`. Its sign gives the side of an affine
    /// point with positive weight.
    #[inline]
    pub fn eval(&self, p: &HPoint<T>) -> T {
        dot3(self.coords(), p.coords())
    }

    /// Euclidean normal `(l1, l2)`.
    #[inline]
    pub fn normal(&self) -> Point2<T> {
        Point2::new(self.l1, self.l2)
    }

    /// Direction vector of the line.
    #[inline]
    pub fn direction(&self) -> Point2<T> {
        Point2::new(-self.l2, self.l1)
    }

    /// Scales so that `(l1, l2)` has unit Euclidean norm.
    pub fn oriented_normalized(&self) -> Option<Self> {
        let n = self.l1.hypot(self.l2);
        if n <= T::zero_tol() * max_abs3(self.coords()) || n == T::zero() {
            None
        } else {
            Some(Self::new(self.l0 / n, self.l1 / n, self.l2 / n))
        }
    }

    /// Signed Euclidean distance of an affine point from the line.
    pub fn signed_distance(&self, p: Point2<T>) -> T {
        (self.l0 + self.l1 * p.x + self.l2 * p.y) / self.l1.hypot(self.l2)
    }

    /// Incidence test scaled by the magnitudes of both operands.
    pub fn is_incident(&self, p: &HPoint<T>, tol: T) -> bool {
        self.eval(p).abs() <= tol * norm3(self.coords()) * norm3(p.coords())
    }

    pub fn projectively_eq(&self, other: &Self, tol: T) -> bool {
        projectively_equal3(self.coords(), other.coords(), tol)
    }

    /// Angle between two lines in `[0, π/2]` (the smaller of the two
    /// complementary angles).
    pub fn angle_to(&self, other: &Self) -> T {
        let a = self.normal();
        let b = other.normal();
        a.cross(b).abs().atan2(a.dot(b).abs())
    }
}

/// Line through two points.
pub fn join<T: Scalar>(p: &HPoint<T>, q: &HPoint<T>) -> Result<HLine<T>> {
    wedge(p.coords(), q.coords()).map(HLine::from_coords).ok_or(Error::CoincidentPoints)
}

/// Intersection point of two lines; parallel lines meet at infinity.
pub fn meet<T: Scalar>(a: &HLine<T>, b: &HLine<T>) -> Result<HPoint<T>> {
    wedge(a.coords(), b.coords()).map(HPoint::from_coords).ok_or(Error::CoincidentLines)
}

/// Free-function form of [`HPoint::normalize`].
pub fn normalize<T: Scalar>(p: &HPoint<T>) -> Result<HPoint<T>> {
    p.normalize()
}

/// Index pair `(l, m)` of the 2×2 minor of `[a b]` with the largest
/// absolute determinant, together with that determinant.
fn best_minor<T: Scalar>(a: [T; 3], b: [T; 3]) -> ((usize, usize), T) {
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut best = (pairs[0], T::zero());
    for &(l, m) in &pairs {
        let d = a[l] * b[m] - a[m] * b[l];
        if d.abs() > best.1.abs() {
            best = ((l, m), d);
        }
    }
    best
}

#[inline]
fn minor<T: Scalar>(a: [T; 3], b: [T; 3], (l, m): (usize, usize)) -> T {
    a[l] * b[m] - a[m] * b[l]
}

fn collinear3<T: Scalar>(a: [T; 3], b: [T; 3], c: [T; 3], tol: T) -> bool {
    det3(a, b, c).abs() <= tol * norm3(a) * norm3(b) * norm3(c)
}

/// Cross ratio `cr(X, E, E0, E1) = x1/x0`, where `(x0, x1)` are the
/// coordinates of `X` in the projective frame `{E0, E1; E}`.
///
/// Equals `-1` exactly when the four points are harmonic. Returns an
/// infinite value when `X = E1`.
pub fn cross_ratio<T: Scalar>(x: &HPoint<T>, e: &HPoint<T>, e0: &HPoint<T>, e1: &HPoint<T>) -> Result<T> {
    let (x, e, e0, e1) = (rescale3(x.coords()), rescale3(e.coords()), rescale3(e0.coords()), rescale3(e1.coords()));
    let tol = T::proj_tol();
    if projectively_equal3(e0, e1, tol) || projectively_equal3(e, e0, tol) || projectively_equal3(e, e1, tol) {
        return Err(Error::DegenerateFrame);
    }
    if !collinear3(x, e0, e1, tol) || !collinear3(e, e0, e1, tol) {
        return Err(Error::NotCollinear);
    }
    let (lm, d) = best_minor(e0, e1);
    if d.abs() <= T::zero_tol() {
        return Err(Error::DegenerateFrame);
    }
    // E = a·E0 + b·E1 and X = c·E0 + d·E1 by Cramer's rule on the best minor;
    // the common denominator cancels in x1/x0 = (d/b)/(c/a).
    let a = minor(e, e1, lm);
    let b = minor(e0, e, lm);
    let c = minor(x, e1, lm);
    let dd = minor(e0, x, lm);
    Ok((dd * a) / (c * b))
}

/// Harmonic conjugate `U` of `p_ref` with respect to `x` and `t`.
///
/// Solves `γ·X + μ·T = P` on the 2×2 minor with the largest `|D|` and returns
/// `U = D₁·X − D₂·T`, so that `cr(U, P, X, T) = −1`.
pub fn harmonic_insert<T: Scalar>(x: &HPoint<T>, t: &HPoint<T>, p_ref: &HPoint<T>) -> Result<HPoint<T>> {
    let (xc, tc, pc) = (rescale3(x.coords()), rescale3(t.coords()), rescale3(p_ref.coords()));
    if !collinear3(xc, tc, pc, T::proj_tol()) {
        return Err(Error::NotCollinear);
    }
    let (lm, d) = best_minor(xc, tc);
    if d.abs() <= T::zero_tol() {
        return Err(Error::DegenerateFrame);
    }
    let d1 = minor(pc, tc, lm);
    let d2 = minor(xc, pc, lm);
    // p_ref coinciding with x or t collapses the frame.
    if d1.abs() <= T::zero_tol() * d.abs().max(T::one()) || d2.abs() <= T::zero_tol() * d.abs().max(T::one()) {
        return Err(Error::DegenerateFrame);
    }
    let u = [d1 * xc[0] - d2 * tc[0], d1 * xc[1] - d2 * tc[1], d1 * xc[2] - d2 * tc[2]];
    HPoint::from_coords(u).normalize()
}

/// Similarity frame mapping world coordinates into a unit-sized local
/// system centered on a bounding box. Homogeneous constructions run in the
/// local system so that tolerances are scale-relative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<T> {
    pub center: Point2<T>,
    pub scale: T,
}

impl<T: Scalar> Frame<T> {
    pub fn identity() -> Self {
        Self { center: Point2::new(T::zero(), T::zero()), scale: T::one() }
    }

    /// Frame centered on the bounding box of `points`, scaled by its diagonal.
    pub fn fit(points: &[Point2<T>]) -> Self {
        match crate::geom::BoundingBox::of(points) {
            Some(bb) if bb.diagonal() > T::zero() => Self { center: bb.center(), scale: bb.diagonal() },
            Some(bb) => Self { center: bb.center(), scale: T::one() },
            None => Self::identity(),
        }
    }

    #[inline]
    pub fn to_local(&self, p: Point2<T>) -> HPoint<T> {
        HPoint::affine((p.x - self.center.x) / self.scale, (p.y - self.center.y) / self.scale)
    }

    #[inline]
    pub fn to_local_affine(&self, p: Point2<T>) -> Point2<T> {
        (p - self.center) * (T::one() / self.scale)
    }

    /// World coordinates of a finite local point.
    pub fn to_world(&self, h: &HPoint<T>) -> Option<Point2<T>> {
        h.to_affine().map(|a| Point2::new(self.center.x + a.x * self.scale, self.center.y + a.y * self.scale))
    }
}
