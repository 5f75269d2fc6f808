//! Five-point conic tangent estimator, per-level tangent fields, and conic
//! oracles used for verification and residual metrics.

use crate::error::{Error, Result};
use crate::geom::{Point2, Polyline, Topology};
use crate::projective::{cross3, dot3, max_abs3, HLine, HPoint};
use crate::scalar::Scalar;

/// Five points `q1..q5`; the tangent is sought at `q3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FivePointStencil<T> {
    pub q: [HPoint<T>; 5],
}

impl<T: Scalar> FivePointStencil<T> {
    pub fn new(q1: HPoint<T>, q2: HPoint<T>, q3: HPoint<T>, q4: HPoint<T>, q5: HPoint<T>) -> Self {
        Self { q: [q1, q2, q3, q4, q5] }
    }

    pub fn from_affine(p: [Point2<T>; 5]) -> Self {
        Self { q: p.map(HPoint::from_point) }
    }

    /// Stencil for vertex `i` of `points`, using [`stencil_indices`].
    pub fn around(points: &[HPoint<T>], i: usize, topology: Topology) -> Result<Self> {
        let idx = stencil_indices(points.len(), i, topology)?;
        Ok(Self { q: idx.map(|k| points[k]) })
    }

    pub fn center(&self) -> HPoint<T> {
        self.q[2]
    }
}

/// Indices of the five-point stencil around vertex `i`.
///
/// Closed polygons wrap around. Open polygons reflect the missing neighbors
/// onto interior vertices, so the first two and the last two vertices reuse
/// the stencils `{p0..p4}` and `{p(n-5)..p(n-1)}`.
pub fn stencil_indices(n: usize, i: usize, topology: Topology) -> Result<[usize; 5]> {
    if n < 5 {
        return Err(Error::TooFewPoints { needed: 5, got: n });
    }
    let n_i = n as isize;
    let pick = |k: isize| -> usize {
        match topology {
            Topology::Closed => k.rem_euclid(n_i) as usize,
            Topology::Open => match k {
                -2 => 3,
                -1 => 4,
                k if k == n_i => (n_i - 5) as usize,
                k if k == n_i + 1 => (n_i - 4) as usize,
                k => k as usize,
            },
        }
    };
    let i = i as isize;
    Ok([pick(i - 2), pick(i - 1), pick(i), pick(i + 1), pick(i + 2)])
}

fn unit_wedge<T: Scalar>(a: [T; 3], b: [T; 3]) -> Result<[T; 3]> {
    let c = cross3(a, b);
    let m = max_abs3(c);
    if m <= T::zero_tol() * max_abs3(a) * max_abs3(b) || m == T::zero() || !m.is_finite() {
        return Err(Error::DegenerateStencil);
    }
    Ok([c[0] / m, c[1] / m, c[2] / m])
}

fn unit<T: Scalar>(a: [T; 3]) -> Result<[T; 3]> {
    let m = max_abs3(a);
    if m == T::zero() || !m.is_finite() {
        return Err(Error::DegenerateStencil);
    }
    Ok([a[0] / m, a[1] / m, a[2] / m])
}

/// Tangent line at `q3` of the conic through the five stencil points:
/// `M33 = Q3 ∧ (M15 ∧ (A ∧ B))`, `A = M12 ∧ M34`, `B = M54 ∧ M32`.
pub fn estimate_tangent<T: Scalar>(s: &FivePointStencil<T>) -> Result<HLine<T>> {
    let q: Vec<[T; 3]> = s.q.iter().map(|p| unit(p.coords())).collect::<Result<_>>()?;
    let m = |i: usize, j: usize| unit_wedge(q[i - 1], q[j - 1]);
    let a = unit_wedge(m(1, 2)?, m(3, 4)?)?;
    let b = unit_wedge(m(5, 4)?, m(3, 2)?)?;
    let pascal = unit_wedge(m(1, 5)?, unit_wedge(a, b)?)?;
    Ok(HLine::from_coords(unit_wedge(q[2], pascal)?))
}

/// One tangent line per vertex of a level.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TangentField<T> {
    pub lines: Vec<HLine<T>>,
}

impl<T: Scalar> TangentField<T> {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Estimated tangents for every vertex of a homogeneous point sequence.
pub fn tangent_lines<T: Scalar>(points: &[HPoint<T>], topology: Topology) -> Result<Vec<HLine<T>>> {
    (0..points.len()).map(|i| estimate_tangent(&FivePointStencil::around(points, i, topology)?)).collect()
}

/// Tangent field of the vertex range `range` of `poly`, treated as a
/// subpolygon in its own right: a range covering a whole closed polyline
/// wraps around, any other range is open.
pub fn build_tangent_field<T: Scalar>(poly: &Polyline<T>, range: std::ops::Range<usize>) -> Result<TangentField<T>> {
    let whole = range.start == 0 && range.end == poly.len();
    let topology = if whole { poly.topology } else { Topology::Open };
    let pts: Vec<HPoint<T>> = poly.points[range].iter().map(|&p| HPoint::from_point(p)).collect();
    Ok(TangentField { lines: tangent_lines(&pts, topology)? })
}

/// Conic `a·x² + b·xy + c·y² + d·x + e·y + f = 0`, coefficients scaled to
/// unit Euclidean norm. The homogeneous form uses `w` in place of `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicCoefficients<T> {
    pub c: [T; 6],
}

impl<T: Scalar> ConicCoefficients<T> {
    /// Scales the coefficients to unit norm.
    pub fn new(c: [T; 6]) -> Result<Self> {
        let n = c.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { c: c.map(|v| v / n) })
    }

    /// Symmetric matrix of the quadratic form over `(w, x, y)`.
    pub fn matrix(&self) -> [[T; 3]; 3] {
        let [a, b, c, d, e, f] = self.c;
        let h = T::half();
        [[f, d * h, e * h], [d * h, a, b * h], [e * h, b * h, c]]
    }

    pub fn eval(&self, p: Point2<T>) -> T {
        let [a, b, c, d, e, f] = self.c;
        a * p.x * p.x + b * p.x * p.y + c * p.y * p.y + d * p.x + e * p.y + f
    }

    pub fn eval_h(&self, p: &HPoint<T>) -> T {
        let v = p.coords();
        let m = self.matrix();
        dot3(v, [dot3(m[0], v), dot3(m[1], v), dot3(m[2], v)])
    }

    pub fn gradient(&self, p: Point2<T>) -> Point2<T> {
        let [a, b, c, d, e, _] = self.c;
        let two = T::two();
        Point2::new(two * a * p.x + b * p.y + d, b * p.x + two * c * p.y + e)
    }
}

fn conic_row<T: Scalar>(p: &HPoint<T>) -> [T; 6] {
    let [w, x, y] = p.coords();
    let row = [x * x, x * y, y * y, x * w, y * w, w * w];
    let n = row.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
    if n > T::zero() {
        row.map(|v| v / n)
    } else {
        row
    }
}

/// Conic through five points, from the null space of the 5×6 incidence
/// system via Gaussian elimination with full pivoting.
pub fn conic_through_five<T: Scalar>(points: &[HPoint<T>; 5]) -> Result<ConicCoefficients<T>> {
    let pts: Vec<HPoint<T>> = points
        .iter()
        .map(|p| p.normalize().map_err(|_| Error::DegenerateConfiguration("zero point")))
        .collect::<Result<_>>()?;
    let mut a: Vec<[T; 6]> = pts.iter().map(conic_row).collect();
    let mut col: [usize; 6] = [0, 1, 2, 3, 4, 5];
    let tol = T::proj_tol() * T::of(0.1);

    for k in 0..5 {
        let (mut pr, mut pc, mut best) = (k, k, T::zero());
        for (r, row) in a.iter().enumerate().skip(k) {
            for (c, &v) in row.iter().enumerate().skip(k) {
                if v.abs() > best {
                    best = v.abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        if best <= tol {
            return Err(Error::DegenerateConfiguration("conic incidence system is rank deficient"));
        }
        a.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        col.swap(k, pc);
        for r in (k + 1)..5 {
            let f = a[r][k] / a[k][k];
            for c in k..6 {
                let v = a[k][c];
                a[r][c] = a[r][c] - f * v;
            }
        }
    }

    // Free variable is the last permuted column.
    let mut z = [T::zero(); 6];
    z[5] = T::one();
    for k in (0..5).rev() {
        let mut s = T::zero();
        for c in (k + 1)..6 {
            s = s + a[k][c] * z[c];
        }
        z[k] = -s / a[k][k];
    }
    let mut coeffs = [T::zero(); 6];
    for (k, &c) in col.iter().enumerate() {
        coeffs[c] = z[k];
    }
    ConicCoefficients::new(coeffs)
}

/// Polar line of `p` with respect to `c`; the tangent when `p` is on `c`.
pub fn conic_tangent_at<T: Scalar>(c: &ConicCoefficients<T>, p: &HPoint<T>) -> Result<HLine<T>> {
    let p = p.normalize()?;
    let v = p.coords();
    let m = c.matrix();
    let l = [dot3(m[0], v), dot3(m[1], v), dot3(m[2], v)];
    let residual = dot3(v, l);
    let scale = dot3(v, v);
    if residual.abs() > T::of(1e-8).max(T::proj_tol()) * scale {
        return Err(Error::PointNotOnConic { residual: residual.as_f64() });
    }
    if max_abs3(l) <= T::zero_tol() * scale {
        return Err(Error::GradientVanishes);
    }
    Ok(HLine::from_coords(l))
}
