//! Tangents and inserted points at the junctions between segments.

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::projective::{join, HLine, HPoint};
use crate::scalar::{sign_with_tol, Scalar};
use crate::segmentation::JunctionKind;
use crate::tangent::{estimate_tangent, FivePointStencil};

/// Per-junction data carried from level to level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionState<T> {
    pub kind: JunctionKind,
    /// Index of the junction vertex at the current level.
    pub vertex: usize,
    /// Index of the junction vertex in the segmented level-0 polyline.
    pub id: usize,
    /// Line of the original inflection edge, fixed at level 0.
    pub e: Option<HLine<T>>,
    /// Junction tangent of the most recent level.
    pub prev_tangent: Option<HLine<T>>,
    pub lambda: T,
    pub rho: T,
}

impl<T: Scalar> JunctionState<T> {
    pub fn new(kind: JunctionKind, vertex: usize, lambda: T, rho: T) -> Self {
        Self { kind, vertex, id: vertex, e: None, prev_tangent: None, lambda, rho }
    }

    pub fn mu(&self) -> T {
        T::one() - self.lambda
    }

    pub fn sigma(&self) -> T {
        T::one() - self.rho
    }
}

fn oriented_unit<T: Scalar>(l: &HLine<T>, reference: Point2<T>) -> Result<HLine<T>> {
    let u = l.oriented_normalized().ok_or(Error::ZeroVector)?;
    if u.normal().dot(reference) < T::zero() {
        Ok(HLine::new(-u.l0, -u.l1, -u.l2))
    } else {
        Ok(u)
    }
}

/// `λ·a + (1−λ)·b` on unit-normal representatives whose normals point to
/// the same side as the normal of `a`.
pub fn blend_lines<T: Scalar>(a: &HLine<T>, b: &HLine<T>, lambda: T, anchor: &HPoint<T>) -> Result<HLine<T>> {
    blend_lines_oriented(a, b, lambda, anchor, a)
}

/// [`blend_lines`] with an explicit orientation reference.
pub fn blend_lines_oriented<T: Scalar>(
    a: &HLine<T>,
    b: &HLine<T>,
    lambda: T,
    anchor: &HPoint<T>,
    reference: &HLine<T>,
) -> Result<HLine<T>> {
    let tol = T::proj_tol();
    if !a.is_incident(anchor, tol) || !b.is_incident(anchor, tol) {
        return Err(Error::LineMissesAnchor);
    }
    let r = reference.normal();
    let (ua, ub) = (oriented_unit(a, r)?, oriented_unit(b, r)?);
    let mu = T::one() - lambda;
    let blended = HLine::new(lambda * ua.l0 + mu * ub.l0, lambda * ua.l1 + mu * ub.l1, lambda * ua.l2 + mu * ub.l2);
    if blended.normal().norm() <= tol {
        return Err(Error::OppositeLines);
    }
    blended.oriented_normalized().ok_or(Error::OppositeLines)
}

/// Blend of the one-sided tangent estimates at a new inflection vertex.
/// `left5` and `right5` are centered on the junction vertex.
pub fn inflection_tangent_initial<T: Scalar>(
    left5: &FivePointStencil<T>,
    right5: &FivePointStencil<T>,
    st: &mut JunctionState<T>,
) -> Result<HLine<T>> {
    let l = estimate_tangent(left5)?;
    let r = estimate_tangent(right5)?;
    inflection_tangent_from_sides(&l, &r, st, &left5.center())
}

/// [`inflection_tangent_initial`] from given one-sided tangents.
pub fn inflection_tangent_from_sides<T: Scalar>(
    left: &HLine<T>,
    right: &HLine<T>,
    st: &mut JunctionState<T>,
    anchor: &HPoint<T>,
) -> Result<HLine<T>> {
    let t = blend_lines(left, right, st.lambda, anchor)?;
    st.prev_tangent = Some(t);
    Ok(t)
}

/// Next-level inflection tangent: the incident edge making the larger angle
/// with the original inflection edge is blended into the previous tangent.
/// Ties go to the left edge.
pub fn inflection_tangent_update<T: Scalar>(
    st: &mut JunctionState<T>,
    left_edge: &HLine<T>,
    right_edge: &HLine<T>,
    anchor: &HPoint<T>,
) -> Result<HLine<T>> {
    let prev = st.prev_tangent.ok_or(Error::DegenerateConfiguration("inflection tangent was never initialized"))?;
    let e = st.e.ok_or(Error::DegenerateConfiguration("inflection edge line missing"))?;
    let g = if right_edge.angle_to(&e) > left_edge.angle_to(&e) { right_edge } else { left_edge };
    let t = blend_lines_oriented(&prev, g, st.lambda, anchor, &prev)?;
    st.prev_tangent = Some(t);
    Ok(t)
}

/// Convex-junction tangent from one-sided estimates. A one-sided estimate
/// that separates `p_prev` from `p_next` is replaced by the adjacent edge
/// line on the other side.
pub fn convex_junction_tangent<T: Scalar>(
    left5: &FivePointStencil<T>,
    right5: &FivePointStencil<T>,
    st: &mut JunctionState<T>,
    p_prev: &HPoint<T>,
    p_next: &HPoint<T>,
) -> Result<HLine<T>> {
    let l = estimate_tangent(left5)?;
    let r = estimate_tangent(right5)?;
    convex_junction_from_sides(&l, &r, st, &left5.center(), p_prev, p_next)
}

/// [`convex_junction_tangent`] from given one-sided tangents at vertex `v`.
pub fn convex_junction_from_sides<T: Scalar>(
    left: &HLine<T>,
    right: &HLine<T>,
    st: &mut JunctionState<T>,
    v: &HPoint<T>,
    p_prev: &HPoint<T>,
    p_next: &HPoint<T>,
) -> Result<HLine<T>> {
    let l = if separates(left, p_prev, p_next) { join(v, p_next)? } else { *left };
    let r = if separates(right, p_prev, p_next) { join(p_prev, v)? } else { *right };
    let t = blend_lines(&l, &r, st.lambda, v)?;
    st.prev_tangent = Some(t);
    Ok(t)
}

/// True when `a` and `b` lie strictly on opposite sides of `l`.
pub fn separates<T: Scalar>(l: &HLine<T>, a: &HPoint<T>, b: &HPoint<T>) -> bool {
    let Some(u) = l.oriented_normalized() else {
        return false;
    };
    let (Ok(a), Ok(b)) = (a.normalize(), b.normalize()) else {
        return false;
    };
    let tol = T::proj_tol();
    sign_with_tol(u.eval(&a), tol) * sign_with_tol(u.eval(&b), tol) < 0
}

/// `ρ·t + (1−ρ)·m` for a junction-adjacent edge with tangent apex `t` and
/// edge midpoint `m`.
pub fn endpoint_insert<T: Scalar>(t: &HPoint<T>, m: &HPoint<T>, rho: T) -> Result<HPoint<T>> {
    let t = t.to_affine().ok_or(Error::TangentApexAtInfinity)?;
    let m = m.to_affine().ok_or(Error::ZeroVector)?;
    Ok(HPoint::from_point(t * rho + m * (T::one() - rho)))
}
