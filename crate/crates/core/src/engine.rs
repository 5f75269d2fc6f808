//! Level-by-level refinement of a segmented polyline.
//!
//! World coordinates of existing vertices are copied bit for bit. The
//! projective constructions run in a local frame fitted once to the level-0
//! input, and only the inserted points are mapped back.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{Mode, RefinementConfig, Strictness};
use crate::convex::{standard_insert, ConvexLevelData, EdgeInsertion, InsertionEvent};
use crate::error::{Error, Result};
use crate::geom::{Point2, Polyline, Topology};
use crate::junction::{
    convex_junction_from_sides, endpoint_insert, inflection_tangent_from_sides, inflection_tangent_update,
    JunctionState,
};
use crate::metrics::{convexity_signature, displacement_metrics, edge_length_range, tangent_turning};
use crate::projective::{join, meet, Frame, HLine, HPoint};
use crate::scalar::{sign_with_tol, Scalar};
use crate::segmentation::{segment_polyline, JunctionKind, Segment, SegmentKind, SegmentStructure, VertexRange};
use crate::tangent::{estimate_tangent, stencil_indices, FivePointStencil, TangentField};

/// Rule that produced a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsertionRule {
    /// Vertex of the segmented level-0 polyline.
    Original,
    /// Exact midpoint on a straight or undersampled segment.
    Midpoint,
    /// Harmonic construction inside the tangent triangle.
    Harmonic,
    /// Affine combination of tangent apex and midpoint next to a junction.
    Endpoint,
    /// Midpoint substituted for a failed construction.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub level: usize,
    pub rule: InsertionRule,
}

/// Diagnostics of the step from level `k` to level `k + 1`. Counts and
/// edge lengths describe level `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub k: usize,
    pub n_points: usize,
    pub d_k: f64,
    pub max_tangent_turn: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    pub inflection_count: usize,
    pub fallbacks: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub levels: Vec<StepDiagnostics>,
}

/// What happened on one edge during a step.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord<T> {
    /// Edge index at the level being refined.
    pub edge: usize,
    pub segment: usize,
    pub rule: InsertionRule,
    /// Local-frame construction for harmonic insertions.
    pub event: Option<InsertionEvent<T>>,
    /// Cause of a fallback.
    pub cause: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementState<T> {
    pub level: usize,
    pub poly: Polyline<T>,
    pub structure: SegmentStructure,
    /// Tangent per vertex of the current level, in local coordinates.
    pub tangents: TangentField<T>,
    /// Keyed by the junction vertex index in the segmented level-0 polyline.
    pub junction_states: BTreeMap<usize, JunctionState<T>>,
    pub provenance: Vec<Provenance>,
    pub frame: Frame<T>,
    /// Bounding-box diagonal of the level-0 input.
    pub base_diagonal: T,
    pub strictness: Strictness,
    pub history: Vec<StepDiagnostics>,
}

impl<T: Scalar> RefinementState<T> {
    pub fn report(&self) -> DiagnosticsReport {
        DiagnosticsReport { levels: self.history.clone() }
    }

    /// Current vertices in the local frame.
    pub fn local_points(&self) -> Vec<HPoint<T>> {
        self.poly.points.iter().map(|&p| self.frame.to_local(p)).collect()
    }

    /// Vertices of segment `s` in traversal order.
    pub fn segment_vertices(&self, s: usize) -> Vec<usize> {
        segment_vertices(&self.structure, &self.structure.segments[s])
    }
}

fn segment_vertices(st: &SegmentStructure, seg: &Segment) -> Vec<usize> {
    if st.is_loop() {
        (0..st.vertex_count).collect()
    } else {
        seg.range.indices(st.vertex_count).collect()
    }
}

fn relabel(e: Error, edge: usize) -> Error {
    match e {
        Error::CoincidentTangents { .. } => Error::CoincidentTangents { edge },
        Error::NoCandidates { .. } => Error::NoCandidates { edge },
        Error::ParameterOutsideRegion { parameter, .. } => Error::ParameterOutsideRegion { edge, parameter },
        Error::OutsideTangentTriangle { .. } => Error::OutsideTangentTriangle { edge },
        other => other,
    }
}

/// Tangent of a segment at its first (`at_end == false`) or last vertex:
/// the one-sided five-point estimate on convex segments, the adjacent edge
/// line otherwise.
fn side_tangent<T: Scalar>(pts: &[HPoint<T>], seg: &Segment, verts: &[usize], at_end: bool) -> Result<HLine<T>> {
    let m = verts.len();
    if seg.is_convex() && m >= 5 {
        let i = if at_end { m - 1 } else { 0 };
        let idx = stencil_indices(m, i, Topology::Open)?;
        estimate_tangent(&FivePointStencil { q: idx.map(|k| pts[verts[k]]) })
    } else if at_end {
        join(&pts[verts[m - 2]], &pts[verts[m - 1]])
    } else {
        join(&pts[verts[0]], &pts[verts[1]])
    }
}

fn chord_line<T: Scalar>(pts: &[HPoint<T>], verts: &[usize]) -> Result<HLine<T>> {
    join(&pts[verts[0]], &pts[verts[verts.len() - 1]])
}

/// Updates every junction state for the level of `pts` and returns the
/// junction tangents by current vertex.
fn junction_tangents<T: Scalar>(
    pts: &[HPoint<T>],
    structure: &SegmentStructure,
    states: &mut BTreeMap<usize, JunctionState<T>>,
) -> Result<BTreeMap<usize, HLine<T>>> {
    let n = pts.len();
    let mut out = BTreeMap::new();
    for st in states.values_mut() {
        let v = st.vertex;
        let (Some(left), Some(right)) = structure.neighbors_of(v) else {
            return Err(Error::DegenerateConfiguration("junction without adjacent segments"));
        };
        let (ls, rs) = (&structure.segments[left], &structure.segments[right]);
        let (lv, rv) = (segment_vertices(structure, ls), segment_vertices(structure, rs));
        let t = match st.kind {
            JunctionKind::StraightLineJunction => {
                let line =
                    if ls.kind == SegmentKind::StraightLine { chord_line(pts, &lv)? } else { chord_line(pts, &rv)? };
                st.prev_tangent = Some(line);
                line
            }
            JunctionKind::InflectionPoint if st.prev_tangent.is_some() => {
                let (a, b) = (&pts[(v + n - 1) % n], &pts[(v + 1) % n]);
                inflection_tangent_update(st, &join(a, &pts[v])?, &join(&pts[v], b)?, &pts[v])?
            }
            JunctionKind::InflectionPoint => {
                let l = side_tangent(pts, ls, &lv, true)?;
                let r = side_tangent(pts, rs, &rv, false)?;
                inflection_tangent_from_sides(&l, &r, st, &pts[v])?
            }
            JunctionKind::ConvexJunction => {
                let l = side_tangent(pts, ls, &lv, true)?;
                let r = side_tangent(pts, rs, &rv, false)?;
                convex_junction_from_sides(&l, &r, st, &pts[v], &pts[(v + n - 1) % n], &pts[(v + 1) % n])?
            }
            JunctionKind::SequenceEnd => continue,
        };
        out.insert(v, t);
    }
    Ok(out)
}

/// Tangent field of one level; junction tangents take precedence at
/// segment ends.
fn level_tangents<T: Scalar>(
    pts: &[HPoint<T>],
    structure: &SegmentStructure,
    states: &mut BTreeMap<usize, JunctionState<T>>,
    strictness: Strictness,
) -> Result<TangentField<T>> {
    let mut lines: Vec<Option<HLine<T>>> = vec![None; pts.len()];
    for (v, t) in junction_tangents(pts, structure, states)? {
        lines[v] = Some(t);
    }
    for seg in &structure.segments {
        let verts = segment_vertices(structure, seg);
        let m = verts.len();
        match seg.kind {
            SegmentKind::StraightLine => {
                let chord = chord_line(pts, &verts)?;
                for &v in &verts {
                    lines[v].get_or_insert(chord);
                }
            }
            SegmentKind::TotallyConvex if seg.is_convex() => {
                let topology = if structure.is_loop() { Topology::Closed } else { Topology::Open };
                let local: Vec<HPoint<T>> = verts.iter().map(|&v| pts[v]).collect();
                for (k, &v) in verts.iter().enumerate() {
                    if lines[v].is_some() {
                        continue;
                    }
                    let est = FivePointStencil::around(&local, k, topology).and_then(|s| estimate_tangent(&s));
                    let line = match est {
                        Ok(l) => l,
                        Err(e) if strictness == Strictness::Lenient => {
                            log::warn!("tangent at vertex {v}: {e}; using the neighbor chord");
                            fallback_chord(&local, k, topology)?
                        }
                        Err(e) => return Err(e),
                    };
                    lines[v] = Some(line);
                }
            }
            SegmentKind::TotallyConvex => {
                for k in 0..m {
                    if lines[verts[k]].is_some() {
                        continue;
                    }
                    let (a, b) = (k.saturating_sub(1), (k + 1).min(m - 1));
                    lines[verts[k]] = Some(join(&pts[verts[a]], &pts[verts[b]])?);
                }
            }
        }
    }
    let lines = lines
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::DegenerateConfiguration("vertex without tangent"))?;
    Ok(TangentField { lines })
}

fn fallback_chord<T: Scalar>(local: &[HPoint<T>], k: usize, topology: Topology) -> Result<HLine<T>> {
    let m = local.len();
    let (a, b) = match topology {
        Topology::Closed => ((k + m - 1) % m, (k + 1) % m),
        Topology::Open => (k.saturating_sub(1), (k + 1).min(m - 1)),
    };
    join(&local[a], &local[b])
}

/// Segments `poly` and computes the level-0 tangents. The polyline's own
/// topology governs; `cfg.topology` is not consulted.
pub fn initialize<T: Scalar>(poly: &Polyline<T>, cfg: &RefinementConfig) -> Result<RefinementState<T>> {
    cfg.validate()?;
    let (aug, structure) = segment_polyline(poly, cfg)?;
    let frame = Frame::fit(&aug.points);
    let pts: Vec<HPoint<T>> = aug.points.iter().map(|&p| frame.to_local(p)).collect();
    let n = pts.len();
    let mut states = BTreeMap::new();
    for (&v, &kind) in &structure.junctions {
        if kind == JunctionKind::SequenceEnd {
            continue;
        }
        let (lambda, rho) = cfg.junction_parameters(v);
        let mut st = JunctionState::new(kind, v, T::of(lambda), T::of(rho));
        if kind == JunctionKind::InflectionPoint {
            st.e = Some(join(&pts[(v + n - 1) % n], &pts[(v + 1) % n])?);
        }
        states.insert(v, st);
    }
    let tangents = level_tangents(&pts, &structure, &mut states, cfg.strictness)?;
    Ok(RefinementState {
        level: 0,
        base_diagonal: aug.diagonal(),
        provenance: vec![Provenance { level: 0, rule: InsertionRule::Original }; n],
        poly: aug,
        structure,
        tangents,
        junction_states: states,
        frame,
        strictness: cfg.strictness,
        history: Vec::new(),
    })
}

/// Edges longer than the adaptive threshold.
pub fn adaptive_mask<T: Scalar>(state: &RefinementState<T>, cfg: &RefinementConfig) -> Vec<bool> {
    let limit = T::of(cfg.edge_threshold) * state.base_diagonal;
    state.poly.edge_lengths().into_iter().map(|l| l > limit).collect()
}

struct Inserted<T> {
    point: Point2<T>,
    rule: InsertionRule,
}

/// Outer side of edge `k` of a convex segment: the apex must lie strictly
/// opposite to the remaining vertices.
fn apex_outside<T: Scalar>(d: &ConvexLevelData<T>, k: usize, t: &HPoint<T>) -> bool {
    let m = d.len();
    let (a, b) = (d.vertices[k], d.vertices[(k + 1) % m]);
    let inner = if k + 2 < m { d.vertices[k + 2] } else { d.vertices[(k + m - 1) % m] };
    let (Ok(edge), Ok(t)) = (join(&a, &b), t.normalize()) else {
        return false;
    };
    let Some(edge) = edge.oriented_normalized() else {
        return false;
    };
    let Ok(inner) = inner.normalize() else {
        return false;
    };
    let tol = T::proj_tol();
    sign_with_tol(edge.eval(&t), tol) * sign_with_tol(edge.eval(&inner), tol) < 0
}

/// One refinement step restricted to the edges flagged in `mask`, with a
/// record per refined edge.
pub fn step_traced<T: Scalar>(
    state: &RefinementState<T>,
    mask: &[bool],
) -> Result<(RefinementState<T>, Vec<EdgeRecord<T>>)> {
    let n = state.poly.len();
    let edge_count = state.poly.edge_count();
    if mask.len() != edge_count {
        return Err(Error::InvalidConfig(format!("insertion mask has {} entries for {edge_count} edges", mask.len())));
    }
    let strictness = state.strictness;
    let pts = state.local_points();
    let world = &state.poly.points;
    let structure = &state.structure;
    let world_mid = |e: usize| world[e].midpoint(world[(e + 1) % n]);

    let mut inserted: Vec<Option<Inserted<T>>> = (0..edge_count).map(|_| None).collect();
    let mut records = Vec::new();
    let mut fallbacks = 0usize;

    for (s, seg) in structure.segments.iter().enumerate() {
        let verts = segment_vertices(structure, seg);
        let edges = if structure.is_loop() { n } else { seg.range.edges };
        if !seg.is_convex() {
            for k in 0..edges {
                let e = verts[k];
                if mask[e] {
                    inserted[e] = Some(Inserted { point: world_mid(e), rule: InsertionRule::Midpoint });
                    records.push(EdgeRecord {
                        edge: e,
                        segment: s,
                        rule: InsertionRule::Midpoint,
                        event: None,
                        cause: None,
                    });
                }
            }
            continue;
        }
        let topology = if structure.is_loop() { Topology::Closed } else { Topology::Open };
        let m = verts.len();
        let d = ConvexLevelData::new(
            verts.iter().map(|&v| pts[v]).collect(),
            verts.iter().map(|&v| state.tangents.lines[v]).collect(),
            topology,
        )?;
        let apexes: Vec<Result<HPoint<T>>> =
            (0..edges).map(|k| meet(&d.tangents[k], &d.tangents[(k + 1) % m]).and_then(|t| t.normalize())).collect();
        let ts: Vec<HPoint<T>> =
            apexes.iter().map(|t| t.clone().unwrap_or(HPoint::at_infinity(T::one(), T::zero()))).collect();
        let endpoint_rho = |v: usize| -> Option<T> {
            if structure.is_loop() {
                return None;
            }
            match structure.junction(v) {
                Some(JunctionKind::InflectionPoint | JunctionKind::ConvexJunction) => {
                    state.junction_states.values().find(|st| st.vertex == v).map(|st| st.rho)
                }
                _ => None,
            }
        };
        let first_rho = endpoint_rho(verts[0]);
        let last_rho = endpoint_rho(verts[m - 1]);

        for k in 0..edges {
            let e = verts[k];
            if !mask[e] {
                continue;
            }
            let rho = match (k, first_rho, last_rho) {
                (0, Some(r), _) => Some(r),
                (k, _, Some(r)) if k + 1 == edges => Some(r),
                _ => None,
            };
            let mut fallback = |cause: Error, inserted: &mut Vec<Option<Inserted<T>>>| {
                log::debug!("edge {e}: {cause}; inserting the midpoint");
                fallbacks += 1;
                inserted[e] = Some(Inserted { point: world_mid(e), rule: InsertionRule::Fallback });
                records.push(EdgeRecord {
                    edge: e,
                    segment: s,
                    rule: InsertionRule::Fallback,
                    event: None,
                    cause: Some(cause),
                });
            };
            if let Some(rho) = rho {
                let t = match &apexes[k] {
                    Ok(t) if t.is_at_infinity() => Err(Error::TangentApexAtInfinity),
                    Ok(t) if !apex_outside(&d, k, t) => Err(Error::OutsideTangentTriangle { edge: e }),
                    Ok(t) => Ok(*t),
                    Err(_) => Err(Error::CoincidentTangents { edge: e }),
                };
                let mid = pts[e]
                    .to_affine()
                    .zip(pts[(e + 1) % n].to_affine())
                    .map(|(a, b)| HPoint::from_point(a.midpoint(b)));
                let u = t.and_then(|t| endpoint_insert(&t, &mid.ok_or(Error::ZeroVector)?, rho));
                match u.map(|u| state.frame.to_world(&u)) {
                    Ok(Some(p)) => {
                        inserted[e] = Some(Inserted { point: p, rule: InsertionRule::Endpoint });
                        records.push(EdgeRecord {
                            edge: e,
                            segment: s,
                            rule: InsertionRule::Endpoint,
                            event: None,
                            cause: None,
                        });
                    }
                    Ok(None) => fallback(Error::TangentApexAtInfinity, &mut inserted),
                    Err(cause) => fallback(cause, &mut inserted),
                }
                continue;
            }
            if apexes[k].is_err() {
                let cause = Error::CoincidentTangents { edge: e };
                if strictness == Strictness::Strict {
                    return Err(cause);
                }
                log::warn!("{cause}; inserting the midpoint");
                fallback(cause, &mut inserted);
                continue;
            }
            match standard_insert(k, &d, &ts, strictness).map_err(|err| relabel(err, e))? {
                EdgeInsertion::Harmonic(mut ev) => match state.frame.to_world(&ev.u) {
                    Some(p) => {
                        ev.edge = e;
                        inserted[e] = Some(Inserted { point: p, rule: InsertionRule::Harmonic });
                        records.push(EdgeRecord {
                            edge: e,
                            segment: s,
                            rule: InsertionRule::Harmonic,
                            event: Some(ev),
                            cause: None,
                        });
                    }
                    None => fallback(Error::DegenerateFrame, &mut inserted),
                },
                EdgeInsertion::Midpoint(cause) => fallback(relabel(cause, e), &mut inserted),
            }
        }
    }

    // Interleave old and new vertices.
    let mut points = Vec::with_capacity(n + edge_count);
    let mut provenance = Vec::with_capacity(n + edge_count);
    let mut is_new = Vec::with_capacity(n + edge_count);
    let mut map = Vec::with_capacity(n);
    for i in 0..n {
        map.push(points.len());
        points.push(world[i]);
        provenance.push(state.provenance[i]);
        is_new.push(false);
        if let Some(Some(ins)) = inserted.get_mut(i).map(Option::take) {
            points.push(ins.point);
            provenance.push(Provenance { level: state.level + 1, rule: ins.rule });
            is_new.push(true);
        }
    }
    let m = points.len();
    let poly = Polyline::new(points, state.poly.topology);

    let segments = structure
        .segments
        .iter()
        .map(|seg| {
            let start = map[seg.range.start];
            let edges = if seg.range.edges >= n { m } else { (map[seg.range.end(n)] + m - start) % m };
            Segment { range: VertexRange::new(start, edges), ..*seg }
        })
        .collect();
    let junctions = structure.junctions.iter().map(|(&v, &k)| (map[v], k)).collect();
    let next_structure = SegmentStructure { segments, junctions, topology: structure.topology, vertex_count: m };
    let mut states = state.junction_states.clone();
    for st in states.values_mut() {
        st.vertex = map[st.vertex];
    }
    let next_pts: Vec<HPoint<T>> = poly.points.iter().map(|&p| state.frame.to_local(p)).collect();
    let tangents = level_tangents(&next_pts, &next_structure, &mut states, strictness)?;

    let d_k = displacement_metrics(&state.poly, &poly, &is_new)?;
    let turn = tangent_turning(&state.tangents.lines, &tangents.lines, &map);
    let (min_edge, max_edge) = edge_length_range(&poly);
    let diag = StepDiagnostics {
        k: state.level,
        n_points: m,
        d_k: d_k.as_f64(),
        max_tangent_turn: turn.as_f64(),
        min_edge: min_edge.as_f64(),
        max_edge: max_edge.as_f64(),
        inflection_count: convexity_signature(&poly).inflections,
        fallbacks,
    };
    let mut history = state.history.clone();
    history.push(diag);
    let next = RefinementState {
        level: state.level + 1,
        poly,
        structure: next_structure,
        tangents,
        junction_states: states,
        provenance,
        frame: state.frame,
        base_diagonal: state.base_diagonal,
        strictness,
        history,
    };
    Ok((next, records))
}

/// One level inserting on every edge.
pub fn refine_once<T: Scalar>(state: &RefinementState<T>) -> Result<RefinementState<T>> {
    let mask = vec![true; state.poly.edge_count()];
    step_traced(state, &mask).map(|(s, _)| s)
}

/// One level inserting only on edges longer than
/// `cfg.edge_threshold` times the level-0 bounding-box diagonal.
pub fn refine_adaptive_once<T: Scalar>(
    state: &RefinementState<T>,
    cfg: &RefinementConfig,
) -> Result<RefinementState<T>> {
    let mask = adaptive_mask(state, cfg);
    step_traced(state, &mask).map(|(s, _)| s)
}

/// One level in the mode selected by `cfg`, with edge records.
pub fn refine_step_traced<T: Scalar>(
    state: &RefinementState<T>,
    cfg: &RefinementConfig,
) -> Result<(RefinementState<T>, Vec<EdgeRecord<T>>)> {
    let mask = match cfg.mode {
        Mode::Basic => vec![true; state.poly.edge_count()],
        Mode::Adaptive => adaptive_mask(state, cfg),
    };
    step_traced(state, &mask)
}

/// Segments `poly` and refines it `cfg.levels` times, returning the final
/// state. Requires at least one level.
pub fn run<T: Scalar>(poly: &Polyline<T>, cfg: &RefinementConfig) -> Result<RefinementState<T>> {
    let mut state = initialize(poly, cfg)?;
    for _ in 0..cfg.levels {
        state = refine_step_traced(&state, cfg)?.0;
    }
    Ok(state)
}

/// Refined polyline and per-level diagnostics. Zero levels return the input
/// unchanged without segmenting it.
pub fn subdivide<T: Scalar>(poly: &Polyline<T>, cfg: &RefinementConfig) -> Result<(Polyline<T>, DiagnosticsReport)> {
    cfg.validate()?;
    if cfg.levels == 0 {
        return Ok((poly.clone(), DiagnosticsReport::default()));
    }
    let state = run(poly, cfg)?;
    let report = state.report();
    Ok((state.poly, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{is_strictly_convex, refine_convex_level};
    use crate::metrics::conic_residual;
    use crate::tangent::ConicCoefficients;
    use std::f64::consts::PI;

    fn circle_at(angles: &[f64]) -> Polyline<f64> {
        Polyline::closed(angles.iter().map(|a| Point2::new(a.cos(), a.sin())).collect())
    }

    fn unit_circle() -> ConicCoefficients<f64> {
        ConicCoefficients::new([1.0, 0.0, 1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn zero_levels_return_input() {
        let p = circle_at(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let (q, r) = subdivide(&p, &RefinementConfig::closed().with_levels(0)).unwrap();
        assert_eq!(q, p);
        assert!(r.levels.is_empty());
    }

    #[test]
    fn four_convex_points_fail_in_strict_mode() {
        let p = Polyline::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], Topology::Closed);
        assert!(matches!(subdivide(&p, &RefinementConfig::closed()), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn nonuniform_circle_samples_stay_on_circle() {
        let angles = [0.0, 0.5, 1.3, 2.0, 2.4, 3.5, 4.4, 5.5];
        let p = circle_at(&angles);
        let (q, report) = subdivide(&p, &RefinementConfig::closed().with_levels(5)).unwrap();
        assert_eq!(q.len(), 256);
        assert!(conic_residual(&q.points, &unit_circle()).unwrap() <= 1e-8);
        assert_eq!(report.levels.len(), 5);
        assert!(report.levels.iter().all(|l| l.inflection_count == 0 && l.fallbacks == 0));
    }

    #[test]
    fn convex_loop_matches_single_level_routine() {
        let angles: [f64; 8] = [0.1, 0.9, 1.5, 2.6, 3.3, 4.0, 5.1, 5.8];
        let p = Polyline::closed(angles.iter().map(|a| Point2::new(2.0 * a.cos(), a.sin() + 0.3 * a.cos())).collect());
        let state = initialize(&p, &RefinementConfig::closed()).unwrap();
        let next = refine_once(&state).unwrap();
        // The engine works in a centered, scaled frame; compare in that frame.
        let local: Vec<Point2<f64>> = p.points.iter().map(|&q| state.frame.to_local_affine(q)).collect();
        let d = ConvexLevelData::from_affine(&local, Topology::Closed).unwrap();
        let direct = refine_convex_level(&d, Strictness::Strict).unwrap().affine_points();
        for (a, b) in next.poly.points.iter().zip(direct) {
            let b = state.frame.to_world(&HPoint::from_point(b)).unwrap();
            assert!(a.distance(b) < 1e-12);
        }
    }

    #[test]
    fn levels_interpolate_bit_exactly() {
        let angles: [f64; 9] = [0.0, 0.7, 1.1, 2.2, 3.0, 3.9, 4.6, 5.4, 5.9];
        let p = Polyline::closed(angles.iter().map(|a| Point2::new(3.0 * a.cos() + 10.0, a.sin() - 4.0)).collect());
        let cfg = RefinementConfig::closed().with_levels(4);
        let mut state = initialize(&p, &cfg).unwrap();
        for _ in 0..4 {
            let next = refine_once(&state).unwrap();
            for (i, &v) in state.poly.points.iter().enumerate() {
                assert_eq!(next.poly.points[2 * i], v);
            }
            assert!(is_strictly_convex(&next.poly.points, Topology::Closed));
            state = next;
        }
        assert_eq!(state.provenance.iter().filter(|p| p.level == 0).count(), 9);
    }

    fn d_shape() -> Polyline<f64> {
        let mut pts: Vec<Point2<f64>> = (0..=8)
            .map(|k| {
                let a = PI * k as f64 / 8.0;
                Point2::new(a.cos(), a.sin())
            })
            .collect();
        pts.push(Point2::new(0.0, 0.0));
        Polyline::closed(pts)
    }

    #[test]
    fn d_shape_straight_part_is_exact_and_arc_interior_stays_on_circle() {
        let cfg = RefinementConfig::closed();
        let mut state = initialize(&d_shape(), &cfg).unwrap();
        for _ in 0..4 {
            state = refine_once(&state).unwrap();
        }
        let straight = state.structure.segments.iter().position(|s| s.kind == SegmentKind::StraightLine).unwrap();
        for v in state.segment_vertices(straight) {
            assert!(state.poly.points[v].y.abs() <= 1e-15);
        }
        let arc = state.structure.segments.iter().position(|s| s.kind == SegmentKind::TotallyConvex).unwrap();
        let arc_pts: Vec<Point2<f64>> = state.segment_vertices(arc).into_iter().map(|v| state.poly.points[v]).collect();
        // The tangent fixed to the straight line at each corner pulls the
        // adjacent arc intervals off the circle; the effect fades by about
        // two orders of magnitude per level-0 interval.
        assert_eq!(arc_pts.len(), 129);
        let interval = |i: usize| conic_residual(&arc_pts[16 * i..=16 * i + 16], &unit_circle()).unwrap();
        assert!(interval(0) > 1e-3 && interval(7) > 1e-3);
        assert!(interval(1) < interval(0) && interval(2) < interval(1));
        assert!(interval(3) <= 1e-9 && interval(4) <= 1e-9);
        for k in 0..=8 {
            assert!((arc_pts[16 * k].norm() - 1.0).abs() <= 1e-15);
        }
        assert!(is_strictly_convex(&arc_pts, Topology::Open));
    }

    fn s_curve(n: usize) -> Polyline<f64> {
        Polyline::open(
            (0..n)
                .map(|k| {
                    let x = -3.0 + 6.0 * k as f64 / (n - 1) as f64 + 0.013;
                    Point2::new(x, (0.9 * x).sin())
                })
                .collect(),
        )
    }

    #[test]
    fn s_shape_uses_endpoint_rule_at_inflection() {
        let cfg = RefinementConfig::open();
        let state = initialize(&s_curve(14), &cfg).unwrap();
        let (&v, _) = state.structure.junctions.iter().find(|(_, &k)| k == JunctionKind::InflectionPoint).unwrap();
        let (next, records) = refine_step_traced(&state, &cfg).unwrap();
        let rule_of = |e: usize| records.iter().find(|r| r.edge == e).unwrap().rule;
        assert_eq!(rule_of(v - 1), InsertionRule::Endpoint);
        assert_eq!(rule_of(v), InsertionRule::Endpoint);
        assert!(records.iter().filter(|r| r.edge != v - 1 && r.edge != v).all(|r| r.rule == InsertionRule::Harmonic));
        assert_eq!(next.history[0].inflection_count, 1);
        assert_eq!(next.structure.segments.len(), 2);
    }

    #[test]
    fn adaptive_threshold_dichotomy() {
        let angles = [0.0, 0.8, 1.6, 2.4, 3.2, 4.0, 4.8, 5.6];
        let p = circle_at(&angles);
        let state = initialize(&p, &RefinementConfig::closed()).unwrap();
        let all_short = RefinementConfig { edge_threshold: 10.0, mode: Mode::Adaptive, ..RefinementConfig::closed() };
        let same = refine_adaptive_once(&state, &all_short).unwrap();
        assert_eq!(same.poly, state.poly);

        let mut pts: Vec<Point2<f64>> = (0..12)
            .map(|k| {
                let a = 0.08 * k as f64;
                Point2::new(a.cos(), a.sin())
            })
            .collect();
        pts.push(Point2::new(-1.0, 0.0));
        let p = Polyline::closed(pts);
        let cfg = RefinementConfig { edge_threshold: 0.5, mode: Mode::Adaptive, ..RefinementConfig::closed() };
        let state = initialize(&p, &cfg).unwrap();
        let long: usize = adaptive_mask(&state, &cfg).iter().filter(|&&b| b).count();
        let next = refine_adaptive_once(&state, &cfg).unwrap();
        assert_eq!(next.poly.len(), p.len() + long);
        assert!(long >= 1 && long < p.len());
    }

    #[test]
    fn report_serializes() {
        let p = circle_at(&[0.0, 0.9, 1.7, 2.9, 3.6, 4.7, 5.5]);
        let (_, report) = subdivide(&p, &RefinementConfig::closed().with_levels(2)).unwrap();
        let r = &report.levels[1];
        assert_eq!((r.k, r.n_points), (1, 28));
        assert!(r.d_k > 0.0 && r.d_k < report.levels[0].d_k);
    }

    #[test]
    fn single_precision_pipeline() {
        let p: Polyline<f32> = Polyline::closed(
            (0..9)
                .map(|k| {
                    let a = 0.7 * k as f32;
                    Point2::new(a.cos() * 2.0, a.sin())
                })
                .collect(),
        );
        let (q, _) = subdivide(&p, &RefinementConfig::closed().with_levels(3)).unwrap();
        assert_eq!(q.len(), 72);
        assert!(is_strictly_convex(&q.points, Topology::Closed));
    }
}
