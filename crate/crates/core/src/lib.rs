//! Interpolatory curve subdivision that preserves convexity and reproduces
//! conic sections.
//!
//! Input polylines are split into straight-line and totally convex pieces.
//! Convex pieces are refined by a harmonic construction inside the triangle
//! formed by each edge and the tangents at its ends, where the tangents come
//! from a five-point conic estimator. Straight pieces receive midpoints, and
//! junctions between pieces carry blended tangents across levels.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the precision.
//!
//! ```
//! use conicsub::{subdivide, Polyline64, RefinementConfig};
//!
//! let pts: Vec<(f64, f64)> = (0..8)
//!     .map(|k| {
//!         let a = 0.8 * k as f64;
//!         (a.cos(), a.sin())
//!     })
//!     .collect();
//! let poly = Polyline64::from_xy(&pts, conicsub::Topology::Closed);
//! let (refined, report) = subdivide(&poly, &RefinementConfig::closed().with_levels(3)).unwrap();
//! assert_eq!(refined.len(), 64);
//! assert_eq!(report.levels.len(), 3);
//! ```

pub mod config;
pub mod convex;
pub mod engine;
pub mod error;
pub mod geom;
pub mod junction;
pub mod metrics;
pub mod projective;
pub mod scalar;
pub mod segmentation;
pub mod tangent;

pub use config::{JunctionOverride, Mode, RefinementConfig, Strictness};
pub use convex::{
    insert_edge_point, refine_convex_level, select_parameter_index, standard_insert, tangent_intersections,
    ConvexLevelData, EdgeInsertion, InsertionEvent,
};
pub use engine::{
    initialize, refine_adaptive_once, refine_once, refine_step_traced, subdivide, DiagnosticsReport, EdgeRecord,
    InsertionRule, Provenance, RefinementState, StepDiagnostics,
};
pub use error::{Error, Result};
pub use geom::{BoundingBox, Point2, Polyline, Topology};
pub use junction::{blend_lines, endpoint_insert, JunctionState};
pub use metrics::{
    conic_residual, convexity_signature, curvature_comb, discrete_curvature, displacement_metrics, tangent_turning,
    ConvexitySignature, CurvatureSample,
};
pub use projective::{cross_ratio, harmonic_insert, join, meet, normalize, Frame, HLine, HPoint};
pub use scalar::Scalar;
pub use segmentation::{segment_polyline, JunctionKind, Segment, SegmentKind, SegmentStructure, VertexRange};
pub use tangent::{
    build_tangent_field, conic_tangent_at, conic_through_five, estimate_tangent, ConicCoefficients, FivePointStencil,
    TangentField,
};

pub type Point64 = Point2<f64>;
pub type HPoint64 = HPoint<f64>;
pub type HLine64 = HLine<f64>;
pub type Polyline64 = Polyline<f64>;
pub type RefinementState64 = RefinementState<f64>;
pub type ConicCoefficients64 = ConicCoefficients<f64>;

pub type Point32 = Point2<f32>;
pub type HPoint32 = HPoint<f32>;
pub type HLine32 = HLine<f32>;
pub type Polyline32 = Polyline<f32>;
pub type RefinementState32 = RefinementState<f32>;
pub type ConicCoefficients32 = ConicCoefficients<f32>;
