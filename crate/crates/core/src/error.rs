use thiserror::Error;

/// Errors raised by the subdivision kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("homogeneous vector is zero")]
    ZeroVector,
    #[error("points are projectively coincident")]
    CoincidentPoints,
    #[error("lines are projectively coincident")]
    CoincidentLines,
    #[error("points are not collinear")]
    NotCollinear,
    #[error("degenerate projective frame")]
    DegenerateFrame,
    #[error("degenerate five-point stencil")]
    DegenerateStencil,
    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),
    #[error("point does not lie on the conic (residual {residual:e})")]
    PointNotOnConic { residual: f64 },
    #[error("conic gradient vanishes at a singular point")]
    GradientVanishes,
    #[error("adjacent tangents at edge {edge} coincide")]
    CoincidentTangents { edge: usize },
    #[error("no parameter-point candidates for edge {edge}")]
    NoCandidates { edge: usize },
    #[error("parameter point {parameter} is outside the admissible region of edge {edge}")]
    ParameterOutsideRegion { edge: usize, parameter: usize },
    #[error("inserted point for edge {edge} is outside its tangent triangle")]
    OutsideTangentTriangle { edge: usize },
    #[error("line does not pass through the blend anchor")]
    LineMissesAnchor,
    #[error("blended lines cancel")]
    OppositeLines,
    #[error("tangent apex is at infinity")]
    TangentApexAtInfinity,
    #[error("segment starting at vertex {start} cannot be split into pieces of at least five vertices")]
    UnsplittableSegment { start: usize },
    #[error("convex junction condition violated at vertex {vertex}")]
    ConvexJunctionCondition { vertex: usize },
    #[error("provenance does not match the previous level")]
    ProvenanceMismatch,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
