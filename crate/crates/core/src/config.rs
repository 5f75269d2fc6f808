//! Refinement parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Insert a point on every edge.
    #[default]
    Basic,
    /// Insert only on edges longer than the threshold.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    /// Degenerate geometry is an error.
    #[default]
    Strict,
    /// Degenerate geometry falls back to midpoints with a warning.
    Lenient,
}

/// Shape parameters for one junction, keyed by its vertex index in the
/// segmented level-0 polyline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionOverride {
    pub vertex: usize,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementConfig {
    pub topology: Topology,
    pub levels: usize,
    pub mode: Mode,
    /// Adaptive insertion threshold relative to the level-0 bounding-box diagonal.
    pub edge_threshold: f64,
    /// Blend weight of the left (or previous) tangent at junctions.
    pub lambda: f64,
    /// Weight of the tangent apex in the end-point rule.
    pub rho: f64,
    /// Collinear-run tolerance relative to the bounding-box diagonal.
    pub collinearity_tol: f64,
    pub strictness: Strictness,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub junction_overrides: Vec<JunctionOverride>,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            topology: Topology::Open,
            levels: 5,
            mode: Mode::Basic,
            edge_threshold: 0.01,
            lambda: 0.5,
            rho: 0.5,
            collinearity_tol: 1e-9,
            strictness: Strictness::Strict,
            junction_overrides: Vec::new(),
        }
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in (0, 1), got {v}")))
    }
}

impl RefinementConfig {
    pub fn closed() -> Self {
        Self { topology: Topology::Closed, ..Self::default() }
    }

    pub fn open() -> Self {
        Self::default()
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_strictness(mut self, strictness: Strictness) -> Self {
        self.strictness = strictness;
        self
    }

    pub fn is_lenient(&self) -> bool {
        self.strictness == Strictness::Lenient
    }

    pub fn validate(&self) -> Result<()> {
        open_unit("lambda", self.lambda)?;
        open_unit("rho", self.rho)?;
        for o in &self.junction_overrides {
            if let Some(l) = o.lambda {
                open_unit("junction lambda", l)?;
            }
            if let Some(r) = o.rho {
                open_unit("junction rho", r)?;
            }
        }
        if !(self.collinearity_tol >= 0.0 && self.collinearity_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "collinearity tolerance must be finite and non-negative, got {}",
                self.collinearity_tol
            )));
        }
        if self.mode == Mode::Adaptive && !(self.edge_threshold > 0.0 && self.edge_threshold.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "edge threshold must be positive in adaptive mode, got {}",
                self.edge_threshold
            )));
        }
        Ok(())
    }

    /// `(lambda, rho)` for the junction at level-0 vertex `vertex`.
    pub fn junction_parameters(&self, vertex: usize) -> (f64, f64) {
        let o = self.junction_overrides.iter().find(|o| o.vertex == vertex);
        (o.and_then(|o| o.lambda).unwrap_or(self.lambda), o.and_then(|o| o.rho).unwrap_or(self.rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(RefinementConfig::default().validate().is_ok());
        assert_eq!(RefinementConfig::default().levels, 5);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let c = RefinementConfig { lambda: 1.0, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let c = RefinementConfig { rho: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = RefinementConfig { edge_threshold: 0.0, mode: Mode::Adaptive, ..Default::default() };
        assert!(c.validate().is_err());
        let c = RefinementConfig { edge_threshold: 0.0, ..Default::default() };
        assert!(c.validate().is_ok());
    }

    #[test]
    fn overrides_apply_per_vertex() {
        let c = RefinementConfig {
            junction_overrides: vec![JunctionOverride { vertex: 3, lambda: Some(0.8), rho: None }],
            ..Default::default()
        };
        assert_eq!(c.junction_parameters(3), (0.8, 0.5));
        assert_eq!(c.junction_parameters(4), (0.5, 0.5));
    }
}
