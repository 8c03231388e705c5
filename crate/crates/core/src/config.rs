//! Scenario files for the verification harness.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arc::{make_arc, ArcSpec, JordanArc, DEFAULT_DIAMETER_GRID};
use crate::bounds::{EstimationConfig, DEFAULT_CONSTANT_GRID, DEFAULT_SAFETY_FACTOR};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;

pub const DEFAULT_MIN_GAP: f64 = 1e-3;
pub const DEFAULT_CROSS_CHECK_RTOL: f64 = 1e-9;
pub const NAMED_ARCS: [&str; 4] = ["segment", "circle", "half-circle", "ellipse-arc"];

/// The geometry behind each name in [`NAMED_ARCS`].
pub fn named_arc_spec(name: &str) -> Result<ArcSpec> {
    let zero = Complex64::new(0.0, 0.0);
    Ok(match name {
        "segment" => ArcSpec::Segment {
            a: zero,
            b: Complex64::new(1.0, 0.0),
        },
        "circle" => ArcSpec::Circle {
            center: zero,
            radius: 1.0,
        },
        "half-circle" => ArcSpec::CircularArc {
            center: zero,
            radius: 1.0,
            angle_range: [0.0, PI],
        },
        "ellipse-arc" => ArcSpec::EllipseArc {
            center: zero,
            semi_axes: [2.0, 1.0],
            angle_range: [0.0, 1.5 * PI],
        },
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown arc `{other}` (known: {})",
                NAMED_ARCS.join(", ")
            )))
        }
    })
}

/// An arc given by name or by geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArcEntry {
    Named(String),
    Spec(ArcSpec),
}

impl ArcEntry {
    /// Accepts a name or inline JSON.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("arc: {e}")))
        } else {
            Ok(ArcEntry::Named(text.to_string()))
        }
    }

    pub fn build(&self) -> Result<JordanArc> {
        match self {
            ArcEntry::Named(name) => Ok(make_arc(&named_arc_spec(name)?)?.with_label(name.clone())),
            ArcEntry::Spec(spec) => make_arc(spec),
        }
    }
}

/// A function given by roster name or by spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionEntry {
    Named(String),
    Spec(FunctionSpec),
}

impl FunctionEntry {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("function: {e}")))
        } else {
            Ok(FunctionEntry::Named(text.to_string()))
        }
    }

    pub fn spec(&self) -> Result<FunctionSpec> {
        match self {
            FunctionEntry::Named(name) => FunctionSpec::from_name(name),
            FunctionEntry::Spec(spec) => Ok(spec.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub constant_grid: usize,
    pub diameter_grid: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            constant_grid: DEFAULT_CONSTANT_GRID,
            diameter_grid: DEFAULT_DIAMETER_GRID,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub quadrature: f64,
    pub cross_check_rtol: f64,
    pub safety_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: EstimationConfig::default().quad_tol,
            cross_check_rtol: DEFAULT_CROSS_CHECK_RTOL,
            safety_factor: DEFAULT_SAFETY_FACTOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeLayout {
    /// Uniform in the parameter with minimum-gap rejection.
    #[default]
    Random,
    /// `t_k = k/n` on arcs, `k/(n+1)` on closed curves.
    Equispaced,
    /// Greedy Leja points from a fine parameter grid, starting at `t = 0`.
    Leja,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub layout: NodeLayout,
    /// Minimum parameter gap between sampled nodes (circular on closed curves).
    pub min_gap: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            layout: NodeLayout::Random,
            min_gap: DEFAULT_MIN_GAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub arcs: Vec<ArcEntry>,
    pub functions: Vec<FunctionEntry>,
    pub orders: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub extended_k_range: bool,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.arcs.is_empty() {
            return Err(Error::config("arcs", "must list at least one arc"));
        }
        if self.functions.is_empty() {
            return Err(Error::config("functions", "must list at least one function"));
        }
        if self.orders.is_empty() {
            return Err(Error::config("orders", "must list at least one order"));
        }
        for (i, a) in self.arcs.iter().enumerate() {
            a.build().map_err(|e| Error::config(format!("arcs[{i}]"), e.to_string()))?;
        }
        for (i, f) in self.functions.iter().enumerate() {
            f.spec().map_err(|e| Error::config(format!("functions[{i}]"), e.to_string()))?;
        }
        for (i, &n) in self.orders.iter().enumerate() {
            if n < 2 {
                return Err(Error::config(format!("orders[{i}]"), format!("bounds need n >= 2, got {n}")));
            }
            if (n + 1) as f64 * self.sampling.min_gap >= 1.0 {
                return Err(Error::config(
                    format!("orders[{i}]"),
                    format!("{} nodes cannot keep a parameter gap of {}", n + 1, self.sampling.min_gap),
                ));
            }
        }
        if self.grids.constant_grid < 2 {
            return Err(Error::config("grids.constant_grid", "must be at least 2"));
        }
        if self.grids.diameter_grid < 2 {
            return Err(Error::config("grids.diameter_grid", "must be at least 2"));
        }
        let t = &self.tolerances;
        if !(t.quadrature > 0.0) {
            return Err(Error::config("tolerances.quadrature", "must be positive"));
        }
        if !(t.cross_check_rtol > 0.0) {
            return Err(Error::config("tolerances.cross_check_rtol", "must be positive"));
        }
        if !(t.safety_factor > 0.0) {
            return Err(Error::config("tolerances.safety_factor", "must be positive"));
        }
        if !(self.sampling.min_gap >= 0.0) {
            return Err(Error::config("sampling.min_gap", "must be nonnegative"));
        }
        Ok(())
    }

    pub fn estimation(&self) -> EstimationConfig {
        EstimationConfig {
            constant_grid: self.grids.constant_grid,
            diameter_grid: self.grids.diameter_grid,
            quad_tol: self.tolerances.quadrature,
            extended_k_range: self.extended_k_range,
            ..EstimationConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"arcs":["segment"],"functions":["exp"],"orders":[2,3],"trials":2,"seed":7}"#;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.tolerances.safety_factor, DEFAULT_SAFETY_FACTOR);
        assert_eq!(cfg.grids.constant_grid, DEFAULT_CONSTANT_GRID);
        assert_eq!(cfg.sampling.layout, NodeLayout::Random);
    }

    #[test]
    fn zero_trials_is_a_config_error() {
        let err = ScenarioConfig::from_json(&MINIMAL.replace("\"trials\":2", "\"trials\":0")).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "trials"), "{err:?}");
    }

    #[test]
    fn errors_carry_field_paths() {
        let text = MINIMAL.replace("\"seed\":7", "\"seed\":7,\"tolerances\":{\"safety_factor\":\"big\"}");
        let err = ScenarioConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "tolerances.safety_factor"), "{err:?}");

        let text = MINIMAL.replace("[\"exp\"]", "[\"exp\",\"tan\"]");
        let err = ScenarioConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "functions[1]"), "{err:?}");

        let text = MINIMAL.replace("[2,3]", "[2,1]");
        let err = ScenarioConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "orders[1]"), "{err:?}");
    }

    #[test]
    fn inline_specs_are_accepted() {
        let text = MINIMAL
            .replace("[\"segment\"]", r#"[{"kind":"circle","center":[0,0],"radius":2}]"#)
            .replace("[\"exp\"]", r#"[{"kind":"polynomial","coeffs":[[0,0],[1,0]]}]"#);
        let cfg = ScenarioConfig::from_json(&text).unwrap();
        assert!(cfg.arcs[0].build().unwrap().is_closed());
    }

    #[test]
    fn named_arcs_build() {
        for name in NAMED_ARCS {
            let arc = ArcEntry::Named(name.into()).build().unwrap();
            assert_eq!(arc.label(), name);
        }
        assert!(named_arc_spec("spiral").is_err());
    }
}
