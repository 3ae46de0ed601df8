use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::models::{Family, HierarchyKind, Model};

use super::checks::{self, CheckSpec};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model_id: String,
    pub n: u32,
    pub k_max: u32,
    #[serde(default)]
    pub m0: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// Empty means every check applicable to the scenario.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Scales the superpotential away from the hierarchy; for negative controls.
    #[serde(default)]
    pub superpotential_scale: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub model: Model,
    pub n: u32,
    pub k_max: u32,
    pub m0: Option<f64>,
    pub grid: Grid,
    pub checks: Vec<&'static CheckSpec>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let family: Family = config.model_id.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        let mut model = Model::new(family);
        if let Some(s) = config.superpotential_scale {
            if !s.is_finite() {
                return Err(Error::Config("superpotential_scale must be finite".into()));
            }
            model = model.with_superpotential_scale(s);
        }
        let n = config.n;
        model.check_index(n).map_err(|e| Error::Config(e.to_string()))?;
        if family == Family::HypPt && n < 1 {
            return Err(Error::Config("hyp_pt needs n >= 1".into()));
        }
        if let Some(top) = model.k_max(n) {
            if config.k_max > top {
                return Err(Error::Config(format!("k_max = {} exceeds the {} bound states of n = {n}", config.k_max, top + 1)));
            }
        }
        if let Some(m0) = config.m0 {
            if !(m0.is_finite() && m0 >= 0.0) {
                return Err(Error::Config(format!("m0 must be finite and nonnegative, got {m0}")));
            }
            if model.kind() != HierarchyKind::Increasing {
                return Err(Error::Config("m0 is only supported for increasing hierarchies (trig_pt)".into()));
            }
        }
        let grid = resolve_grid(&model, config.grid.as_ref())?;
        let mut scenario = Scenario { model, n, k_max: config.k_max, m0: config.m0, grid, checks: Vec::new(), config };
        scenario.checks = checks::select(&scenario, &scenario.config.checks)?;
        Ok(scenario)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Scenario::new(ScenarioConfig::from_path(path)?)
    }
}

fn resolve_grid(model: &Model, cfg: Option<&GridConfig>) -> Result<Grid> {
    let (a0, b0) = model.domain();
    let default = GridConfig::default();
    let cfg = cfg.unwrap_or(&default);
    let a = cfg.x_min.unwrap_or(a0);
    let b = cfg.x_max.unwrap_or(b0);
    let n = cfg.n_points.unwrap_or(model.family().default_points());
    if model.family() == Family::TrigPt && (a < a0 || b > b0) {
        return Err(Error::Config(format!("trig_pt grid must lie within [{a0}, {b0}]")));
    }
    Grid::new(a, b, n, model.boundary()).map_err(|e| Error::Config(e.to_string()))
}
