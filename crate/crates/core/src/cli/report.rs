use std::io::Write;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::grid::Boundary;

pub const SCHEMA_VERSION: u32 = 1;

/// Float written with 17 significant digits; non-finite values become null.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        match serde_json::Number::from_str(&format!("{:.16e}", self.0)) {
            Ok(n) => n.serialize(s),
            Err(_) => s.serialize_f64(self.0),
        }
    }
}

pub fn fixed_opt(x: Option<f64>) -> Option<Fixed> {
    x.map(Fixed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub n_points: usize,
    pub x_min: Fixed,
    pub x_max: Fixed,
    pub boundary: Boundary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub model_id: String,
    pub n: u32,
    pub k_max: u32,
    pub m0: Option<Fixed>,
    pub superpotential_scale: Option<Fixed>,
    pub grid: GridSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: Option<Fixed>,
    pub tolerance: Fixed,
    pub pass: bool,
    pub wall_time_ms: Option<Fixed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub seed: u64,
    pub scenario: ScenarioSummary,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["name", "residual", "tolerance", "pass", "wall_time_ms"])?;
        for c in &self.checks {
            let fmt = |x: Option<Fixed>| x.filter(|v| v.0.is_finite()).map(|v| format!("{:.16e}", v.0)).unwrap_or_default();
            out.write_record([
                c.name.clone(),
                fmt(c.residual),
                format!("{:.16e}", c.tolerance.0),
                c.pass.to_string(),
                fmt(c.wall_time_ms),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
