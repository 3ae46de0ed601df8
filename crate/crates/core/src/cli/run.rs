use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dirac2::{dirac_spectrum, dirac_spectrum_numeric, eigenspinor, DiracOperator};
use crate::dirac4::{massive_eigenstate, massive_spectrum, rayleigh_quotient, Branch, MassiveOperator};
use crate::error::{Error, Result};
use crate::hierarchy::eigenfunction;

use super::config::{Format, Scenario};
use super::report::{
    fixed_opt, CheckResult, Fixed, GridSummary, ScenarioSummary, Summary, VerificationReport, SCHEMA_VERSION,
};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Verify,
    Plotdata,
}

impl Command {
    fn default_format(self) -> Format {
        match self {
            Command::Verify => Format::Json,
            Command::Spectrum | Command::Plotdata => Format::Csv,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub timings: bool,
}

fn summary(s: &Scenario) -> ScenarioSummary {
    ScenarioSummary {
        model_id: s.model.id().to_string(),
        n: s.n,
        k_max: s.k_max,
        m0: fixed_opt(s.m0),
        superpotential_scale: fixed_opt(s.config.superpotential_scale),
        grid: GridSummary {
            n_points: s.grid.n_points(),
            x_min: Fixed(s.grid.x_min()),
            x_max: Fixed(s.grid.x_max()),
            boundary: s.grid.boundary(),
        },
    }
}

/// Runs the scenario's checks concurrently; results are sorted by name.
pub fn run_verify(s: &Scenario, seed: u64, timings: bool) -> VerificationReport {
    let mut checks: Vec<CheckResult> = s
        .checks
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let out = c.run(s, seed);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let (residual, error) = match out {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            CheckResult {
                name: c.id.to_string(),
                residual: residual.map(Fixed),
                tolerance: Fixed(c.tolerance),
                pass: residual.is_some_and(|r| r < c.tolerance),
                wall_time_ms: timings.then_some(Fixed(ms)),
                error,
            }
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().filter(|c| c.pass).count();
    VerificationReport {
        schema_version: SCHEMA_VERSION,
        seed,
        scenario: summary(s),
        summary: Summary { total: checks.len(), passed, failed: checks.len() - passed },
        checks,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub model: String,
    pub n: u32,
    pub k: u32,
    pub sign: String,
    pub epsilon_analytic: Fixed,
    pub epsilon_numeric: Option<Fixed>,
    pub abs_err: Option<Fixed>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub schema_version: u32,
    pub scenario: ScenarioSummary,
    pub rows: Vec<SpectrumRow>,
}

fn row(model: String, n: u32, k: u32, sign: &str, an: f64, num: Option<f64>) -> SpectrumRow {
    SpectrumRow {
        model,
        n,
        k,
        sign: sign.to_string(),
        epsilon_analytic: Fixed(an),
        epsilon_numeric: fixed_opt(num),
        abs_err: num.map(|v| Fixed((v - an).abs())),
    }
}

/// Analytic and grid spectra side by side. With m0 set, rows hold the
/// massive energies, one per (k, branch), tagged "<model>/massive".
pub fn run_spectrum(s: &Scenario) -> Result<SpectrumTable> {
    let op = DiracOperator::new(s.model, s.n)?;
    let mut rows = Vec::new();
    match s.m0 {
        None => {
            let numeric = dirac_spectrum_numeric(&op, s.k_max, &s.grid)?;
            for e in dirac_spectrum(&op, s.k_max)? {
                let num = numeric.iter().find(|x| x.k == e.k && x.sign == e.sign).map(|x| x.epsilon);
                rows.push(row(s.model.id().to_string(), e.n, e.k, e.sign.symbol(), e.epsilon, num));
            }
        }
        Some(m0) => {
            let mo = MassiveOperator::new(op, m0)?;
            let tag = format!("{}/massive", s.model.id());
            let mut seen = Vec::new();
            for e in massive_spectrum(&mo, s.k_max)? {
                if seen.contains(&(e.k, e.branch)) {
                    continue;
                }
                seen.push((e.k, e.branch));
                let st = massive_eigenstate(&mo, e.k, e.s, e.branch, &s.grid)?;
                let num = rayleigh_quotient(&mo, &st.spinor)?;
                let sign = match e.branch {
                    Branch::PlusEnergy => "+",
                    Branch::MinusEnergy => "-",
                };
                rows.push(row(tag.clone(), e.n, e.k, sign, e.energy, Some(num)));
            }
        }
    }
    Ok(SpectrumTable { schema_version: SCHEMA_VERSION, scenario: summary(s), rows })
}

impl SpectrumTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["model", "n", "k", "sign", "epsilon_analytic", "epsilon_numeric", "abs_err"])?;
        let f = |x: Option<Fixed>| x.map(|v| v.0.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.write_record([
                r.model.clone(),
                r.n.to_string(),
                r.k.to_string(),
                r.sign.clone(),
                r.epsilon_analytic.0.to_string(),
                f(r.epsilon_numeric),
                f(r.abs_err),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotColumn {
    pub name: String,
    pub values: Vec<Fixed>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotData {
    pub schema_version: u32,
    pub scenario: ScenarioSummary,
    pub x: Vec<Fixed>,
    pub columns: Vec<PlotColumn>,
}

/// Scalar eigenfunctions psi_n^k, then each eigenspinor's components.
pub fn run_plotdata(s: &Scenario) -> Result<PlotData> {
    let n = s.n;
    let mut columns = Vec::new();
    for k in 0..=s.k_max {
        let psi = eigenfunction(&s.model, n, k, &s.grid)?;
        columns.push(PlotColumn { name: format!("psi_n{n}_k{k}"), values: psi.values().iter().map(|z| Fixed(z.re)).collect() });
    }
    let op = DiracOperator::new(s.model, n)?;
    let mut states: Vec<_> = dirac_spectrum(&op, s.k_max)?.into_iter().map(|e| (e.k, e.sign)).collect();
    states.sort();
    for (k, sign) in states {
        let st = eigenspinor(&op, k, sign, &s.grid)?;
        let tag = if sign.value() > 0.0 { "plus" } else { "minus" };
        for (part, comp) in [("upper", st.spinor.upper()), ("lower", st.spinor.lower())] {
            let base = format!("spinor_n{n}_k{k}_{tag}_{part}");
            columns.push(PlotColumn { name: format!("{base}_re"), values: comp.values().iter().map(|z| Fixed(z.re)).collect() });
            columns.push(PlotColumn { name: format!("{base}_im"), values: comp.values().iter().map(|z| Fixed(z.im)).collect() });
        }
    }
    Ok(PlotData {
        schema_version: SCHEMA_VERSION,
        scenario: summary(s),
        x: s.grid.nodes().into_iter().map(Fixed).collect(),
        columns,
    })
}

impl PlotData {
    pub fn column(&self, name: &str) -> Option<&PlotColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["x".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        out.write_record(&header)?;
        for (i, x) in self.x.iter().enumerate() {
            let mut rec = vec![x.0.to_string()];
            rec.extend(self.columns.iter().map(|c| c.values[i].0.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs one command end to end and returns the process exit code:
/// 0 when everything passed, 1 when a check failed, 2 on configuration or
/// setup errors (reported on standard error).
pub fn execute(cmd: Command, opts: &RunOptions) -> i32 {
    match try_execute(cmd, opts) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("facdirac: {e}");
            2
        }
    }
}

fn try_execute(cmd: Command, opts: &RunOptions) -> Result<i32> {
    let s = Scenario::from_path(&opts.config)?;
    let format = s.config.output.format.unwrap_or(cmd.default_format());
    let path = opts.out.as_ref().or(s.config.output.path.as_ref());
    let mut w = sink(path)?;
    let code = match cmd {
        Command::Verify => {
            let report = run_verify(&s, opts.seed, opts.timings);
            match format {
                Format::Json => report.write_json(&mut w)?,
                Format::Csv => report.write_csv(&mut w)?,
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                let detail = c.error.clone().unwrap_or_else(|| match c.residual {
                    Some(r) => format!("residual {:.3e} >= tolerance {:.1e}", r.0, c.tolerance.0),
                    None => "non-finite residual".into(),
                });
                eprintln!("facdirac: check {} failed: {detail}", c.name);
            }
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Command::Spectrum => {
            let t = run_spectrum(&s)?;
            match format {
                Format::Json => write_json(&t, &mut w)?,
                Format::Csv => t.write_csv(&mut w)?,
            }
            0
        }
        Command::Plotdata => {
            let p = run_plotdata(&s)?;
            match format {
                Format::Json => write_json(&p, &mut w)?,
                Format::Csv => p.write_csv(&mut w)?,
            }
            0
        }
    };
    w.flush()?;
    Ok(code)
}
