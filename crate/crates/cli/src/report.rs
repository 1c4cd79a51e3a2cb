use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

/// Acceptance region for a measured value; open sides are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Bound {
    pub fn at_most(hi: f64) -> Self {
        Bound { lo: None, hi: Some(hi) }
    }

    pub fn at_least(lo: f64) -> Self {
        Bound { lo: Some(lo), hi: None }
    }

    pub fn band(lo: f64, hi: f64) -> Self {
        Bound { lo: Some(lo), hi: Some(hi) }
    }

    pub fn contains(&self, v: f64) -> bool {
        v.is_finite() && self.lo.map_or(true, |lo| v >= lo) && self.hi.map_or(true, |hi| v <= hi)
    }

    fn describe(&self) -> String {
        match (self.lo, self.hi) {
            (Some(a), Some(b)) => format!("[{a}, {b}]"),
            (None, Some(b)) => format!("<= {b}"),
            (Some(a), None) => format!(">= {a}"),
            (None, None) => String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub status: Status,
    /// `None` when the computation produced no finite value.
    pub measured: Option<f64>,
    pub bound_or_band: Bound,
    pub runtime_s: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub jobs: usize,
    pub seed: u64,
    /// sha256 of the config echo.
    pub config_hash: String,
}

/// Named numeric series; `series` tags each row (potential, γ, ...).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlotTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub environment: Environment,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub plots: BTreeMap<String, PlotTable>,
    /// Set when a hard failure stopped the run early.
    pub halted: Option<String>,
}

impl VerificationReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count() + usize::from(self.halted.is_some())
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn summary(&self) -> String {
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        format!(
            "{} checks: {} pass, {} fail, {} report-only{}",
            self.checks.len(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::ReportOnly),
            self.halted.as_ref().map(|h| format!("; halted: {h}")).unwrap_or_default()
        )
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

/// Writes the report in `format` under `dir`; returns the files written.
pub fn export(report: &VerificationReport, format: Format, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    match format {
        Format::Json => {
            let path = dir.join("report.json");
            std::fs::write(&path, serde_json::to_string_pretty(report)?)?;
            Ok(vec![path])
        }
        Format::Csv => {
            let path = dir.join("checks.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["check_id", "status", "measured", "bound", "runtime_s", "note"])?;
            for c in &report.checks {
                let status = serde_json::to_value(c.status)?.as_str().unwrap_or_default().to_string();
                let measured = c.measured.map(|m| m.to_string()).unwrap_or_default();
                w.write_record([&c.check_id, &status, &measured, &c.bound_or_band.describe(), &format!("{:.3}", c.runtime_s), &c.note])?;
            }
            w.flush()?;
            Ok(vec![path])
        }
        Format::Plotdata => {
            let sub = dir.join("plotdata");
            std::fs::create_dir_all(&sub)?;
            let mut out = vec![];
            for (name, table) in &report.plots {
                let path = sub.join(format!("{name}.csv"));
                let mut w = csv::Writer::from_path(&path)?;
                let mut header = vec!["series".to_string()];
                header.extend(table.columns.iter().cloned());
                w.write_record(&header)?;
                for (series, values) in &table.rows {
                    let mut rec = vec![series.clone()];
                    rec.extend(values.iter().map(|v| v.to_string()));
                    w.write_record(&rec)?;
                }
                w.flush()?;
                out.push(path);
            }
            Ok(out)
        }
    }
}
