//! Versioned JSON reports and CSV ladders.

use anyhow::{Context, Result};
use chernres::residues::{CurrentEstimate, QuadConfig};
use chernres::C64;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub threads: usize,
    pub chi: String,
    pub compare_chi: Option<String>,
    pub ladder: Vec<f64>,
    pub tolerance_scale: f64,
    pub quadrature: QuadConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiEntry {
    pub chi: String,
    pub limit: C64,
    pub error: f64,
    pub difference: f64,
    pub bound: f64,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateEntry {
    pub phi: String,
    pub test: String,
    /// File name of the ladder CSV, relative to the report.
    pub csv: String,
    pub estimate: CurrentEstimate,
    pub chi_check: Option<ChiEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleEntryReport {
    pub phi: String,
    pub test: String,
    pub codimension: usize,
    /// `(-1)^{p-1}(p-1)! ⟨[Z]_p, φ⟩`.
    pub expected: C64,
    pub limit: C64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleEntry {
    pub phi: String,
    pub radius: f64,
    pub nodes: usize,
    pub value: C64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizedEntry {
    pub phi: String,
    pub test: String,
    pub components: Vec<C64>,
    pub component_errors: Vec<f64>,
    pub total: C64,
    pub total_error: f64,
    pub defect: f64,
    pub bound: f64,
}

/// One named invariant: `value ≤ tolerance` passes.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(suite: &str, name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        // NaN never passes
        Check { suite: suite.into(), name: name.into(), value, tolerance, pass: value <= tolerance, detail: String::new() }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Check {
        self.detail = d.into();
        self
    }

    pub fn failed(suite: &str, name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check { suite: suite.into(), name: name.into(), value: f64::NAN, tolerance: 0.0, pass: false, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub command: String,
    pub scenario: String,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<EstimateEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cycle: Vec<CycleEntryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub localized: Option<LocalizedEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleEntry>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Wall-clock time; the only field that varies between identical runs.
    pub runtime_seconds: f64,
}

impl Report {
    pub fn new(command: &str, scenario: &str, config: ConfigEcho) -> Report {
        Report {
            report_version: REPORT_VERSION,
            command: command.into(),
            scenario: scenario.into(),
            config,
            estimates: Vec::new(),
            cycle: Vec::new(),
            localized: None,
            oracle: Vec::new(),
            checks: Vec::new(),
            passed: true,
            runtime_seconds: 0.0,
        }
    }

    pub fn finish(&mut self, started: std::time::Instant) {
        self.passed = self.checks.iter().all(|c| c.pass);
        self.runtime_seconds = started.elapsed().as_secs_f64();
    }

    pub fn estimate(&self, phi: &str, test: &str) -> Option<&EstimateEntry> {
        self.estimates.iter().find(|e| e.phi == phi && e.test == test)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Write `<command>.json` and the ladder CSVs into `dir`; returns the JSON path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for e in &self.estimates {
            let path = dir.join(&e.csv);
            let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
            w.write_record(["eps", "re", "im", "quadrature_error"])?;
            for k in 0..e.estimate.eps.len() {
                let p = e.estimate.pairings[k];
                w.write_record([
                    format!("{:e}", e.estimate.eps[k]),
                    format!("{:e}", p.re),
                    format!("{:e}", p.im),
                    format!("{:e}", e.estimate.quad_errors[k]),
                ])?;
            }
            w.flush()?;
        }
        let path = dir.join(format!("{}.json", self.command));
        std::fs::write(&path, self.to_json()).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(Check::new("s", "ok", 1e-12, 1e-10).pass);
        assert!(!Check::new("s", "nan", f64::NAN, 1e-10).pass);
        assert!(!Check::failed("s", "x", "why").pass);
    }
}
