//! Reproducible experiment drivers.
//!
//! Each experiment has a pure entry point returning its measurements and a
//! `cmd_*` wrapper that reads an [`ExperimentConfig`], writes CSV/SVG
//! artifacts plus a manifest into an output directory, and returns a
//! [`Report`] whose checks decide the process exit code.

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::io::{write_manifest, ExperimentConfig};

pub mod bench;
pub mod coeff;
pub mod limits;
pub mod orders;
pub mod osc;
pub mod raw;
pub mod tail;
pub mod twoslit;

pub use bench::{bench, cmd_bench, BenchRow};
pub use coeff::{cmd_coeff, coefficient_window, linspace, WindowStats};
pub use limits::{cmd_limits, degenerate_point, distinguished_point, LadderPoint};
pub use orders::{cone_convergence, spectral_gaussian_error, spreading_gaussian};
pub use osc::{boundary_layer_ladder, cmd_oscillator, oscillator_energy, EnergyCheck, LayerPoint};
pub use raw::{cmd_compare, cmd_propagate};
pub use tail::{tail_pathology, TailResult};
pub use twoslit::{cmd_twoslit, two_slit, TwoSlitResult};

/// A named pass/fail measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Human-readable lines plus the checks an experiment asserts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub name: String,
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("[{}]\n", self.name);
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        for c in &self.checks {
            s.push_str(&format!(
                "{} {}: {}\n",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        s
    }
}

/// Create `out`, write the resolved configuration and a manifest.
pub(crate) fn finish(out: &Path, cfg: &ExperimentConfig, report: &Report, extra: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(out)?;
    cfg.save(&out.join("config.resolved"))?;
    let mut entries: Vec<(String, String)> = vec![("experiment".into(), report.name.clone())];
    entries.extend(cfg.entries().map(|(k, v)| (format!("config.{k}"), v.clone())));
    entries.extend_from_slice(extra);
    for c in &report.checks {
        entries.push((
            format!("check.{}", c.name),
            if c.passed { "pass" } else { "fail" }.into(),
        ));
    }
    write_manifest(&out.join("manifest.txt"), &entries)
}
