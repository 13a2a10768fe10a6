//! Parallel execution of independent experiments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;

use crate::config::ExperimentSpec;
use crate::output::run_experiment;
use crate::report::ExperimentReport;

#[derive(Debug)]
pub struct SweepEntry {
    pub name: String,
    pub id: String,
    pub config_hash: String,
    /// The report, or the error chain rendered on one line.
    pub result: Result<ExperimentReport, String>,
}

impl SweepEntry {
    pub fn pass(&self) -> bool {
        matches!(&self.result, Ok(r) if r.pass())
    }
}

#[derive(Debug, Default)]
pub struct SweepReport {
    /// Sorted by (id, config hash, name) whatever the completion order.
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    /// An empty sweep passes.
    pub fn pass(&self) -> bool {
        self.entries.iter().all(SweepEntry::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepEntry> {
        self.entries.iter().filter(|e| !e.pass())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("experiment,id,config_hash,checks,failed,verdict,error\n");
        for e in &self.entries {
            let (checks, failed, error) = match &e.result {
                Ok(r) => (r.checks.len(), r.failed_checks().len(), String::new()),
                Err(msg) => (0, 0, quote(msg)),
            };
            let verdict = if e.pass() { "PASS" } else { "FAIL" };
            writeln!(s, "{},{},{},{checks},{failed},{verdict},{error}", e.name, e.id, e.config_hash).unwrap();
        }
        s
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Runs `specs` on a pool of `jobs` threads; each experiment runs
/// sequentially inside its worker. Failures are recorded per entry.
pub fn sweep(specs: &[ExperimentSpec], jobs: usize, root: &Path) -> anyhow::Result<SweepReport> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let mut entries: Vec<SweepEntry> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| SweepEntry {
                name: spec.name.clone(),
                id: spec.id.name().to_string(),
                config_hash: spec.config_hash(),
                result: run_experiment(spec, root).map_err(|e| format!("{e:#}").replace('\n', " | ")),
            })
            .collect()
    });
    entries.sort_by(|a, b| (&a.id, &a.config_hash, &a.name).cmp(&(&b.id, &b.config_hash, &b.name)));
    let report = SweepReport { entries };
    fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
    let path = root.join("sweep_report.csv");
    fs::write(&path, report.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    Ok(report)
}
