//! Writes an experiment's artifacts under `root/<output_dir or name>/`.
//!
//! Every file is a pure function of the `ExperimentSpec`: no timestamps, host names or
//! wall-clock times, so equal specs give byte-identical directories.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use sha2::{Digest, Sha256};

use crate::config::ExperimentSpec;
use crate::experiments::{execute, Outcome};
use crate::report::{checks_csv, ExperimentReport};

pub fn experiment_dir(spec: &ExperimentSpec, root: &Path) -> PathBuf {
    root.join(spec.output_dir.clone().unwrap_or_else(|| PathBuf::from(&spec.name)))
}

/// Executes `spec` and writes its artifacts.
pub fn run_experiment(spec: &ExperimentSpec, root: &Path) -> anyhow::Result<ExperimentReport> {
    let outcome = execute(spec)?;
    write_outcome(spec, &outcome, root)
}

pub fn write_outcome(spec: &ExperimentSpec, outcome: &Outcome, root: &Path) -> anyhow::Result<ExperimentReport> {
    let dir = experiment_dir(spec, root);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files: Vec<(String, String)> = vec![("checks.csv".into(), checks_csv(&outcome.checks))];
    files.extend(outcome.tables.iter().map(|t| (t.file.clone(), t.to_csv())));
    if spec.plot {
        files.extend(outcome.plots.iter().map(|(f, chart)| (f.clone(), chart.to_svg())));
    }

    let mut artifacts = Vec::with_capacity(files.len() + 1);
    let mut digests = String::new();
    for (name, body) in &files {
        let path = dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        writeln!(digests, "{}  {name}", hex(&Sha256::digest(body.as_bytes()))).unwrap();
        artifacts.push(path);
    }

    let report = ExperimentReport {
        name: spec.name.clone(),
        id: spec.id.name().to_string(),
        config_hash: spec.config_hash(),
        checks: outcome.checks.clone(),
        metrics: outcome.metrics.clone(),
        dir: dir.clone(),
        artifacts: Vec::new(),
    };
    let mut manifest = String::new();
    writeln!(manifest, "experiment = {}", report.name).unwrap();
    writeln!(manifest, "id = {}", report.id).unwrap();
    writeln!(manifest, "config_hash = {}", report.config_hash).unwrap();
    writeln!(manifest, "verdict = {}", if report.pass() { "PASS" } else { "FAIL" }).unwrap();
    manifest.push_str("\n[config]\n");
    manifest.push_str(&spec.echo());
    manifest.push_str("\n[metrics]\n");
    for (k, v) in &report.metrics {
        writeln!(manifest, "{k} = {v:.16e}").unwrap();
    }
    manifest.push_str("\n[artifacts]\n");
    manifest.push_str(&digests);
    let path = dir.join("manifest.txt");
    fs::write(&path, manifest).with_context(|| format!("writing {}", path.display()))?;
    artifacts.push(path);
    Ok(ExperimentReport { artifacts, ..report })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentId;
    use crate::report::{read_directory, Check, Table};

    #[test]
    fn manifest_lists_every_artifact_and_reads_back() {
        let tmp = tempfile::tempdir().unwrap();
        let spec = ExperimentSpec::with_defaults("probe", ExperimentId::WeakLimits);
        let mut table = Table::new("t.csv", &["x"]);
        table.push(vec![crate::report::Cell::I(1)]);
        let outcome = Outcome {
            checks: vec![Check::at_most("a", 0.5, 1.0)],
            metrics: vec![("m".into(), 2.0)],
            tables: vec![table],
            plots: vec![],
        };
        let report = write_outcome(&spec, &outcome, tmp.path()).unwrap();
        assert!(report.pass());
        let manifest = fs::read_to_string(report.dir.join("manifest.txt")).unwrap();
        assert!(manifest.contains("  checks.csv\n") && manifest.contains("  t.csv\n"));
        assert!(manifest.contains("m = 2.0000000000000000e0"));
        let entries = read_directory(tmp.path()).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].name, "probe");
        assert_eq!(entries[0].config_hash, spec.config_hash());
        assert_eq!(entries[0].checks, outcome.checks);
    }
}
