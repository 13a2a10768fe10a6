//! The acceptance suite: every criterion at its pinned tolerance, run twice
//! into separate directories to establish byte-identical output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use kv_harness::{parse_config, sweep, ExperimentReport, SweepReport};

const CONFIG: &str = include_str!("../configs/acceptance.toml");

fn reports(sweep: &SweepReport) -> BTreeMap<String, Result<ExperimentReport, String>> {
    sweep.entries.iter().map(|e| (e.name.clone(), e.result.clone())).collect()
}

/// Relative paths and contents of every file below `root`.
fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

struct Verdict {
    pass: bool,
    detail: String,
}

/// All checks of the named experiments pass, plus any extra conditions.
fn judge(
    reports: &BTreeMap<String, Result<ExperimentReport, String>>,
    names: &[&str],
    extra: impl Fn(&BTreeMap<String, Result<ExperimentReport, String>>) -> Result<(), String>,
) -> Verdict {
    let mut problems = Vec::new();
    let mut checks = 0;
    for name in names {
        match reports.get(*name) {
            None => problems.push(format!("{name}: missing")),
            Some(Err(e)) => problems.push(format!("{name}: {e}")),
            Some(Ok(r)) => {
                checks += r.checks.len();
                if r.checks.is_empty() {
                    problems.push(format!("{name}: no checks"));
                }
                for c in r.failed_checks() {
                    problems.push(format!("{name}/{} = {:e} (limit {} {:e})", c.id, c.value, c.relation.symbol(), c.limit));
                }
            }
        }
    }
    if problems.is_empty() {
        if let Err(e) = extra(reports) {
            problems.push(e);
        }
    }
    let pass = problems.is_empty();
    let detail = if pass { format!("{checks} checks") } else { problems.join("; ") };
    Verdict { pass, detail }
}

fn metric(reports: &BTreeMap<String, Result<ExperimentReport, String>>, name: &str, key: &str) -> Result<f64, String> {
    match reports.get(name) {
        Some(Ok(r)) => r.metric(key).ok_or_else(|| format!("{name}: metric `{key}` missing")),
        _ => Err(format!("{name}: no report")),
    }
}

fn none(_: &BTreeMap<String, Result<ExperimentReport, String>>) -> Result<(), String> {
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let specs = parse_config(CONFIG).expect("acceptance config parses");
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let run1 = sweep(&specs, 1, first.path()).unwrap();
    let run2 = sweep(&specs, 1, second.path()).unwrap();
    let r = reports(&run1);

    let mut verdicts: Vec<(u32, &str, Verdict)> = vec![
        (1, "dispersion oracle", judge(&r, &["dispersion"], none)),
        (
            2,
            "oscillation oracle",
            judge(&r, &["oscillation", "weak_limits"], |r| {
                let gap = metric(r, "weak_limits", "gap")?;
                let sigma = metric(r, "weak_limits", "stress_of_limit")?;
                if (gap + 4.0).abs() < 1e-3 && (sigma - 8.0).abs() < 1e-3 {
                    Ok(())
                } else {
                    Err(format!("weak-limit gap {gap}, sigma(u_limit) {sigma}; expected -4 and 8"))
                }
            }),
        ),
        (3, "energy identity", judge(&r, &["energy_identity_if", "energy_identity_cnab2"], none)),
        (
            4,
            "energy conservation",
            judge(&r, &["energy_conservation_if", "energy_conservation_cnab2"], |r| {
                for name in ["energy_conservation_if", "energy_conservation_cnab2"] {
                    metric(r, name, "order_1")?;
                    metric(r, name, "order_2")?;
                }
                Ok(())
            }),
        ),
        (5, "H1 propagation and modulated inequality", judge(&r, &["h1_propagation", "modulated_inequality"], none)),
        (6, "Galerkin-Cauchy", judge(&r, &["galerkin_cauchy"], none)),
        (
            7,
            "regularity monitor",
            judge(&r, &["regularity_monitor"], |r| metric(r, "regularity_monitor", "h3_growth").map(|_| ())),
        ),
        (8, "diffusion-dispersion equivalence", judge(&r, &["dd_equivalence"], none)),
        (9, "manufactured solution", judge(&r, &["mms_if", "mms_cnab2"], none)),
    ];

    let (t1, t2) = (tree(first.path()), tree(second.path()));
    let csv_count = t1.keys().filter(|p| p.extension().is_some_and(|e| e == "csv")).count();
    let differing: Vec<String> =
        t1.iter().filter(|(p, bytes)| t2.get(*p) != Some(*bytes)).map(|(p, _)| p.display().to_string()).collect();
    let determinism = if t1.len() == t2.len() && differing.is_empty() && csv_count > 0 {
        Verdict { pass: true, detail: format!("{} files identical, {csv_count} of them CSV", t1.len()) }
    } else {
        Verdict {
            pass: false,
            detail: format!("{} vs {} files, differing: {}", t1.len(), t2.len(), differing.join(", ")),
        }
    };
    verdicts.push((10, "determinism", determinism));

    for (n, label, v) in &verdicts {
        println!("criterion {n:>2} {}: {label} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    assert!(run2.pass() == run1.pass(), "second pass disagrees with the first");
    let failed: Vec<u32> = verdicts.iter().filter(|(_, _, v)| !v.pass).map(|(n, _, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
