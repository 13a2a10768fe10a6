//! Verdicts, tables and aggregated reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    /// Strictly below.
    Below,
    AtLeast,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
        }
    }

    fn parse(s: &str) -> Option<Relation> {
        match s {
            "<=" => Some(Relation::AtMost),
            "<" => Some(Relation::Below),
            ">=" => Some(Relation::AtLeast),
            _ => None,
        }
    }
}

/// One measured value against its limit. NaN never passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
}

impl Check {
    pub fn at_most(id: impl Into<String>, value: f64, limit: f64) -> Check {
        Check { id: id.into(), value, relation: Relation::AtMost, limit }
    }

    pub fn below(id: impl Into<String>, value: f64, limit: f64) -> Check {
        Check { id: id.into(), value, relation: Relation::Below, limit }
    }

    pub fn at_least(id: impl Into<String>, value: f64, limit: f64) -> Check {
        Check { id: id.into(), value, relation: Relation::AtLeast, limit }
    }

    /// A yes/no condition recorded as 0 (holds) or 1 (violated).
    pub fn holds(id: impl Into<String>, ok: bool) -> Check {
        Check::at_most(id, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn pass(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.limit,
            Relation::Below => self.value < self.limit,
            Relation::AtLeast => self.value >= self.limit,
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub const CHECKS_HEADER: &str = "check,value,relation,limit,verdict";

pub fn checks_csv(checks: &[Check]) -> String {
    let mut s = String::from(CHECKS_HEADER);
    s.push('\n');
    for c in checks {
        writeln!(s, "{},{:.16e},{},{:.16e},{}", c.id, c.value, c.relation.symbol(), c.limit, c.verdict()).unwrap();
    }
    s
}

pub fn parse_checks_csv(text: &str) -> anyhow::Result<Vec<Check>> {
    let mut lines = text.lines();
    if lines.next() != Some(CHECKS_HEADER) {
        bail!("missing checks header");
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                bail!("row {}: expected 5 fields, got {}", i + 2, f.len());
            }
            let relation = Relation::parse(f[2]).with_context(|| format!("row {}: bad relation `{}`", i + 2, f[2]))?;
            Ok(Check { id: f[0].to_string(), value: f[1].parse()?, relation, limit: f[3].parse()? })
        })
        .collect()
}

/// CSV builder with a fixed header; floats in 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Table {
        Table { file: file.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    /// Preformatted CSV, e.g. a diagnostic series.
    pub fn raw(file: &str, csv: String) -> Table {
        let mut lines = csv.lines();
        let header = lines.next().unwrap_or_default().split(',').map(str::to_string).collect();
        let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        Table { file: file.to_string(), header, rows }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header of {}", self.file);
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    /// Blank, e.g. an order on the first rung.
    None,
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::F(x) => write!(f, "{x:.16e}"),
            Cell::I(i) => write!(f, "{i}"),
            Cell::S(s) => f.write_str(s),
            Cell::None => Ok(()),
        }
    }
}

/// Outcome of one executed experiment, as written to its directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub id: String,
    pub config_hash: String,
    pub checks: Vec<Check>,
    pub metrics: Vec<(String, f64)>,
    pub dir: PathBuf,
    pub artifacts: Vec<PathBuf>,
}

impl ExperimentReport {
    /// Passes iff there is at least one check and all pass.
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass()).collect()
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// One row of a report assembled from an output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectoryEntry {
    pub name: String,
    pub id: String,
    pub config_hash: String,
    pub checks: Vec<Check>,
}

impl DirectoryEntry {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }
}

/// Reads every experiment directory (one holding `manifest.txt` and
/// `checks.csv`) directly below `root`, sorted by directory name.
pub fn read_directory(root: &Path) -> anyhow::Result<Vec<DirectoryEntry>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .with_context(|| format!("reading {}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("manifest.txt").is_file() && p.join("checks.csv").is_file())
        .collect();
    dirs.sort();
    dirs.iter()
        .map(|dir| {
            let manifest = fs::read_to_string(dir.join("manifest.txt"))?;
            let field = |key: &str| {
                manifest
                    .lines()
                    .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
                    .unwrap_or("")
                    .to_string()
            };
            let checks = parse_checks_csv(&fs::read_to_string(dir.join("checks.csv"))?)
                .with_context(|| format!("parsing {}", dir.join("checks.csv").display()))?;
            Ok(DirectoryEntry { name: field("experiment"), id: field("id"), config_hash: field("config_hash"), checks })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).pass());
        assert!(!Check::at_least("x", f64::NAN, 1.0).pass());
        assert!(!Check::below("x", 1.0, 1.0).pass());
        assert!(Check::at_most("x", 1.0, 1.0).pass());
        assert!(Check::holds("x", true).pass() && !Check::holds("x", false).pass());
    }

    #[test]
    fn checks_round_trip() {
        let checks = vec![Check::at_most("a", 1e-13, 1e-12), Check::at_least("order", 3.9, 3.5), Check::below("r", 0.5, 1.0)];
        let csv = checks_csv(&checks);
        assert_eq!(parse_checks_csv(&csv).unwrap(), checks);
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("x.csv", &["n", "err", "order"]);
        t.push(vec![Cell::I(4), Cell::F(0.5), Cell::None]);
        t.push(vec![Cell::I(8), Cell::F(0.125), Cell::F(2.0)]);
        assert_eq!(t.to_csv(), "n,err,order\n4,5.0000000000000000e-1,\n8,1.2500000000000000e-1,2.0000000000000000e0\n");
        let raw = Table::raw("y.csv", t.to_csv());
        assert_eq!(raw.to_csv(), t.to_csv());
    }
}
