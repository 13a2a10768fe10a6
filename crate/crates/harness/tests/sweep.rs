use kv_harness::{parse_config, sweep};

const DD_GRID: &str = r#"
[grid]
id = "dd_equivalence"
model = "quartic"
dim = 1
epsilon = [0.1, 0.2, 0.3]
delta = [1e-4, 5e-4, 1e-3]
a = [0.5, 1.0]
n = 8
t_end = 0.2
record_interval = 0.1
dt_ladder = [0.02, 0.01]
"#;

#[test]
fn capillarity_grid_gives_one_row_per_member() {
    let specs = parse_config(DD_GRID).unwrap();
    assert_eq!(specs.len(), 18);
    let tmp = tempfile::tempdir().unwrap();
    let report = sweep(&specs, 2, tmp.path()).unwrap();
    assert_eq!(report.entries.len(), 18);
    assert!(report.entries.iter().all(|e| e.result.is_ok()));
    let csv = std::fs::read_to_string(tmp.path().join("sweep_report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 19);
    // sorted by id, then config hash
    let hashes: Vec<&str> = report.entries.iter().map(|e| e.config_hash.as_str()).collect();
    let mut sorted = hashes.clone();
    sorted.sort();
    assert_eq!(hashes, sorted);
}

#[test]
fn empty_sweep_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let report = sweep(&[], 4, tmp.path()).unwrap();
    assert!(report.entries.is_empty() && report.pass());
    let csv = std::fs::read_to_string(tmp.path().join("sweep_report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn diverging_member_is_recorded_and_others_complete() {
    // E(0) ≈ 3 exceeds the cap, so the guard trips on the first step
    let config = r#"
[diverges]
id = "energy_identity"
model = "quartic"
n = 8
blowup_threshold = 1.0
dt_ladder = [0.01, 0.005]

[oracle]
id = "weak_limits"
"#;
    let specs = parse_config(config).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let report = sweep(&specs, 2, tmp.path()).unwrap();
    assert_eq!(report.entries.len(), 2);
    let failed: Vec<_> = report.failures().collect();
    assert_eq!(failed.len(), 1);
    let err = failed[0].result.as_ref().unwrap_err();
    assert!(err.contains("blow-up"), "{err}");
    assert!(err.contains("blowup_threshold = 1e0"), "config echo missing: {err}");
    let ok = report.entries.iter().find(|e| e.name == "oracle").unwrap();
    assert!(ok.pass());
    assert!(tmp.path().join("oracle/manifest.txt").is_file());
}
