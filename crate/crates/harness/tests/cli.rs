use std::fs;
use std::process::Command;

fn kvsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kvsim"))
}

const ORACLE: &str = "[osc]\nid = \"oscillation_oracle\"\nseed = 7\n\n[weak]\nid = \"weak_limits\"\n";

#[test]
fn run_writes_under_the_env_root_and_report_reads_it() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("oracle.toml");
    fs::write(&config, ORACLE).unwrap();
    let root = tmp.path().join("out");
    let out = kvsim().env("KV_OUTPUT_ROOT", &root).arg("run").arg(&config).output().unwrap();
    assert!(out.status.success());
    for dir in ["osc", "weak"] {
        assert!(root.join(dir).join("checks.csv").is_file());
        assert!(root.join(dir).join("manifest.txt").is_file());
    }
    let out = kvsim().arg("report").arg(&root).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{text}");
}

#[test]
fn failing_check_gives_nonzero_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("strict.toml");
    // velocity errors decay like 1/n, far above this tolerance at n = 8
    fs::write(&config, "[w]\nid = \"weak_limits\"\nn_ladder = [4, 8]\ntolerance = 1e-30\n").unwrap();
    let out = kvsim().arg("--output").arg(tmp.path().join("o")).arg("run").arg(&config).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn bad_config_reports_line_and_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    fs::write(&config, "[d]\nid = \"dispersion\"\ndt = 0\n").unwrap();
    let out = kvsim().arg("--output").arg(tmp.path()).arg("sweep").arg(&config).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("dt must be > 0"), "{err}");
}

#[test]
fn sweep_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("oracle.toml");
    fs::write(&config, ORACLE).unwrap();
    for (root, jobs) in [("a", "1"), ("b", "2")] {
        let out =
            kvsim().arg("--output").arg(tmp.path().join(root)).args(["sweep", "--jobs", jobs]).arg(&config).output().unwrap();
        assert!(out.status.success());
    }
    for file in ["sweep_report.csv", "osc/checks.csv", "osc/oscillation.csv", "osc/manifest.txt", "weak/limits.csv"] {
        assert_eq!(fs::read(tmp.path().join("a").join(file)).unwrap(), fs::read(tmp.path().join("b").join(file)).unwrap(), "{file}");
    }
}

#[test]
fn report_on_empty_directory_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kvsim().arg("report").arg(tmp.path()).output().unwrap();
    assert!(!out.status.success());
}
