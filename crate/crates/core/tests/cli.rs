use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn echo_audit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_echo-audit"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = echo_audit(args, cwd);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn small_synth(cwd: &Path) {
    fs::write(cwd.join("synth.json"), r#"{"n_users": 80, "n_items": 400, "n_days": 40, "purchase_probability": 0.2, "master_seed": 2}"#).unwrap();
    ok(&["synth", "--config", "synth.json", "--out", "data"], cwd);
}

#[test]
fn synth_check_cohort_analyze_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cwd = tmp.path();
    small_synth(cwd);
    for f in ["browse.csv", "click.csv", "purchase.csv", "embeddings.tsv", "ground_truth.json", "run.json"] {
        assert!(cwd.join("data").join(f).exists(), "{f}");
    }

    let check = ok(&["ingest-check", "--config", "data/run.json"], cwd);
    assert!(check.contains("browse: 128000 rows"), "{check}");
    let single = ok(&["ingest-check", "--log", "data/click.csv", "--kind", "click"], cwd);
    assert!(single.starts_with("click: "));

    let cohorts = ok(&["cohort", "--config", "data/run.json", "--lo", "0.3", "--out", "data"], cwd);
    assert!(cohorts.starts_with("40 following, 40 ignoring"), "{cohorts}");
    let csv = fs::read_to_string(cwd.join("data/cohorts.csv")).unwrap();
    assert!(csv.starts_with("user_id,pvr,total_pvs,clicked_pvs,group\n"));
    assert_eq!(csv.lines().count(), 81);

    let decisions = ok(&["analyze", "--config", "data/run.json", "--seed", "5", "--out", "results"], cwd);
    assert!(decisions.contains("reinforcement: "));
    let md = fs::read(cwd.join("results/report.md")).unwrap();

    fs::remove_file(cwd.join("results/report.md")).unwrap();
    fs::remove_file(cwd.join("results/ch_drop.csv")).unwrap();
    ok(&["report", "--input", "results/report.json"], cwd);
    assert_eq!(fs::read(cwd.join("results/report.md")).unwrap(), md);
    assert!(cwd.join("results/ch_drop.csv").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cwd = tmp.path();
    small_synth(cwd);
    fs::write(
        cwd.join("quick.json"),
        r#"{"browse_log": "data/browse.csv", "click_log": "data/click.csv", "purchase_log": "data/purchase.csv",
            "embeddings": "data/embeddings.tsv", "campaigns": ["tendency"], "kinds": ["click"], "seed": 1}"#,
    )
    .unwrap();
    ok(&["analyze", "--config", "quick.json", "--seed", "9", "--out", "a"], cwd);
    let json = fs::read_to_string(cwd.join("a/report.json")).unwrap();
    assert!(json.contains("\"master_seed\": 9"));
}

#[test]
fn failures_exit_nonzero_with_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let cwd = tmp.path();
    small_synth(cwd);
    fs::remove_file(cwd.join("data/embeddings.tsv")).unwrap();
    let out = echo_audit(&["analyze", "--config", "data/run.json", "--out", "results"], cwd);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage embed/load"));
    assert!(!cwd.join("results/report.json").exists());

    let out = echo_audit(&["analyze", "--config", "missing.json"], cwd);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    fs::write(cwd.join("bad.json"), r#"{"no_such_key": 1}"#).unwrap();
    let out = echo_audit(&["analyze", "--config", "bad.json"], cwd);
    assert!(!out.status.success());

    let out = echo_audit(&["ingest-check", "--log", "data/click.csv", "--kind", "clicks"], cwd);
    assert!(!out.status.success());
}
