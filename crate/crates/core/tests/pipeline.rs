use std::fs;
use std::path::Path;

use echo_audit::experiment::ExperimentReport;
use echo_audit::pipeline::{analyze, load_inputs, Campaign, RunConfig};
use echo_audit::render::write_report;
use echo_audit::synth::{generate, write_output, SynthConfig};
use echo_audit::Error;

fn small_synth(dir: &Path, beta: f64, gamma: f64) {
    let cfg = SynthConfig {
        n_users: 80,
        purchase_probability: 0.2,
        n_items: 600,
        n_days: 40,
        reinforcement_rate: beta,
        narrowing_rate: gamma,
        master_seed: 4,
        ..SynthConfig::default()
    };
    write_output(&generate(&cfg).unwrap(), dir).unwrap();
}

fn config(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig {
        repetitions: 10,
        k_max: 12,
        selection_reps: 3,
        ..RunConfig::default()
    };
    cfg.resolve_paths(dir);
    cfg
}

#[test]
fn files_to_report() {
    let tmp = tempfile::tempdir().unwrap();
    small_synth(tmp.path(), 0.3, 0.5);
    let cfg = config(tmp.path());
    let inputs = load_inputs(&cfg).unwrap();
    let out = tmp.path().join("results");
    let mut flushes = 0;
    let report = analyze(&inputs, &cfg, |r| {
        flushes += 1;
        write_report(r, &out)
    })
    .unwrap();

    // cohorts, two tendency kinds, two reinforcement kinds, final
    assert_eq!(flushes, 6);
    assert_eq!(report.tendency.len(), 2);
    assert_eq!(report.reinforcement.len(), 2);
    assert!(report.decisions.iter().any(|d| d == "content narrowing: detected (following)"));

    let json: ExperimentReport = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json, report);
    for name in ["report.md", "hopkins.csv", "ch_drop.csv", "ari_purchase.csv", "diversity.csv", "bic_curve_following.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let md = fs::read_to_string(out.join("report.md")).unwrap();
    let ave = &report.reinforcement[0].ch_drop.ave;
    assert!(md.contains(&format!("| AVE | | | {:.4} | {:.4} | {:.4e} |", ave.following, ave.ignoring, ave.p_value)));
}

#[test]
fn missing_embeddings_fail_before_any_output() {
    let tmp = tempfile::tempdir().unwrap();
    small_synth(tmp.path(), 0.0, 0.0);
    fs::remove_file(tmp.path().join("embeddings.tsv")).unwrap();
    let err = load_inputs(&config(tmp.path())).unwrap_err();
    assert_eq!(err.stage(), Some("embed/load"));
}

#[test]
fn failing_campaign_keeps_earlier_tables() {
    let tmp = tempfile::tempdir().unwrap();
    small_synth(tmp.path(), 0.0, 0.0);
    let cfg = RunConfig {
        // no user has three browse blocks of this size
        block_browse: 100_000,
        campaigns: vec![Campaign::Tendency, Campaign::Diversity],
        ..config(tmp.path())
    };
    let inputs = load_inputs(&cfg).unwrap();
    let out = tmp.path().join("results");
    let err = analyze(&inputs, &cfg, |r| write_report(r, &out)).unwrap_err();
    assert!(matches!(err, Error::Stage { .. }), "{err}");
    assert_eq!(err.stage(), Some("diversity"));
    let saved: ExperimentReport = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(saved.tendency.len(), 2);
    assert!(saved.diversity.is_none());
    assert!(out.join("hopkins.csv").exists());
}

#[test]
fn null_population_is_not_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    small_synth(tmp.path(), 0.0, 0.0);
    let cfg = RunConfig {
        campaigns: vec![Campaign::Reinforcement],
        kinds: vec![echo_audit::logmodel::InteractionKind::Click],
        ..config(tmp.path())
    };
    let report = analyze(&load_inputs(&cfg).unwrap(), &cfg, |_| Ok(())).unwrap();
    assert_eq!(report.decisions, vec!["reinforcement: not detected (click)".to_string()]);
}
