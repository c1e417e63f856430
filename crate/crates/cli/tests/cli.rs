//! End-to-end tests of the `ordsec` binary: output contracts, determinism,
//! and the exit-code mapping.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use ordsec_core::harness::{serialize_config, ExperimentConfig, ProblemKind};

fn ordsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordsec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ordsec-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

#[test]
fn gen_is_deterministic_and_writes_files() {
    let args = ["gen", "--problem", "bipartite", "--n", "3", "--seed", "7"];
    let first = stdout_of(&ordsec(&args));
    let second = stdout_of(&ordsec(&args));
    assert_eq!(first, second);
    assert!(first.starts_with("ordsec v1 bipartite\n"));

    let path = scratch("gen.ordsec");
    let out = ordsec(&[
        "gen", "--problem", "bipartite", "--n", "3", "--seed", "7", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&path).unwrap(), first);

    // A different seed yields a different instance.
    let other = stdout_of(&ordsec(&["gen", "--problem", "bipartite", "--n", "3", "--seed", "8"]));
    assert_ne!(first, other);
}

#[test]
fn verify_accepts_generated_instance_files() {
    let path = scratch("verify.ordsec");
    for problem in ["bipartite", "general", "packing", "graph", "unit-disk", "matroid"] {
        let out = ordsec(&[
            "gen", "--problem", problem, "--n", "5", "--seed", "3", "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "gen {problem} failed");
        let text = stdout_of(&ordsec(&[
            "verify",
            "--instance",
            path.to_str().unwrap(),
            "--trials",
            "40",
        ]));
        assert!(text.contains("property parse round-trip: ok"), "{problem}: {text}");
        assert!(text.contains("property exact-optimum: ok"), "{problem}: {text}");
        assert!(!text.contains("FAILED"), "{problem}: {text}");
    }
}

#[test]
fn run_emits_the_fixed_csv_schema() {
    let text = stdout_of(&ordsec(&[
        "run", "--problem", "bipartite", "--n", "4", "--trials", "20", "--instances", "2",
        "--seed", "5", "--format", "csv",
    ]));
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("experiment,instance,trial,seed,alg_value,opt_value,feasible")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 40);
    for row in &rows {
        assert_eq!(row.split(',').count(), 7);
        assert!(row.starts_with("exp,"));
        assert!(row.ends_with(",true"));
    }
    // Byte-identical replay.
    let again = stdout_of(&ordsec(&[
        "run", "--problem", "bipartite", "--n", "4", "--trials", "20", "--instances", "2",
        "--seed", "5", "--format", "csv",
    ]));
    assert_eq!(text, again);
}

#[test]
fn run_from_config_file_matches_inline_flags() {
    let mut cfg = ExperimentConfig::new(ProblemKind::General, 6, 15, 11).unwrap();
    cfg.id = "filecfg".into();
    cfg.instances = 2;
    cfg.gen.edge_prob = 0.7;
    let path = scratch("run.config");
    fs::write(&path, serialize_config(&cfg)).unwrap();

    let from_file = stdout_of(&ordsec(&[
        "run", "--config", path.to_str().unwrap(), "--format", "csv",
    ]));
    let from_flags = stdout_of(&ordsec(&[
        "run", "--problem", "general", "--id", "filecfg", "--n", "6", "--trials", "15",
        "--instances", "2", "--seed", "11", "--edge-prob", "0.7", "--format", "csv",
    ]));
    assert_eq!(from_file, from_flags);
}

#[test]
fn run_summary_echoes_the_config() {
    let text = stdout_of(&ordsec(&[
        "run", "--problem", "unit-disk", "--n", "6", "--trials", "30", "--seed", "2",
    ]));
    assert!(text.contains("config problem: unit-disk"), "{text}");
    assert!(text.contains("config algorithm: sample-and-price"), "{text}");
    assert!(text.contains("mean ratio"), "{text}");
    assert!(text.contains("max ratio"), "{text}");
}

#[test]
fn lower_bound_reports_the_best_cutoff() {
    let text = stdout_of(&ordsec(&[
        "lower-bound", "--n", "16", "--k", "4", "--trials", "400", "--seed", "1",
    ]));
    assert!(text.contains("config n 16"), "{text}");
    assert!(text.contains("config k 4"), "{text}");
    assert!(text.contains("best position"), "{text}");
    assert!(text.contains("ratio"), "{text}");

    let csv = stdout_of(&ordsec(&[
        "lower-bound", "--n", "16", "--k", "4", "--trials", "100", "--format", "csv",
    ]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("position,expected_value"));
    assert_eq!(lines.count(), 17); // one row per cutoff position 1..=n+1
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    // Unknown problem kind: invalid configuration.
    let out = ordsec(&["run", "--problem", "nope", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed instance file: parse error.
    let path = scratch("broken.ordsec");
    fs::write(&path, "ordsec v1 bipartite\nleft: x\n").unwrap();
    let out = ordsec(&["verify", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    // Exact oracle capability exceeded: general matching is limited to
    // small vertex counts.
    let out = ordsec(&["verify", "--problem", "general", "--n", "20", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(4));

    // The family parameters must divide: invalid configuration.
    let out = ordsec(&["lower-bound", "--n", "10", "--k", "4"]);
    assert_eq!(out.status.code(), Some(2));

    // Conflicting flags are a usage error (clap exits 2).
    let out = ordsec(&["run", "--config", "x", "--problem", "bipartite", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matroid_experiments_are_rejected_with_guidance() {
    let out = ordsec(&["run", "--problem", "matroid", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("threshold sweep"), "{stderr}");
}
