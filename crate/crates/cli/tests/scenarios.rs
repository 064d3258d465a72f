use std::path::Path;
use std::process::Command;

use bathforge_cli::output::MANIFEST_NAME;
use bathforge_cli::{run, ScenarioConfig, EXIT_OK, EXIT_SCHEMA};
use serde_json::Value;
use sha2::{Digest, Sha256};

fn config(body: &str, out: &Path) -> ScenarioConfig {
    let text = body.replace("OUT", &out.display().to_string());
    ScenarioConfig::from_json(&text).unwrap()
}

const ESTIMATE: &str = r#"{
    "kind": "Estimate",
    "params": {"n_measurements": 2000},
    "sweep": [{"name": "g_tau", "start": 5, "stop": 20, "points": 4}],
    "output_dir": "OUT",
    "seed": 41
}"#;

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&config(ESTIMATE, &a)).unwrap();
    run(&config(ESTIMATE, &b)).unwrap();
    let read = |d: &Path| std::fs::read(d.join("estimate.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    let mc: Vec<f64> = String::from_utf8(read(&a))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(mc.iter().all(|v| v.is_finite() && *v > 0.0));

    let other = dir.path().join("c");
    run(&config(&ESTIMATE.replace("41", "42"), &other)).unwrap();
    assert_ne!(read(&a), read(&other));
}

#[test]
fn engine_sweep_writes_every_point_and_the_crossover() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        r#"{"kind": "Engine", "output_dir": "OUT", "plot": true,
            "sweep": [{"name": "omega_mod", "start": 0.05, "stop": 9.95, "points": 200}]}"#,
        dir.path(),
    );
    let out = run(&c).unwrap();
    assert_eq!(out.exit_code(), EXIT_OK);
    let text = std::fs::read_to_string(dir.path().join("engine.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# omega_mod[freq],p_excited[-]"));
    assert_eq!(lines.count(), 200);
    let summary: Value = serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    let record = &summary["records"][0];
    assert_eq!(record[0], "omega_crit");
    assert!((record[1].as_f64().unwrap() - 6.0).abs() < 1e-12);
}

#[test]
fn manifest_hashes_every_written_file() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        r#"{"kind": "Zeno", "output_dir": "OUT", "plot": true,
            "sweep": [{"name": "tau", "start": 0.01, "stop": 1000, "points": 9, "scale": "log"}]}"#,
        dir.path(),
    );
    run(&c).unwrap();
    let manifest: Value = serde_json::from_slice(&std::fs::read(dir.path().join(MANIFEST_NAME)).unwrap()).unwrap();
    assert_eq!(manifest["config_sha256"], c.hash());
    let listed: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    let mut on_disk: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != MANIFEST_NAME)
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for f in manifest["files"].as_array().unwrap() {
        let bytes = std::fs::read(dir.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"], hex::encode(Sha256::digest(&bytes)));
    }
}

fn bathforge() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bathforge"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "Warp", "output_dir": "x"}"#).unwrap();
    let out = bathforge().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_SCHEMA as i32));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`kind`"));

    let partial = dir.path().join("partial.json");
    std::fs::write(
        &partial,
        format!(
            r#"{{"kind": "Rddi", "output_dir": {:?}, "sweep": [{{"name": "omega_a", "start": 0.5, "stop": 1.5, "points": 3}}]}}"#,
            dir.path().join("rddi")
        ),
    )
    .unwrap();
    let out = bathforge().arg("run").arg(&partial).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("rddi/rddi.csv").exists());

    let out = bathforge().args(["reproduce", "fig9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_SCHEMA as i32));
}

#[test]
fn worker_count_does_not_change_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for workers in ["1", "3"] {
        let out_dir = dir.path().join(workers);
        let cfg = dir.path().join(format!("{workers}.json"));
        std::fs::write(
            &cfg,
            format!(
                r#"{{"kind": "Casimir", "output_dir": {out_dir:?},
                    "sweep": [{{"name": "z", "start": 0.01, "stop": 300, "points": 24, "scale": "log"}}]}}"#
            ),
        )
        .unwrap();
        let status = bathforge().arg("run").arg(&cfg).env("BATHFORGE_WORKERS", workers).status().unwrap();
        assert!(status.success());
        tables.push(std::fs::read(out_dir.join("casimir.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn figure_preset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bathforge().args(["reproduce", "Fig7d", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
    for f in ["fig7d.csv", "fig7d.svg", "checks.json", MANIFEST_NAME] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
