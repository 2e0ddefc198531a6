use std::fs;
use std::path::{Path, PathBuf};

use lacewalk::main_with_args;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.json");
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> i32 {
    let mut all = vec!["lacewalk"];
    all.extend_from_slice(args);
    main_with_args(all)
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

const NN2: &str = r#"{"schema": 1, "dimension": 2, "kappa": 0, "step": {"family": "nearest-neighbor"}}"#;

#[test]
fn verify_passes_for_simple_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NN2);
    let out = dir.path().join("out");
    let code = run(&["verify", "--config", cfg.to_str().unwrap(), "--nmax", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(files(&out).iter().any(|p| p.extension().is_some_and(|e| e == "json")));
}

#[test]
fn enumerate_writes_c2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NN2);
    let out = dir.path().join("out");
    let code = run(&["enumerate", "--config", cfg.to_str().unwrap(), "--nmax", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = files(&out)
        .into_iter()
        .find(|p| {
            let name = p.file_name().unwrap().to_str().unwrap();
            name.starts_with("enumerate-") && name.ends_with(".csv") && !name.contains("-fields")
        })
        .unwrap();
    let text = fs::read_to_string(csv).unwrap();
    let row = text.lines().find(|l| l.starts_with("2,")).unwrap();
    assert_eq!(row.split(',').nth(1).unwrap(), "0.75");
}

#[test]
fn malformed_config_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"schema\": 1,\n  \"dimension\": ,\n}");
    let err = lacewalk::config::load(&cfg).unwrap_err();
    assert!(err.to_string().contains(":3:"), "{err}");
    let out = dir.path().join("out");
    assert_eq!(run(&["enumerate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    assert!(!out.exists() || files(&out).is_empty());
}

#[test]
fn unknown_family_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"schema": 1, "dimension": 1, "kappa": 0, "step": {"family": "levy"}}"#);
    assert_eq!(run(&["enumerate", "--config", cfg.to_str().unwrap()]), 2);
}

#[test]
fn budget_exhaustion_leaves_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NN2);
    let out = dir.path().join("out");
    let code = run(&[
        "enumerate",
        "--config",
        cfg.to_str().unwrap(),
        "--nmax",
        "8",
        "--budget",
        "1e3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert!(!out.exists() || files(&out).is_empty());
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema": 1, "dimension": 1, "kappa": "1/50", "step": {"family": "exponential", "L": 1, "cutoff": 2}, "arithmetic": "rational"}"#,
    );
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        let code = run(&["lace", "--config", cfg.to_str().unwrap(), "--nmax", "4", "--threads", threads, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        outputs.push(
            files(&out)
                .into_iter()
                .map(|p| (p.file_name().unwrap().to_owned(), fs::read(&p).unwrap()))
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sample_accepts_scientific_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NN2);
    let out = dir.path().join("out");
    let code = run(&["sample", "--config", cfg.to_str().unwrap(), "--n", "4", "--count", "1e4", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let json = files(&out).into_iter().find(|p| p.extension().is_some_and(|e| e == "json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert!(v.to_string().contains("10000"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&["sample", "--config", "x.json", "--n", "3", "--count", "lots"]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
}
