//! The `mbgan` binary: exit codes, error messages and output files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"{
    "discriminators": 2,
    "batch_size": 32,
    "iterations": 12,
    "generator": {"latent_dim": 4, "hidden": [8], "output_dim": 2},
    "discriminator": {"input_dim": 2, "hidden": [8], "head": "logit"},
    "checkpoint_every": 6,
    "plot_every": 0,
    "metrics": {"eval_samples": 64, "intra_fid_subset": 32, "threshold_stds": 3.0}
}"#;

fn mbgan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbgan"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn invalid_config_exits_nonzero_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"optimizer": {"learning_rate": 0.1}}"#);
    let out = mbgan(&["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("optimizer.learning_rate"), "{stderr}");

    let cfg = write_config(dir.path(), r#"{"discriminators": 3}"#);
    let out = mbgan(&["dump-data", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("batch_size"));
}

#[test]
fn missing_files_exit_with_one() {
    let out = mbgan(&["run", "/nonexistent/config.json", "--out", "/tmp/unused"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_preset_is_rejected_by_the_parser() {
    let out = mbgan(&["preset", "nope"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("toy"));
}

#[test]
fn dump_data_prints_seeded_samples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = mbgan(&["dump-data", &cfg, "--n", "50"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y");
    assert_eq!(lines.len(), 51);
    for line in &lines[1..] {
        let (x, y) = line.split_once(',').unwrap();
        let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
        assert!((x.hypot(y) - 2.0).abs() < 0.2, "{line}");
    }
    assert_eq!(
        text,
        String::from_utf8(mbgan(&["dump-data", &cfg, "--n", "50"]).stdout).unwrap()
    );
}

#[test]
fn run_resume_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run_dir = dir.path().join("run");
    let run = run_dir.to_str().unwrap();
    assert!(mbgan(&["run", &cfg, "--seed", "4", "--out", run])
        .status
        .success());
    let metrics = fs::read_to_string(run_dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
    let echo = fs::read_to_string(run_dir.join("config-echo.json")).unwrap();
    assert!(echo.contains("\"seed\": 4"));

    let longer = write_config(
        dir.path(),
        &SMALL.replace("\"iterations\": 12", "\"iterations\": 18"),
    );
    let ckpt = run_dir.join("final.mbgn");
    assert!(mbgan(&["resume", ckpt.to_str().unwrap(), &longer])
        .status
        .success());
    let metrics = fs::read_to_string(run_dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().last().unwrap().split(',').next(), Some("18"));

    let svg = dir.path().join("g.svg");
    let out = mbgan(&[
        "plot",
        ckpt.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
        "--config",
        &cfg,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    roxmltree::Document::parse(&fs::read_to_string(&svg).unwrap()).unwrap();

    let broken = dir.path().join("broken.mbgn");
    let bytes = fs::read(&ckpt).unwrap();
    fs::write(&broken, &bytes[..bytes.len() / 2]).unwrap();
    let out = mbgan(&["resume", broken.to_str().unwrap(), &longer, "--out", run]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt"));
}
