mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::{payload_files, run_in, SMALL};
use conewave_cli::{run_experiment, CliError, ExperimentConfig, ExperimentKind, Format, Overrides};
use serde_json::Value as Json;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conewave"))
}

fn read_manifest(dir: &Path) -> Json {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn manifest_checksums_match_files() {
    for (kind, text) in SMALL.iter().filter(|(k, _)| *k != ExperimentKind::Constants) {
        let dir = TempDir::new().unwrap();
        run_in(dir.path(), *kind, text, 2);
        let m = read_manifest(dir.path());
        assert_eq!(m["complete"], Json::Bool(true));
        assert_eq!(m["experiment"], kind.name());
        let listed: Vec<&Json> = m["files"].as_array().unwrap().iter().collect();
        let files = payload_files(dir.path());
        assert_eq!(listed.len(), files.len());
        for entry in listed {
            let body = &files[entry["path"].as_str().unwrap()];
            assert_eq!(entry["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(body)));
            let lines: Vec<&str> = std::str::from_utf8(body).unwrap().lines().skip(1).collect();
            let records = entry["record_sha256"].as_array().unwrap();
            assert_eq!(records.len(), lines.len());
            for (line, h) in lines.iter().zip(records) {
                assert_eq!(h.as_str().unwrap(), hex::encode(Sha256::digest(line.as_bytes())));
            }
        }
    }
}

#[test]
fn csv_floats_parse_back_exactly() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), ExperimentKind::Scaling, SMALL[4].1, 1);
    let text = fs::read_to_string(dir.path().join("scaling.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "ratio").unwrap();
    let parsed: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(parsed, common::floats(out.table("scaling").unwrap(), "ratio"));
}

#[test]
fn json_output_is_one_record_per_line() {
    let dir = TempDir::new().unwrap();
    let over = Overrides {
        seed: Some(4),
        workers: Some(1),
        out: Some(dir.path().to_path_buf()),
        format: Some(Format::Json),
    };
    let cfg = ExperimentConfig::parse(ExperimentKind::Ledger, "[ledger]\nr = [\"2\"]\n", &over).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let text = fs::read_to_string(dir.path().join("ledger.json")).unwrap();
    let rows: Vec<Json> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), out.tables[0].rows().len());
    assert_eq!(text.lines().count(), rows.len() + 2);
    assert!(rows.iter().all(|r| r["r"] == "2/1" && r["feasible"].is_boolean()));
}

#[test]
fn ledger_rows_follow_the_boundary() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), ExperimentKind::Ledger, "seed = 1\n[ledger]\nr = [\"8/5\", \"2\"]\n", 1);
    let t = out.table("ledger").unwrap();
    let text = fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    // boundaries 31/16 and 7/4 appear as infeasible rows
    assert!(text.contains("8/5,31/16,false"));
    assert!(text.contains("2/1,7/4,false"));
    assert!(text.contains("2/1,44/25,true"));
    assert!(t.rows().len() > 40);
}

#[test]
fn binary_runs_and_prints_the_manifest_path() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["ledger", "--seed", "3", "--workers", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let printed = String::from_utf8(out.stdout).unwrap();
    assert_eq!(Path::new(printed.trim()), dir.path().join("manifest.json"));
    assert_eq!(read_manifest(dir.path())["seed"], 3);
}

#[test]
fn missing_seed_is_a_json_error() {
    let dir = TempDir::new().unwrap();
    let out = bin().args(["ledger", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Json = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert_eq!(err["error"]["key"], "seed");
}

#[test]
fn empty_n_list_is_rejected_by_the_binary() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "seed = 1\n[constants]\nn = []\n").unwrap();
    let out = bin().arg("constants").arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Json = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"]["key"], "constants.n");
    assert_eq!(err["error"]["line"], 3);
}

#[test]
fn unreadable_config_is_an_io_error() {
    let out = bin().args(["ledger", "--seed", "1", "--config", "/nonexistent/c.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Json = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"]["kind"], "io");
}

#[test]
fn failed_runs_leave_an_incomplete_manifest() {
    let dir = TempDir::new().unwrap();
    let over = Overrides {
        seed: Some(1),
        workers: Some(1),
        out: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    // a period too small for the band limit leaves no admissible modes
    let text = "[solve]\nn = 8\ndata = \"random\"\nband_limit = 100\n";
    let cfg = ExperimentConfig::parse(ExperimentKind::Solve, text, &over).unwrap();
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, CliError::Core(_)));
    let m = read_manifest(dir.path());
    assert_eq!(m["complete"], false);
    assert_eq!(m["error"]["kind"], "computation");
}

#[test]
fn unknown_keys_fail_before_any_output() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "seed = 1\n[ledger]\nrr = [\"2\"]\n").unwrap();
    let out_dir = dir.path().join("o");
    let out = bin().arg("ledger").arg("--config").arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
}
