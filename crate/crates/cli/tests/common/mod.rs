#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use conewave_cli::{run_experiment, ExperimentConfig, ExperimentKind, Overrides, RunOutput, Table, Value};

pub fn run_in(dir: &Path, kind: ExperimentKind, text: &str, workers: usize) -> RunOutput {
    let over = Overrides {
        workers: Some(workers),
        out: Some(dir.to_path_buf()),
        ..Default::default()
    };
    let cfg = ExperimentConfig::parse(kind, text, &over).expect("config parses");
    run_experiment(&cfg).expect("experiment runs")
}

/// Every file of an output directory except the manifest, which carries timestamps.
pub fn payload_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

pub fn column<'a>(t: &'a Table, name: &str) -> Vec<&'a Value> {
    let i = t
        .columns()
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("table {} has no column {name}", t.name));
    t.rows().iter().map(|r| &r[i]).collect()
}

pub fn floats(t: &Table, name: &str) -> Vec<f64> {
    column(t, name)
        .into_iter()
        .map(|v| match v {
            Value::Float(x) => *x,
            other => panic!("{name}: expected a float, got {other:?}"),
        })
        .collect()
}

pub fn texts(t: &Table, name: &str) -> Vec<String> {
    column(t, name)
        .into_iter()
        .map(|v| match v {
            Value::Text(s) => s.clone(),
            other => panic!("{name}: expected text, got {other:?}"),
        })
        .collect()
}

/// Small configurations that exercise every experiment in a few seconds.
pub const SMALL: [(ExperimentKind, &str); 6] = [
    (ExperimentKind::Volumes, "seed = 11\n[volumes]\ncases = [\"hlh_easy\"]\nsamples = 2000\n"),
    (
        ExperimentKind::Constants,
        "seed = 12\n[constants]\nsigns = [\"+++\", \"++-\"]\nn = [1, 2, 4]\nl1 = [1, 2, 4]\nrestarts = 1\nmax_iters = 20\n",
    ),
    (ExperimentKind::Ledger, "seed = 13\n[ledger]\nr = [\"8/5\", \"7/4\", \"2\"]\n"),
    (
        ExperimentKind::Solve,
        "seed = 14\n[solve]\nn = 16\nn_steps = 16\ndata = \"random\"\nband_limit = 4\namplitudes = [1, 10, 100]\nbisection_steps = 4\n",
    ),
    (ExperimentKind::Scaling, "seed = 15\n[scaling]\nn = 16\nband_limit = 3\n"),
    (ExperimentKind::Strichartz, "seed = 16\n[strichartz]\nensemble = 2\nladder = [8, 16, 32]\n"),
];
