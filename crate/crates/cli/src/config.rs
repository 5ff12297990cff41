//! Experiment configuration: a TOML document with top-level `seed`, `workers`, `out`,
//! `format` and one optional section per experiment.

use std::collections::BTreeSet;
use std::path::PathBuf;

use conewave_core::rational::{int, rat};
use conewave_core::solver::{NonlinearityKind, SolverConfig};
use conewave_core::volume::VolumeCase;
use conewave_core::{grid::check_dyadic, parse_rational, Rational, Sign};
use toml::{Table, Value};

use crate::error::{CliError, Result};
use crate::output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Volumes,
    Constants,
    Ledger,
    Solve,
    Scaling,
    Strichartz,
}

impl ExperimentKind {
    pub const ALL: [Self; 6] = [
        Self::Volumes,
        Self::Constants,
        Self::Ledger,
        Self::Solve,
        Self::Scaling,
        Self::Strichartz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Volumes => "volumes",
            Self::Constants => "constants",
            Self::Ledger => "ledger",
            Self::Solve => "solve",
            Self::Scaling => "scaling",
            Self::Strichartz => "strichartz",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumesConfig {
    pub cases: Vec<VolumeCase>,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsConfig {
    pub signs: Vec<[Sign; 3]>,
    /// `N1` values of the HLH sweep.
    pub n: Vec<f64>,
    /// `L1` values of the small-`L2` sweep.
    pub l1: Vec<f64>,
    pub r: Rational,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerConfig {
    pub r: Vec<Rational>,
    /// Explicit `s` grid; empty means a grid around each boundary.
    pub s: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    SingleMode,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub n: usize,
    pub period: f64,
    pub kind: NonlinearityKind,
    pub data: DataKind,
    pub amplitude: f64,
    pub s: f64,
    pub r: f64,
    pub band_limit: f64,
    pub solver: SolverConfig,
    pub amplitudes: Vec<f64>,
    pub bisection_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub pairs: Vec<(Rational, Rational)>,
    pub lambdas: Vec<f64>,
    pub n: usize,
    pub band_limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzConfig {
    pub ensemble: usize,
    pub q_t: f64,
    pub ladder: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub format: Format,
    pub volumes: VolumesConfig,
    pub constants: ConstantsConfig,
    pub ledger: LedgerConfig,
    pub solve: SolveConfig,
    pub scaling: ScalingConfig,
    pub strichartz: StrichartzConfig,
    /// The parsed document, echoed into the manifest.
    pub document: Table,
}

/// Values supplied on the command line; they win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Line (1-based) of `key` inside `[section]`, or among the top-level keys.
fn locate(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            current = Some(t.trim_matches(|c| c == '[' || c == ']').trim().to_string());
            if section == current.as_deref() && key.is_empty() {
                return Some(i + 1);
            }
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        if let Some(rest) = t.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return Some(i + 1);
            }
        }
    }
    None
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Reader<'a> {
    text: &'a str,
    section: Option<&'static str>,
    table: Option<&'a Table>,
    used: BTreeSet<&'static str>,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, section: Option<&'static str>, table: Option<&'a Table>) -> Self {
        Self {
            text,
            section,
            table,
            used: BTreeSet::new(),
        }
    }

    fn full_key(&self, key: &str) -> String {
        match self.section {
            Some(s) => format!("{s}.{key}"),
            None => key.to_string(),
        }
    }

    fn err(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            line: locate(self.text, self.section, key),
            key: self.full_key(key),
            message: message.into(),
        }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.insert(key);
        self.table.and_then(|t| t.get(key))
    }

    fn get<T>(&mut self, key: &'static str, default: T, conv: impl Fn(&Value) -> Option<T>, what: &str) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => conv(v).ok_or_else(|| self.err(key, format!("expected {what}"))),
        }
    }

    fn u64(&mut self, key: &'static str, default: u64) -> Result<u64> {
        self.get(key, default, |v| v.as_integer().and_then(|i| u64::try_from(i).ok()), "a non-negative integer")
    }

    fn usize(&mut self, key: &'static str, default: usize) -> Result<usize> {
        self.get(key, default, as_usize, "a non-negative integer")
    }

    fn f64(&mut self, key: &'static str, default: f64) -> Result<f64> {
        self.get(key, default, as_f64, "a number")
    }

    fn bool(&mut self, key: &'static str, default: bool) -> Result<bool> {
        self.get(key, default, Value::as_bool, "a boolean")
    }

    fn string(&mut self, key: &'static str, default: &str) -> Result<String> {
        self.get(key, default.to_string(), |v| v.as_str().map(str::to_string), "a string")
    }

    fn rational(&mut self, key: &'static str, default: Rational) -> Result<Rational> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => as_rational(v).map_err(|m| self.err(key, m)),
        }
    }

    fn list<T>(&mut self, key: &'static str, default: Vec<T>, conv: impl Fn(&Value) -> std::result::Result<T, String>) -> Result<Vec<T>> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| conv(v).map_err(|m| self.err(key, m)))
                .collect(),
            Some(_) => Err(self.err(key, "expected an array")),
        }
    }

    /// Rejects keys nobody asked for.
    fn finish(self) -> Result<()> {
        if let Some(t) = self.table {
            for (k, v) in t {
                if self.used.contains(k.as_str()) {
                    continue;
                }
                if self.section.is_none() && v.is_table() {
                    continue;
                }
                return Err(self.err(k, "unknown key"));
            }
        }
        Ok(())
    }
}

fn as_usize(v: &Value) -> Option<usize> {
    v.as_integer().and_then(|i| usize::try_from(i).ok())
}

fn as_f64(v: &Value) -> Option<f64> {
    v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
}

fn as_rational(v: &Value) -> std::result::Result<Rational, String> {
    match v {
        Value::Integer(i) => Ok(int(*i)),
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        Value::Float(_) => Err("write rationals as strings such as \"3/2\" or integers".into()),
        _ => Err("expected a rational".into()),
    }
}

fn dyadic_list(v: &Value) -> std::result::Result<f64, String> {
    let x = as_f64(v).ok_or("expected a number")?;
    check_dyadic("value", x).map_err(|e| e.to_string())?;
    Ok(x)
}

fn parse_signs(s: &str) -> Option<[Sign; 3]> {
    let signs: Vec<Sign> = s
        .chars()
        .map(|c| match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        })
        .collect::<Option<_>>()?;
    signs.try_into().ok()
}

pub fn sign_pattern(signs: &[Sign; 3]) -> String {
    signs.iter().map(|s| s.symbol()).collect()
}

/// Fifty rationals `3/2 + k/100`, `k = 1..=50`, ending at `r = 2`.
pub fn default_r_grid() -> Vec<Rational> {
    (1..=50).map(|k| rat(3, 2) + rat(k, 100)).collect()
}

fn parse_format(s: &str) -> Option<Format> {
    match s {
        "csv" => Some(Format::Csv),
        "json" => Some(Format::Json),
        _ => None,
    }
}

impl ExperimentConfig {
    /// Parses `text` (possibly empty) for experiment `kind`, applying `over` last.
    pub fn parse(kind: ExperimentKind, text: &str, over: &Overrides) -> Result<Self> {
        let doc: Table = toml::from_str(text).map_err(|e| CliError::Config {
            line: e.span().map(|s| line_of(text, s.start)),
            key: String::new(),
            message: e.message().to_string(),
        })?;
        for (k, v) in &doc {
            if v.is_table() && !ExperimentKind::ALL.iter().any(|e| e.name() == k) {
                return Err(CliError::Config {
                    line: locate(text, Some(k), ""),
                    key: k.clone(),
                    message: "unknown section".into(),
                });
            }
        }
        let section = |name: &'static str| -> Result<Option<&Table>> {
            match doc.get(name) {
                None => Ok(None),
                Some(Value::Table(t)) => Ok(Some(t)),
                Some(_) => Err(CliError::Config {
                    line: locate(text, None, name),
                    key: name.into(),
                    message: "expected a section".into(),
                }),
            }
        };

        let mut top = Reader::new(text, None, Some(&doc));
        let file_seed = match top.raw("seed") {
            None => None,
            Some(v) => Some(
                v.as_integer()
                    .and_then(|i| u64::try_from(i).ok())
                    .ok_or_else(|| top.err("seed", "expected a non-negative integer"))?,
            ),
        };
        let seed = over
            .seed
            .or(file_seed)
            .ok_or_else(|| top.err("seed", "a seed is mandatory (config `seed` or --seed)"))?;
        let file_workers = top.usize("workers", 0)?;
        let out = top.string("out", "results")?;
        let format_name = top.string("format", "csv")?;
        let format = parse_format(&format_name).ok_or_else(|| top.err("format", "expected \"csv\" or \"json\""))?;
        top.finish()?;
        let workers = over
            .workers
            .or_else(env_workers)
            .or((file_workers > 0).then_some(file_workers))
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return Err(top_err(text, "workers", "must be positive"));
        }

        let volumes = parse_volumes(text, section("volumes")?)?;
        let constants = parse_constants(text, section("constants")?)?;
        let ledger = parse_ledger(text, section("ledger")?)?;
        let solve = parse_solve(text, section("solve")?)?;
        let scaling = parse_scaling(text, section("scaling")?)?;
        let strichartz = parse_strichartz(text, section("strichartz")?)?;

        Ok(Self {
            kind,
            seed,
            out: over.out.clone().unwrap_or_else(|| PathBuf::from(out)),
            workers,
            format: over.format.unwrap_or(format),
            volumes,
            constants,
            ledger,
            solve,
            scaling,
            strichartz,
            document: doc,
        })
    }
}

fn top_err(text: &str, key: &str, message: &str) -> CliError {
    CliError::Config {
        line: locate(text, None, key),
        key: key.into(),
        message: message.into(),
    }
}

/// Positive `CONEWAVE_WORKERS`, if set.
pub fn env_workers() -> Option<usize> {
    std::env::var("CONEWAVE_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
}

fn parse_volumes(text: &str, t: Option<&Table>) -> Result<VolumesConfig> {
    let mut r = Reader::new(text, Some("volumes"), t);
    let names: Vec<&str> = VolumeCase::ALL.iter().map(|c| c.name()).collect();
    let cases = r.list(
        "cases",
        vec![VolumeCase::HlhEasy, VolumeCase::HlhHard],
        |v| {
            let s = v.as_str().ok_or("expected case names")?;
            VolumeCase::parse(s).ok_or(format!("unknown case `{s}`, expected one of {names:?}"))
        },
    )?;
    let samples = r.u64("samples", 1_000_000)?;
    if cases.is_empty() {
        return Err(r.err("cases", "at least one case is required"));
    }
    if samples < 1000 {
        return Err(r.err("samples", "use at least 1000 samples per point"));
    }
    r.finish()?;
    Ok(VolumesConfig { cases, samples })
}

/// Largest dyadic parameter whose regions stay clear of wrap-around on the constants lattice.
const CONSTANTS_MAX_DYADIC: f64 = 4.0;

fn parse_constants(text: &str, t: Option<&Table>) -> Result<ConstantsConfig> {
    let mut r = Reader::new(text, Some("constants"), t);
    let signs = r.list(
        "signs",
        vec![[Sign::Plus; 3], [Sign::Plus, Sign::Plus, Sign::Minus]],
        |v| {
            let s = v.as_str().ok_or("expected sign patterns such as \"++-\"")?;
            parse_signs(s).ok_or(format!("bad sign pattern `{s}`"))
        },
    )?;
    let n = r.list("n", vec![1.0, 2.0, 4.0], dyadic_list)?;
    let l1 = r.list("l1", vec![1.0, 2.0, 4.0], dyadic_list)?;
    let rr = r.rational("r", int(2))?;
    let restarts = r.usize("restarts", 8)?;
    let max_iters = r.usize("max_iters", 500)?;
    let tol = r.f64("tol", 1e-9)?;
    for (key, list) in [("n", &n), ("l1", &l1)] {
        if list.is_empty() {
            return Err(r.err(key, "the list must not be empty"));
        }
        if list.iter().any(|&v| v > CONSTANTS_MAX_DYADIC) {
            return Err(r.err(key, format!("values above {CONSTANTS_MAX_DYADIC} do not fit the constants lattice")));
        }
    }
    if signs.is_empty() {
        return Err(r.err("signs", "the list must not be empty"));
    }
    if !(rr > int(1) && rr <= int(2)) {
        return Err(r.err("r", "r must lie in (1, 2]"));
    }
    if restarts == 0 || max_iters == 0 || !(tol > 0.0) {
        return Err(r.err("restarts", "restarts, max_iters and tol must be positive"));
    }
    r.finish()?;
    Ok(ConstantsConfig {
        signs,
        n,
        l1,
        r: rr,
        restarts,
        max_iters,
        tol,
    })
}

fn parse_ledger(text: &str, t: Option<&Table>) -> Result<LedgerConfig> {
    let mut r = Reader::new(text, Some("ledger"), t);
    let rs = r.list("r", default_r_grid(), as_rational)?;
    let s = r.list("s", vec![], as_rational)?;
    if rs.is_empty() {
        return Err(r.err("r", "the list must not be empty"));
    }
    if rs.iter().any(|x| !(*x > int(1) && *x <= int(2))) {
        return Err(r.err("r", "every r must lie in (1, 2]"));
    }
    r.finish()?;
    Ok(LedgerConfig { r: rs, s })
}

fn parse_solve(text: &str, t: Option<&Table>) -> Result<SolveConfig> {
    let mut r = Reader::new(text, Some("solve"), t);
    let n = r.usize("n", 32)?;
    let period = r.f64("period", std::f64::consts::TAU)?;
    let kind_name = r.string("kind", NonlinearityKind::FullGradSquare.name())?;
    let kind = NonlinearityKind::parse(&kind_name).ok_or_else(|| r.err("kind", format!("unknown nonlinearity `{kind_name}`")))?;
    let data_name = r.string("data", "single_mode")?;
    let data = match data_name.as_str() {
        "single_mode" => DataKind::SingleMode,
        "random" => DataKind::Random,
        _ => return Err(r.err("data", "expected \"single_mode\" or \"random\"")),
    };
    let amplitude = r.f64("amplitude", 1e-3)?;
    let s = r.f64("s", 1.75)?;
    let rr = r.f64("r", 2.0)?;
    let band_limit = r.f64("band_limit", (n / 3) as f64)?;
    let d = SolverConfig::default();
    let solver = SolverConfig {
        t_final: r.f64("t_final", d.t_final)?,
        n_steps: r.usize("n_steps", d.n_steps)?,
        picard_tol: r.f64("picard_tol", d.picard_tol)?,
        picard_max: r.usize("picard_max", d.picard_max)?,
        dealias: r.bool("dealias", d.dealias)?,
        rk4_substeps: r.usize("rk4_substeps", d.rk4_substeps)?,
    };
    let amplitudes = r.list("amplitudes", vec![], |v| as_f64(v).ok_or_else(|| "expected numbers".to_string()))?;
    let bisection_steps = r.usize("bisection_steps", 12)?;
    if let Err(e) = solver.validate() {
        return Err(r.err("t_final", e.to_string()));
    }
    if !(n.is_power_of_two() && n >= 8) {
        return Err(r.err("n", "grid size must be a power of two, at least 8"));
    }
    if !(rr > 1.0 && rr <= 2.0) {
        return Err(r.err("r", "r must lie in (1, 2]"));
    }
    if !(amplitude.is_finite()) {
        return Err(r.err("amplitude", "must be finite"));
    }
    r.finish()?;
    Ok(SolveConfig {
        n,
        period,
        kind,
        data,
        amplitude,
        s,
        r: rr,
        band_limit,
        solver,
        amplitudes,
        bisection_steps,
    })
}

fn parse_scaling(text: &str, t: Option<&Table>) -> Result<ScalingConfig> {
    let mut r = Reader::new(text, Some("scaling"), t);
    let pairs = r.list("pairs", vec![(rat(7, 4), int(2)), (int(2), rat(3, 2))], |v| {
        let items = v.as_array().filter(|a| a.len() == 2).ok_or("expected [s, r] pairs")?;
        Ok((as_rational(&items[0])?, as_rational(&items[1])?))
    })?;
    let lambdas = r.list("lambdas", vec![2.0, 4.0], dyadic_list)?;
    let n = r.usize("n", 64)?;
    let band_limit = r.f64("band_limit", (n / 4) as f64)?;
    if pairs.is_empty() || lambdas.is_empty() {
        return Err(r.err("pairs", "pairs and lambdas must not be empty"));
    }
    if !(n.is_power_of_two() && n >= 8) {
        return Err(r.err("n", "grid size must be a power of two, at least 8"));
    }
    r.finish()?;
    Ok(ScalingConfig {
        pairs,
        lambdas,
        n,
        band_limit,
    })
}

fn parse_strichartz(text: &str, t: Option<&Table>) -> Result<StrichartzConfig> {
    let mut r = Reader::new(text, Some("strichartz"), t);
    let ensemble = r.usize("ensemble", 16)?;
    let q_t = r.f64("q_t", 6.0)?;
    let ladder = r.list("ladder", vec![32, 64, 128, 256], |v| as_usize(v).ok_or_else(|| "expected grid sizes".to_string()))?;
    if ensemble == 0 {
        return Err(r.err("ensemble", "must be positive"));
    }
    if !(q_t >= 4.0 && q_t.is_finite()) {
        return Err(r.err("q_t", "must be finite and at least 4"));
    }
    if ladder.len() < 3 || ladder.iter().any(|n| !n.is_power_of_two() || *n < 8) {
        return Err(r.err("ladder", "need at least three power-of-two grid sizes"));
    }
    r.finish()?;
    Ok(StrichartzConfig { ensemble, q_t, ladder })
}
