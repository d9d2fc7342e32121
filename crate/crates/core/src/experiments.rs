//! Monte Carlo sweeps: ergodic secrecy capacity and visited-node complexity.
//!
//! Every `(grid point, trial)` pair draws one legitimate and one eavesdropper
//! channel and runs every requested method on that same pair. Seeds are
//!
//! ```text
//! trial  = base ^ splitmix64((point << 32) | trial)
//! H_m    = generate_rayleigh(Nr, Nt, splitmix64(trial ^ LEGITIMATE_STREAM))
//! H_e    = generate_rayleigh(Ne, Nt, splitmix64(trial ^ EAVESDROPPER_STREAM))
//! ```
//!
//! where `point` counts grid points in `Nt`, then `rho_m`, then `rho_e` order.
//! Trials run in parallel and are gathered by trial index, so the output
//! does not depend on the thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::baselines::{exhaustive_select, norm_based_result, DEFAULT_ES_CAP};
use crate::capacity::NormalizedSnr;
use crate::channel::{generate_rayleigh, ChannelMatrix, Seed};
use crate::error::{Error, Result};
use crate::search::SearchTreeShape;
use crate::selection::{Scenario, SelectOptions, SelectionProblem, SelectionResult};

pub const DEFAULT_TRIALS: usize = 2000;
/// Default `Nt` when exhaustive search is among the methods.
pub const DEFAULT_NT_WITH_ES: usize = 16;
pub const DEFAULT_NT: usize = 64;

const LEGITIMATE_STREAM: u64 = 0x6c65_6769_7469_6d61;
const EAVESDROPPER_STREAM: u64 = 0x6561_7665_7364_726f;

pub const CSV_HEADER: &str =
    "scenario,method,Nt,Nr,Ne,L,rho_m_db,rho_e_db,n_trials,mean_cs_bits,mean_nodes";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bab,
    Norm,
    Es,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bab => "bab",
            Method::Norm => "norm",
            Method::Es => "es",
        }
    }

    /// Parse a comma-separated list such as `bab,norm`.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bab" => Ok(Method::Bab),
            "norm" => Ok(Method::Norm),
            "es" => Ok(Method::Es),
            _ => Err(Error::Config(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(de: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_es_cap() -> u64 {
    DEFAULT_ES_CAP as u64
}

/// A sweep over `Nt x rho_m x rho_e`. Scalars may be given where a grid is
/// expected. An empty `Nt` grid is filled with the documented default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    #[serde(rename = "Nt", alias = "nt", default, deserialize_with = "one_or_many")]
    pub nt: Vec<usize>,
    #[serde(rename = "Nr", alias = "nr")]
    pub nr: usize,
    #[serde(rename = "Ne", alias = "ne")]
    pub ne: usize,
    #[serde(rename = "L", alias = "l")]
    pub l: usize,
    #[serde(deserialize_with = "one_or_many")]
    pub rho_m_db: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub rho_e_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_es_cap")]
    pub es_cap: u64,
    #[serde(default)]
    pub warm_start: bool,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fill defaults and check every constraint.
    pub fn validated(mut self) -> Result<Self> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods requested".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::Config("duplicate method".into()));
        }
        if self.nt.is_empty() {
            self.nt.push(if self.methods.contains(&Method::Es) {
                DEFAULT_NT_WITH_ES
            } else {
                DEFAULT_NT
            });
        }
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials must be at least 1".into()));
        }
        if self.nr == 0 || self.ne == 0 {
            return Err(Error::Config("Nr and Ne must be at least 1".into()));
        }
        if self.rho_m_db.is_empty() || self.rho_e_db.is_empty() {
            return Err(Error::Config("SNR grids must not be empty".into()));
        }
        for &db in self.rho_m_db.iter().chain(&self.rho_e_db) {
            NormalizedSnr::from_db(db)?;
        }
        for &nt in &self.nt {
            let shape =
                SearchTreeShape::new(nt, self.l).map_err(|e| Error::Config(e.to_string()))?;
            if self.methods.contains(&Method::Es) && shape.subset_count() > u128::from(self.es_cap)
            {
                return Err(Error::Budget {
                    subsets: shape.subset_count(),
                    cap: u128::from(self.es_cap),
                });
            }
        }
        Ok(self)
    }

    /// Grid points in seed order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &nt in &self.nt {
            for &rho_m_db in &self.rho_m_db {
                for &rho_e_db in &self.rho_e_db {
                    out.push(GridPoint {
                        index: out.len(),
                        nt,
                        rho_m_db,
                        rho_e_db,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub nt: usize,
    pub rho_m_db: f64,
    pub rho_e_db: f64,
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(base: Seed, point: usize, trial: usize) -> Seed {
    Seed(base.0 ^ splitmix64(((point as u64) << 32) | trial as u64))
}

/// `(H_m seed, H_e seed)` for one trial.
pub fn channel_seeds(trial: Seed) -> (Seed, Seed) {
    (
        Seed(splitmix64(trial.0 ^ LEGITIMATE_STREAM)),
        Seed(splitmix64(trial.0 ^ EAVESDROPPER_STREAM)),
    )
}

/// The channel pair of one trial.
pub fn trial_channels(
    cfg: &SweepConfig,
    point: &GridPoint,
    trial: usize,
) -> Result<(ChannelMatrix, ChannelMatrix)> {
    let (sm, se) = channel_seeds(trial_seed(Seed(cfg.seed), point.index, trial));
    Ok((
        generate_rayleigh(cfg.nr, point.nt, sm)?,
        generate_rayleigh(cfg.ne, point.nt, se)?,
    ))
}

/// One method on one channel pair.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub method: Method,
    pub result: SelectionResult,
    /// `[C_m - C_e]^+` of the chosen subset.
    pub secrecy_capacity: f64,
    pub elapsed: Duration,
}

/// All trials of one grid point; `trials[t][m]` follows `cfg.methods`.
#[derive(Clone, Debug)]
pub struct PointOutcome {
    pub point: GridPoint,
    pub trials: Vec<Vec<TrialOutcome>>,
}

/// Run `method` on an instance. Norm-based is charged `Nt` nodes and
/// exhaustive search the full tree.
pub fn run_method(
    method: Method,
    problem: &SelectionProblem<'_>,
    options: &SelectOptions,
    es_cap: u128,
) -> Result<SelectionResult> {
    match method {
        Method::Bab => problem.select(options),
        Method::Norm => norm_based_result(problem),
        Method::Es => exhaustive_select(problem, es_cap),
    }
}

fn run_trial(cfg: &SweepConfig, point: &GridPoint, trial: usize) -> Result<Vec<TrialOutcome>> {
    let (hm, he) = trial_channels(cfg, point, trial)?;
    let rho_m = NormalizedSnr::from_db(point.rho_m_db)?;
    let rho_e = NormalizedSnr::from_db(point.rho_e_db)?;
    let problem = SelectionProblem::new(cfg.scenario, &hm, Some(&he), cfg.l, rho_m, Some(rho_e))?;
    let options = SelectOptions {
        warm_start: cfg.warm_start,
        ..Default::default()
    };
    cfg.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let result = run_method(method, &problem, &options, u128::from(cfg.es_cap))?;
            let elapsed = start.elapsed();
            let secrecy_capacity = match result.secrecy_capacity {
                Some(cs) => cs,
                None => problem
                    .evaluate(&result.indices)?
                    .secrecy_capacity
                    .unwrap_or(0.0),
            };
            Ok(TrialOutcome {
                method,
                result,
                secrecy_capacity,
                elapsed,
            })
        })
        .collect()
}

/// Every trial of every grid point, unaggregated.
pub fn run_trials(cfg: &SweepConfig) -> Result<Vec<PointOutcome>> {
    let cfg = cfg.clone().validated()?;
    cfg.grid()
        .into_iter()
        .map(|point| {
            let trials = (0..cfg.n_trials)
                .into_par_iter()
                .map(|t| run_trial(&cfg, &point, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(PointOutcome { point, trials })
        })
        .collect()
}

/// One aggregated row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub scenario: Scenario,
    pub method: Method,
    #[serde(rename = "Nt")]
    pub nt: usize,
    #[serde(rename = "Nr")]
    pub nr: usize,
    #[serde(rename = "Ne")]
    pub ne: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub rho_m_db: f64,
    pub rho_e_db: f64,
    pub n_trials: usize,
    pub mean_cs_bits: f64,
    pub mean_nodes: f64,
}

/// Round to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `%.12g`-style rendering.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let rounded: f64 = sci.parse().expect("formatted float parses");
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{rounded:.decimals$}"))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Per-point, per-method sample means.
pub fn summarize(cfg: &SweepConfig, points: &[PointOutcome]) -> Vec<SweepRecord> {
    let mut records = Vec::new();
    for p in points {
        for (m, &method) in cfg.methods.iter().enumerate() {
            records.push(SweepRecord {
                scenario: cfg.scenario,
                method,
                nt: p.point.nt,
                nr: cfg.nr,
                ne: cfg.ne,
                l: cfg.l,
                rho_m_db: p.point.rho_m_db,
                rho_e_db: p.point.rho_e_db,
                n_trials: p.trials.len(),
                mean_cs_bits: round_sig12(mean(p.trials.iter().map(|t| t[m].secrecy_capacity))),
                mean_nodes: round_sig12(mean(
                    p.trials.iter().map(|t| t[m].result.visited_nodes as f64),
                )),
            });
        }
    }
    sort_records(&mut records);
    records
}

pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.nt.cmp(&b.nt))
            .then(a.nr.cmp(&b.nr))
            .then(a.ne.cmp(&b.ne))
            .then(a.l.cmp(&b.l))
            .then(a.rho_m_db.total_cmp(&b.rho_m_db))
            .then(a.rho_e_db.total_cmp(&b.rho_e_db))
            .then(a.method.cmp(&b.method))
    });
}

/// Mean secrecy capacity versus SNR.
pub fn run_ergodic_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let cfg = cfg.clone().validated()?;
    Ok(summarize(&cfg, &run_trials(&cfg)?))
}

/// Mean visited nodes versus `Nt` or SNR. Same rows as the ergodic sweep;
/// use [`node_statistics`] on [`run_trials`] output for the spread.
pub fn run_complexity_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    run_ergodic_sweep(cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeStats {
    pub point: GridPoint,
    pub method: Method,
    pub mean: f64,
    pub std_dev: f64,
    /// `std_dev / mean`.
    pub coefficient_of_variation: f64,
}

pub fn node_statistics(methods: &[Method], points: &[PointOutcome]) -> Vec<NodeStats> {
    let mut out = Vec::new();
    for p in points {
        for (m, &method) in methods.iter().enumerate() {
            let nodes: Vec<f64> = p
                .trials
                .iter()
                .map(|t| t[m].result.visited_nodes as f64)
                .collect();
            let mu = mean(nodes.iter().copied());
            let var = mean(nodes.iter().map(|v| (v - mu) * (v - mu)));
            out.push(NodeStats {
                point: p.point,
                method,
                mean: mu,
                std_dev: var.sqrt(),
                coefficient_of_variation: var.sqrt() / mu,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Json,
}

impl FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(RecordFormat::Csv),
            "json" => Ok(RecordFormat::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

/// Write records sorted by parameter point, then method.
pub fn write_records<W: Write>(
    records: &[SweepRecord],
    mut sink: W,
    format: RecordFormat,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted: Vec<SweepRecord> = records.to_vec();
    sort_records(&mut sorted);
    for r in &mut sorted {
        r.mean_cs_bits = round_sig12(r.mean_cs_bits);
        r.mean_nodes = round_sig12(r.mean_nodes);
        r.rho_m_db = round_sig12(r.rho_m_db);
        r.rho_e_db = round_sig12(r.rho_e_db);
    }
    match format {
        RecordFormat::Csv => {
            writeln!(sink, "{CSV_HEADER}")?;
            for r in &sorted {
                writeln!(
                    sink,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.scenario,
                    r.method,
                    r.nt,
                    r.nr,
                    r.ne,
                    r.l,
                    format_sig12(r.rho_m_db),
                    format_sig12(r.rho_e_db),
                    r.n_trials,
                    format_sig12(r.mean_cs_bits),
                    format_sig12(r.mean_nodes)
                )?;
            }
        }
        RecordFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, &sorted)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

pub fn read_records_json(text: &str) -> Result<Vec<SweepRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

/// One `(x, y)` series for external plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSeries {
    pub method: Method,
    /// Values of the parameters held fixed along the series.
    pub label: String,
    pub x_name: &'static str,
    pub y_name: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Split records into per-method series. Capacity sweeps plot
/// `mean_cs_bits` against the first varying axis among
/// `rho_m_db, Nt, rho_e_db`; complexity sweeps plot `mean_nodes` against the
/// first varying axis among `Nt, rho_m_db, rho_e_db`.
pub fn plot_series(records: &[SweepRecord], complexity: bool) -> Vec<PlotSeries> {
    let varies = |f: fn(&SweepRecord) -> f64| records.iter().any(|r| f(r) != f(&records[0]));
    let nt = |r: &SweepRecord| r.nt as f64;
    let rm = |r: &SweepRecord| r.rho_m_db;
    let re = |r: &SweepRecord| r.rho_e_db;
    let axes: [(&'static str, fn(&SweepRecord) -> f64); 3] = if complexity {
        [("Nt", nt), ("rho_m_db", rm), ("rho_e_db", re)]
    } else {
        [("rho_m_db", rm), ("Nt", nt), ("rho_e_db", re)]
    };
    let (x_name, x_of) = axes
        .iter()
        .copied()
        .find(|(_, f)| !records.is_empty() && varies(*f))
        .unwrap_or(axes[0]);
    let (y_name, y_of): (&'static str, fn(&SweepRecord) -> f64) = if complexity {
        ("mean_nodes", |r| r.mean_nodes)
    } else {
        ("mean_cs_bits", |r| r.mean_cs_bits)
    };

    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut series: Vec<PlotSeries> = Vec::new();
    for r in &sorted {
        let fixed: Vec<String> = axes
            .iter()
            .filter(|(name, _)| *name != x_name)
            .map(|(name, f)| format!("{name}={}", format_sig12(f(r))))
            .collect();
        let label = fixed.join(" ");
        match series
            .iter_mut()
            .find(|s| s.method == r.method && s.label == label)
        {
            Some(s) => s.points.push((x_of(r), y_of(r))),
            None => series.push(PlotSeries {
                method: r.method,
                label,
                x_name,
                y_name,
                points: vec![(x_of(r), y_of(r))],
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    series
}
