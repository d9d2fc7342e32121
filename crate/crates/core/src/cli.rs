//! Command-line front end.
//!
//! Every SNR flag is the *normalized* SNR in dB, i.e. the per-receive-antenna
//! SNR already divided by the number of selected antennas `L`.
//!
//! Exit codes: 0 success, 2 usage/config/file error, 3 numerical error,
//! 4 exhaustive-search budget refusal.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::baselines::DEFAULT_ES_CAP;
use crate::capacity::NormalizedSnr;
use crate::channel::{generate_rayleigh, ChannelMatrix, MatrixFormat, Seed};
use crate::error::{Error, Result};
use crate::experiments::{
    channel_seeds, format_sig12, plot_series, run_trials, summarize, write_records, Method,
    RecordFormat, SweepConfig, DEFAULT_TRIALS,
};
use crate::search::SearchTreeShape;
use crate::selection::{Scenario, SelectOptions, SelectionProblem};

#[derive(Parser, Debug)]
#[command(
    name = "mimome-tas",
    version,
    about = "Transmit antenna selection for MIMO wiretap channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Select antennas for one channel instance and print a JSON report.
    Select(SelectArgs),
    /// Run a Monte Carlo sweep and write CSV/JSON records.
    Sweep(SweepArgs),
    /// Compare visited nodes and wall time of the methods.
    Bench(BenchArgs),
    /// Write a reproducible i.i.d. Rayleigh channel matrix file.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[arg(long, default_value = "ncsie")]
    scenario: Scenario,
    /// Legitimate channel file.
    #[arg(long)]
    hm: Option<PathBuf>,
    /// Eavesdropper channel file.
    #[arg(long)]
    he: Option<PathBuf>,
    /// Generate the channels from this seed instead of reading files.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long, default_value_t = 4)]
    nr: usize,
    #[arg(long, default_value_t = 4)]
    ne: usize,
    #[arg(short = 'L', long = "subset-size")]
    l: usize,
    #[arg(long, allow_negative_numbers = true)]
    rho_m_db: f64,
    #[arg(long, allow_negative_numbers = true)]
    rho_e_db: Option<f64>,
    #[arg(long, default_value = "bab")]
    method: Method,
    #[arg(long)]
    warm_start: bool,
    #[arg(long, default_value_t = DEFAULT_ES_CAP as u64)]
    es_cap: u64,
}

#[derive(Args, Clone, Debug, Default)]
pub struct GridArgs {
    #[arg(long)]
    scenario: Option<Scenario>,
    /// `Nt` grid: `16`, `8,12,16` or `8:20:4`.
    #[arg(long)]
    nt: Option<String>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    ne: Option<usize>,
    #[arg(short = 'L', long = "subset-size")]
    l: Option<usize>,
    /// dB grid: `9`, `0,5,9` or `-5:15:1`.
    #[arg(long, allow_hyphen_values = true)]
    rho_m_db: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rho_e_db: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated subset of `bab,norm,es`.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    es_cap: Option<u64>,
    #[arg(long)]
    warm_start: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// JSON sweep configuration; inline flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: RecordFormat,
    /// Also write one `x y` data file per method next to `--out`.
    #[arg(long)]
    emit_plot: bool,
    /// Plot visited nodes instead of secrecy capacity.
    #[arg(long)]
    complexity: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Receive antennas (matrix rows).
    #[arg(long, alias = "rows")]
    nr: usize,
    /// Transmit antennas (matrix columns).
    #[arg(long, alias = "cols")]
    nt: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Write the binary encoding instead of text.
    #[arg(long)]
    binary: bool,
}

/// Parse `v`, `a,b,c` or `start:stop:step` (inclusive of `stop`).
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad grid {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

fn parse_counts(s: &str) -> Result<Vec<usize>> {
    parse_grid(s)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("bad antenna count {v}")))
            }
        })
        .collect()
}

fn load_config(path: Option<&Path>) -> Result<Option<SweepConfig>> {
    path.map(|p| {
        let text = fs::read_to_string(p)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
        SweepConfig::from_json(&text)
    })
    .transpose()
}

impl GridArgs {
    /// Overlay the flags on `base` (or on defaults when there is no file).
    fn resolve(
        &self,
        base: Option<SweepConfig>,
        default_methods: &[Method],
    ) -> Result<SweepConfig> {
        let mut cfg = match base {
            Some(cfg) => cfg,
            None => SweepConfig {
                scenario: Scenario::Ncsie,
                nt: Vec::new(),
                nr: 4,
                ne: 4,
                l: 4,
                rho_m_db: Vec::new(),
                rho_e_db: Vec::new(),
                n_trials: DEFAULT_TRIALS,
                methods: default_methods.to_vec(),
                seed: 0,
                es_cap: DEFAULT_ES_CAP as u64,
                warm_start: false,
            },
        };
        if let Some(s) = self.scenario {
            cfg.scenario = s;
        }
        if let Some(nt) = &self.nt {
            cfg.nt = parse_counts(nt)?;
        }
        if let Some(v) = self.nr {
            cfg.nr = v;
        }
        if let Some(v) = self.ne {
            cfg.ne = v;
        }
        if let Some(v) = self.l {
            cfg.l = v;
        }
        if let Some(g) = &self.rho_m_db {
            cfg.rho_m_db = parse_grid(g)?;
        }
        if let Some(g) = &self.rho_e_db {
            cfg.rho_e_db = parse_grid(g)?;
        }
        if let Some(v) = self.trials {
            cfg.n_trials = v;
        }
        if let Some(m) = &self.methods {
            cfg.methods = Method::parse_list(m)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.es_cap {
            cfg.es_cap = v;
        }
        cfg.warm_start |= self.warm_start;
        if cfg.rho_m_db.is_empty() || cfg.rho_e_db.is_empty() {
            return Err(Error::Config(
                "--rho-m-db and --rho-e-db are required".into(),
            ));
        }
        cfg.validated()
    }
}

#[derive(Serialize)]
struct SelectReport<'a> {
    scenario: Scenario,
    method: Method,
    #[serde(rename = "Nt")]
    nt: usize,
    #[serde(rename = "L")]
    l: usize,
    indices: &'a [usize],
    objective_bits: f64,
    secrecy_capacity_bits: Option<f64>,
    visited_nodes: u64,
    wall_time_s: f64,
}

fn cmd_select(args: &SelectArgs, out: &mut dyn Write) -> Result<()> {
    let rho_m = NormalizedSnr::from_db(args.rho_m_db)?;
    let rho_e = args.rho_e_db.map(NormalizedSnr::from_db).transpose()?;
    let (hm, he) = match (&args.hm, args.seed) {
        (Some(path), _) => (
            ChannelMatrix::load_path(path)?,
            args.he.as_ref().map(ChannelMatrix::load_path).transpose()?,
        ),
        (None, Some(seed)) => {
            let nt = args
                .nt
                .ok_or_else(|| Error::Config("--nt is required with --seed".into()))?;
            let (sm, se) = channel_seeds(Seed(seed));
            (
                generate_rayleigh(args.nr, nt, sm)?,
                Some(generate_rayleigh(args.ne, nt, se)?),
            )
        }
        (None, None) => return Err(Error::Config("either --hm or --seed is required".into())),
    };
    if args.scenario == Scenario::Csie && (he.is_none() || rho_e.is_none()) {
        return Err(Error::Config(
            "csie needs --he (or --seed) and --rho-e-db".into(),
        ));
    }
    let problem = match (he.as_ref(), rho_e) {
        (Some(he), Some(rho_e)) => {
            SelectionProblem::new(args.scenario, &hm, Some(he), args.l, rho_m, Some(rho_e))?
        }
        (Some(he), None) if he.cols() != hm.cols() => {
            return Err(Error::Dimension(format!(
                "legitimate channel has {} transmit antennas, eavesdropper channel has {}",
                hm.cols(),
                he.cols()
            )))
        }
        _ => SelectionProblem::new(args.scenario, &hm, None, args.l, rho_m, None)?,
    };
    let options = SelectOptions {
        warm_start: args.warm_start,
        ..Default::default()
    };
    let start = Instant::now();
    let result =
        crate::experiments::run_method(args.method, &problem, &options, u128::from(args.es_cap))?;
    let wall = start.elapsed().as_secs_f64();
    let report = SelectReport {
        scenario: args.scenario,
        method: args.method,
        nt: hm.cols(),
        l: args.l,
        indices: &result.indices,
        objective_bits: result.objective,
        secrecy_capacity_bits: result.secrecy_capacity,
        visited_nodes: result.visited_nodes,
        wall_time_s: wall,
    };
    serde_json::to_writer(&mut *out, &report).map_err(|e| Error::Io(io::Error::other(e)))?;
    writeln!(out)?;
    Ok(())
}

fn plot_path(out: &Path, method: Method) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{method}.dat"))
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = args.grid.resolve(
        load_config(args.config.as_deref())?,
        &[Method::Bab, Method::Norm],
    )?;
    let points = run_trials(&cfg)?;
    let records = summarize(&cfg, &points);
    match &args.out {
        Some(path) => write_records(&records, fs::File::create(path)?, args.format)?,
        None => write_records(&records, &mut *stdout, args.format)?,
    }
    if args.emit_plot {
        let out = args
            .out
            .as_ref()
            .ok_or_else(|| Error::Config("--emit-plot needs --out".into()))?;
        for method in &cfg.methods {
            let mut text = String::new();
            for series in plot_series(&records, args.complexity)
                .iter()
                .filter(|s| s.method == *method)
            {
                if !text.is_empty() {
                    text.push_str("\n\n");
                }
                text.push_str(&format!(
                    "# {}\n# {} {}\n",
                    series.label, series.x_name, series.y_name
                ));
                for (x, y) in &series.points {
                    text.push_str(&format!("{} {}\n", format_sig12(*x), format_sig12(*y)));
                }
            }
            fs::write(plot_path(out, *method), text)?;
        }
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let mut grid = args.grid.clone();
    if grid.trials.is_none() && args.config.is_none() {
        grid.trials = Some(100);
    }
    let cfg = grid.resolve(
        load_config(args.config.as_deref())?,
        &[Method::Bab, Method::Norm, Method::Es],
    )?;
    let points = run_trials(&cfg)?;
    for p in &points {
        let shape = SearchTreeShape::new(p.point.nt, cfg.l)?;
        writeln!(
            out,
            "# {} Nt={} Nr={} Ne={} L={} rho_m_db={} rho_e_db={} trials={} subsets={}",
            cfg.scenario,
            p.point.nt,
            cfg.nr,
            cfg.ne,
            cfg.l,
            format_sig12(p.point.rho_m_db),
            format_sig12(p.point.rho_e_db),
            p.trials.len(),
            shape.subset_count()
        )?;
        writeln!(
            out,
            "{:<6} {:>14} {:>14} {:>14} {:>14}",
            "method", "mean_nodes", "mean_time_ms", "nodes_vs_es", "speedup_vs_es"
        )?;
        let n = p.trials.len() as f64;
        let stats: Vec<(Method, f64, f64)> = cfg
            .methods
            .iter()
            .enumerate()
            .map(|(m, &method)| {
                let nodes = p
                    .trials
                    .iter()
                    .map(|t| t[m].result.visited_nodes as f64)
                    .sum::<f64>()
                    / n;
                let ms = p
                    .trials
                    .iter()
                    .map(|t| t[m].elapsed.as_secs_f64() * 1e3)
                    .sum::<f64>()
                    / n;
                (method, nodes, ms)
            })
            .collect();
        let es = stats.iter().find(|s| s.0 == Method::Es).copied();
        for (method, nodes, ms) in &stats {
            let (ratio, speedup) = match es {
                Some((_, es_nodes, es_ms)) => (
                    format_sig12(round6(nodes / es_nodes)),
                    format_sig12(round6(es_ms / ms)),
                ),
                None => ("-".into(), "-".into()),
            };
            writeln!(
                out,
                "{:<6} {:>14} {:>14.4} {:>14} {:>14}",
                method.as_str(),
                format_sig12(round6(*nodes)),
                ms,
                ratio,
                speedup
            )?;
        }
    }
    Ok(())
}

fn round6(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.5e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let h = generate_rayleigh(args.nr, args.nt, Seed(args.seed))?;
    let format = if args.binary {
        MatrixFormat::Binary
    } else {
        MatrixFormat::Text
    };
    h.store_path(&args.out, format)
}

/// Run a parsed command, writing reports to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Select(a) => cmd_select(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Gen(a) => cmd_gen(a),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
