//! Argument parsing and command dispatch.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dmt_core::channel::AntennaConfig;
use dmt_core::montecarlo::{McConfig, DEFAULT_REL_STEP, DEFAULT_STREAMS};

use crate::config::{FileConfig, Values};
use crate::corrfile::read_matrix;
use crate::emit::{write_records, Format};
use crate::grid::{parse_list, parse_range};
use crate::parallel::with_threads;
use crate::record::CurveRecord;
use crate::sweep::{
    run_bound, run_diversity, run_simulate, CorrelationSource, DiversitySelection, SimQuantity,
    SweepSpec, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "dmt", version, about = "Finite-SNR diversity-multiplexing tradeoff for correlated MIMO channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimized outage-probability lower bound over the grid.
    Bound(BoundArgs),
    /// Diversity estimates, maximal diversity, asymptotic tradeoff, relative gain.
    Diversity(DiversityArgs),
    /// Monte Carlo outage probability or finite-difference diversity.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also emit simulated outage probability at every point.
    #[arg(long)]
    pub with_mc: bool,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Optimized diversity estimate (the default when nothing else is selected).
    #[arg(long)]
    pub estimate: bool,
    /// Maximal diversity at each SNR (zero multiplexing gain limit).
    #[arg(long)]
    pub dmax: bool,
    /// High-SNR tradeoff at each multiplexing gain.
    #[arg(long)]
    pub asymptote: bool,
    /// Correlated over uncorrelated estimate ratio.
    #[arg(long)]
    pub relative_gain: bool,
    /// Monte Carlo finite-difference diversity.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// mc-outage or div-fd.
    #[arg(long)]
    pub quantity: Option<String>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat TOML file whose keys mirror these flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Transmit antennas [default: 2].
    #[arg(long)]
    pub nt: Option<usize>,
    /// Receive antennas [default: 2].
    #[arg(long)]
    pub nr: Option<usize>,
    /// Transmit correlation coefficient(s), comma-separated [default: 0].
    #[arg(long, conflicts_with = "corr_file")]
    pub rho: Option<String>,
    /// Explicit transmit correlation matrix file.
    #[arg(long)]
    pub corr_file: Option<PathBuf>,
    /// Multiplexing gain(s), comma-separated.
    #[arg(long, conflicts_with = "r_grid")]
    pub r: Option<String>,
    /// Multiplexing gain grid start:stop:step.
    #[arg(long)]
    pub r_grid: Option<String>,
    /// SNR(s) in dB, comma-separated.
    #[arg(long, conflicts_with = "eta_grid_db")]
    pub eta_db: Option<String>,
    /// SNR grid in dB, start:stop:step.
    #[arg(long)]
    pub eta_grid_db: Option<String>,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json-lines [default: csv].
    #[arg(long)]
    pub format: Option<String>,
    /// Monte Carlo seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples per point, e.g. 1000000 or 1e6 [default: 1e6].
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<u64>,
    /// Worker threads [default: all cores]. Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Independent random streams per point [default: 64].
    #[arg(long, value_parser = parse_count)]
    pub streams: Option<u64>,
    /// Relative SNR step of the finite-difference diversity [default: 0.01].
    #[arg(long)]
    pub rel_step: Option<f64>,
}

/// Positive integer, also accepting integral scientific notation (`1e6`).
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

/// Everything a command needs after flags and config file are merged.
#[derive(Debug)]
pub struct Resolved {
    pub spec: SweepSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
}

/// Flag value if given, otherwise the file's list value.
fn pick_list(
    flag: &Option<String>,
    file: &Option<Values>,
    parse: fn(&str) -> Result<Vec<f64>, CliError>,
    from_file: fn(&Values) -> Result<Vec<f64>, CliError>,
) -> Option<Result<Vec<f64>, CliError>> {
    match (flag, file) {
        (Some(s), _) => Some(parse(s)),
        (None, Some(v)) => Some(from_file(v)),
        (None, None) => None,
    }
}

/// One of a pair of mutually exclusive grid sources; flags shadow the file
/// as a pair so a flag `--r` overrides a file `r-grid`.
fn grid(
    list_flag: &Option<String>,
    range_flag: &Option<String>,
    list_file: &Option<Values>,
    range_file: &Option<Values>,
    what: &str,
) -> Result<Vec<f64>, CliError> {
    let from_flags = pick_list(list_flag, &None, parse_list, Values::list)
        .or_else(|| pick_list(range_flag, &None, parse_range, Values::range));
    if let Some(v) = from_flags {
        return v;
    }
    match (list_file, range_file) {
        (Some(_), Some(_)) => Err(CliError::Input(format!("config file sets both forms of {what}"))),
        (Some(v), None) => v.list(),
        (None, Some(v)) => v.range(),
        (None, None) => Ok(Vec::new()),
    }
}

impl CommonArgs {
    pub fn file_config(&self) -> Result<FileConfig, CliError> {
        match &self.config {
            Some(p) => FileConfig::load(p),
            None => Ok(FileConfig::default()),
        }
    }

    pub fn resolve(&self, file: &FileConfig) -> Result<Resolved, CliError> {
        let nt = self.nt.or(file.nt).unwrap_or(2);
        let nr = self.nr.or(file.nr).unwrap_or(2);
        let cfg = AntennaConfig::new(nt, nr)?;

        let correlation = match (&self.rho, &self.corr_file) {
            (Some(s), _) => CorrelationSource::Rho(parse_list(s)?),
            (None, Some(p)) => CorrelationSource::Matrix(read_matrix(p)?),
            (None, None) => match (&file.rho, &file.corr_file) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Input("config file sets both rho and corr-file".into()))
                }
                (Some(v), None) => CorrelationSource::Rho(v.list()?),
                (None, Some(p)) => CorrelationSource::Matrix(read_matrix(p)?),
                (None, None) => CorrelationSource::Rho(vec![0.0]),
            },
        };

        let r_values = grid(&self.r, &self.r_grid, &file.r, &file.r_grid, "r")?;
        let eta_db_values =
            grid(&self.eta_db, &self.eta_grid_db, &file.eta_db, &file.eta_grid_db, "eta-db")?;

        let mc = McConfig::new(
            self.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            self.streams.or(file.streams).unwrap_or(DEFAULT_STREAMS),
        )?;
        let rel_step = self.rel_step.or(file.rel_step).unwrap_or(DEFAULT_REL_STEP);
        dmt_core::montecarlo::check_rel_step(rel_step)?;

        let format = match self.format.as_ref().or(file.format.as_ref()) {
            Some(s) => s.parse()?,
            None => Format::Csv,
        };

        Ok(Resolved {
            spec: SweepSpec { cfg, correlation, r_values, eta_db_values, mc, rel_step },
            out: self.out.clone().or_else(|| file.out.clone()),
            format,
            threads: self.threads.or(file.threads).unwrap_or(0),
        })
    }
}

fn flag(cli: bool, file: Option<bool>) -> bool {
    cli || file.unwrap_or(false)
}

/// Evaluate a parsed command to its records and output settings.
pub fn evaluate(command: &Command) -> Result<(Vec<CurveRecord>, Resolved), CliError> {
    let common = match command {
        Command::Bound(a) => &a.common,
        Command::Diversity(a) => &a.common,
        Command::Simulate(a) => &a.common,
    };
    let file = common.file_config()?;
    let res = common.resolve(&file)?;
    let spec = &res.spec;
    let records = with_threads(res.threads, || match command {
        Command::Bound(a) => run_bound(spec, flag(a.with_mc, file.with_mc)),
        Command::Diversity(a) => {
            let sel = DiversitySelection {
                estimate: flag(a.estimate, file.estimate),
                dmax: flag(a.dmax, file.dmax),
                asymptote: flag(a.asymptote, file.asymptote),
                relative_gain: flag(a.relative_gain, file.relative_gain),
                exact: flag(a.exact, file.exact),
            };
            run_diversity(spec, sel)
        }
        Command::Simulate(a) => {
            let q = match a.quantity.as_ref().or(file.quantity.as_ref()) {
                Some(s) => s.parse()?,
                None => SimQuantity::Outage,
            };
            run_simulate(spec, q)
        }
    })??;
    Ok((records, res))
}

/// Parse, evaluate and write; the error carries the exit status.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (records, res) = evaluate(&cli.command)?;
    match &res.out {
        Some(path) => {
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
            let file = File::create(path).map_err(io)?;
            let mut w = BufWriter::new(file);
            write_records(&mut w, &records, res.format)?;
            w.into_inner().map_err(|e| io(e.into_error()))?.sync_all().map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_records(&mut w, &records, res.format)?;
            w.flush().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
