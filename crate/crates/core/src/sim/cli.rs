use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::inference::{are, fit, FitOptions};
use crate::models::{LinearModel, ModelKind, SeriesMatrix};
use crate::scoring::EstimatorKind;
use crate::sim::check::run_checks;
use crate::sim::config::{self, load_config_file, ConfigOverrides};
use crate::sim::experiment::run_experiment;
use crate::sim::report::{emit_are_svg, emit_csv, emit_sd_svg, format_sig, write_csv};

#[derive(Parser, Debug)]
#[command(name = "minscore", version, about = "Minimum-score estimation for AR(1) and MA(1) series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample series from a model and write them as CSV, one series per row.
    Simulate(SimulateArgs),
    /// Fit one estimator to a CSV dataset written by `simulate`.
    Fit(FitArgs),
    /// Run a replicated experiment and write an efficiency table.
    Table(TableArgs),
    /// Run the oracle checks and print one PASS/FAIL line each.
    Check,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// ar1 or ma1
    #[arg(long)]
    model: ModelKind,
    /// Known mean.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    /// Known innovation variance.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<LinearModel> {
        if !(self.sigma2 > 0.0) || !self.mu.is_finite() {
            return Err(Error::Config(format!(
                "need finite mu and sigma2 > 0, got mu = {}, sigma2 = {}",
                self.mu, self.sigma2
            )));
        }
        Ok(LinearModel::new(self.model, self.mu, self.sigma2))
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// phi for ar1, alpha for ma1; must lie in (-1, 1).
    #[arg(long, allow_hyphen_values = true)]
    param: f64,
    #[arg(long, default_value_t = config::DEFAULT_NU)]
    nu: usize,
    #[arg(long = "t", default_value_t = config::DEFAULT_T)]
    t_len: usize,
    #[arg(long, default_value_t = config::DEFAULT_SEED)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// CSV with a header row and one series per line.
    #[arg(long)]
    input: PathBuf,
    /// full, pairwise, hyv or hyv-wishart
    #[arg(long)]
    estimator: EstimatorKind,
    /// Monte Carlo draws for the Wishart information.
    #[arg(long = "mc-b", default_value_t = crate::inference::fit::DEFAULT_MC_DRAWS)]
    mc_b: usize,
    #[arg(long, default_value_t = config::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// key=value file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    /// Comma-separated parameter values, e.g. "-0.5,0,0.5".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long = "t")]
    t_len: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long = "mc-b")]
    mc_b: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of full,pairwise,hyv,hyv-wishart.
    #[arg(long)]
    estimators: Option<String>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// ARE line chart.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Mean-sd line chart.
    #[arg(long = "sd-svg")]
    sd_svg: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl TableArgs {
    fn overrides(&self) -> Result<ConfigOverrides> {
        Ok(ConfigOverrides {
            model: self.model,
            grid: self.grid.as_deref().map(config::parse_grid).transpose()?,
            nu: self.nu,
            t_len: self.t_len,
            replicates: self.replicates,
            mc_b: self.mc_b,
            seed: self.seed,
            estimators: self.estimators.as_deref().map(config::parse_estimators).transpose()?,
            out_path: self.out.clone(),
            svg_path: self.svg.clone(),
            sd_svg_path: self.sd_svg.clone(),
            threads: self.threads,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn stdout_err(source: io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn write_series<W: Write>(y: &SeriesMatrix, sink: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record((1..=y.t_len()).map(|t| format!("y{t}")))?;
    for row in y.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Read a dataset written by `simulate`: header row, then one series per line.
pub fn read_series(path: &Path) -> Result<SeriesMatrix> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    Error::Config(format!("{}: line {}: `{f}` is not a number", path.display(), i + 2))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Config(format!("{}: no series found", path.display())));
    }
    SeriesMatrix::from_rows(&rows)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let model = args.model.model()?;
    let y = model.sample(args.param, args.nu, args.t_len, args.seed)?;
    match &args.out {
        Some(path) => write_series(&y, create(path)?).map_err(|source| Error::Csv {
            path: path.clone(),
            source,
        }),
        None => write_series(&y, io::stdout().lock()).map_err(|source| Error::Csv {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let model = args.model.model()?;
    let y = read_series(&args.input)?;
    let opts = FitOptions {
        mc_draws: args.mc_b,
        seed: args.seed,
        ..FitOptions::default()
    };
    let mut rec = fit(&y, args.estimator, &model, &opts)?;
    if let Some(sd) = rec.sd {
        rec.are = if args.estimator == EstimatorKind::FullMl {
            Some(1.0)
        } else {
            let base = fit(&y, EstimatorKind::FullMl, &model, &opts)?;
            base.sd.map(|b| are(b, sd))
        };
    }
    let opt = |v: Option<f64>| v.map(|x| format_sig(x, 6)).unwrap_or_default();
    let mut out = io::stdout().lock();
    writeln!(out, "estimator,estimate,sd,are,boundary_flag").map_err(stdout_err)?;
    writeln!(
        out,
        "{},{},{},{},{}",
        rec.kind,
        format_sig(rec.estimate, 6),
        opt(rec.sd),
        opt(rec.are),
        rec.boundary_flag
    )
    .map_err(stdout_err)
}

fn cmd_table(args: &TableArgs) -> Result<()> {
    let flags = args.overrides()?;
    let merged = match &args.config {
        Some(path) => flags.over(load_config_file(path)?),
        None => flags,
    };
    let cfg = merged.into_config()?;
    let rows = run_experiment(&cfg)?;
    match &cfg.out_path {
        Some(path) => emit_csv(&rows, path)?,
        None => write_csv(&rows, io::stdout().lock()).map_err(|source| Error::Csv {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    if let Some(path) = &cfg.svg_path {
        emit_are_svg(&rows, path)?;
    }
    if let Some(path) = &cfg.sd_svg_path {
        emit_sd_svg(&rows, path)?;
    }
    Ok(())
}

fn cmd_check() -> Result<bool> {
    let outcomes = run_checks();
    let mut out = io::stdout().lock();
    for c in &outcomes {
        writeln!(out, "{}", c.line()).map_err(stdout_err)?;
    }
    Ok(outcomes.iter().all(|c| c.passed))
}

/// Entry point shared by the binary and the tests. Returns the exit code:
/// 0 success, 1 usage or validation error, 2 runtime failure.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Table(a) => cmd_table(a),
        Command::Check => match cmd_check() {
            Ok(true) => Ok(()),
            Ok(false) => return 2,
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}
