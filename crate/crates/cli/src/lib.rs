//! Command-line front end for occupation-time runs.
//!
//! Every subcommand resolves its settings from an optional TOML file with
//! flags layered on top, computes (or loads from the cache) a
//! [`record::ResultRecord`], and writes CSV, JSON and SVG views of it.

pub mod config;
pub mod error;
pub mod record;
pub mod run;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{ClassicalMode, Format, FormatList, Number, RawConfig};
use error::{CliError, CliResult};
use svg::PlotKind;

#[derive(Debug, Parser)]
#[command(name = "occwalk", version, about = "Occupation-time distributions of classical and monitored quantum walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monitored occupation time of a quantum walk.
    Occupation(RunArgs),
    /// Classical coin-tossing reference laws.
    Classical {
        #[arg(value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Verblunsky coefficients of the Riesz-product measure.
    RieszAlphas {
        /// Number of coefficients α_0 … α_{count-1}.
        #[arg(long, default_value_t = 64)]
        count: usize,
        #[arg(long, default_value_t = occwalk::coin::DEFAULT_RIESZ_DEPTH)]
        riesz_depth: u32,
        /// Output directory; without it the JSON table goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Runs every `[[runs]]` entry of a TOML file and writes `index.json`.
    Sweep {
        file: PathBuf,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Renders SVG plots of a stored JSON record.
    Plot {
        record: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Both)]
        kind: KindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Enumerate,
    Montecarlo,
    Arcsine,
}

impl From<ModeArg> for ClassicalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => ClassicalMode::Exact,
            ModeArg::Enumerate => ClassicalMode::Enumerate,
            ModeArg::Montecarlo => ClassicalMode::MonteCarlo,
            ModeArg::Arcsine => ClassicalMode::Arcsine,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Density,
    Cdf,
    Both,
}

#[derive(Debug, Default, Args)]
struct RunArgs {
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Rational such as 3/5, or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    engine: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_minus_one: Option<String>,
    #[arg(long)]
    riesz_depth: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Window half-width in sites (default steps + 3).
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated list of csv, json, svg.
    #[arg(long)]
    format: Option<String>,
}

impl RunArgs {
    fn flags(&self) -> RawConfig {
        RawConfig {
            model: self.model.clone(),
            alpha: self.alpha.clone().map(Number::Text),
            steps: self.steps,
            engine: self.engine.clone(),
            alpha_minus_one: self.alpha_minus_one.clone().map(Number::Text),
            riesz_depth: self.riesz_depth,
            seed: self.seed,
            trials: self.trials,
            threads: self.threads,
            out: self.out.clone(),
            format: self.format.clone().map(FormatList::One),
            window: self.window,
        }
    }

    fn layered(&self) -> CliResult<RawConfig> {
        let file = match &self.config {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        Ok(file.overlay(&self.flags()))
    }
}

fn report(out: &run::RunOutput) {
    let source = if out.cache_hit { "cache" } else { "computed" };
    eprintln!(
        "{} ({source}, {:.3} s)",
        out.record.title(),
        out.elapsed.as_secs_f64()
    );
    for f in &out.files {
        println!("{}", f.display());
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Occupation(args) => {
            let raw = args.layered()?;
            let config = raw.resolve()?;
            if matches!(config.model, config::Model::Classical(_)) {
                return Err(CliError::Config("use the 'classical' subcommand for classical models".into()));
            }
            report(&run::run(&config)?);
        }
        Command::Classical { mode, args } => {
            let mut raw = args.layered()?;
            let mode: ClassicalMode = mode.into();
            raw.model = Some(format!("classical-{}", mode.as_str()));
            report(&run::run(&raw.resolve()?)?);
        }
        Command::RieszAlphas { count, riesz_depth, out, format } => {
            let rows = run::riesz_table(count, riesz_depth)?;
            match out {
                None => print!("{}", run::alphas_json(&rows)),
                Some(dir) => {
                    let formats = match format {
                        Some(f) => f
                            .split(',')
                            .map(str::parse)
                            .collect::<CliResult<Vec<Format>>>()?,
                        None => vec![Format::Csv, Format::Json],
                    };
                    for f in run::write_alphas(&rows, riesz_depth, &formats, &dir)? {
                        println!("{}", f.display());
                    }
                }
            }
        }
        Command::Sweep { file, args } => {
            let plan = run::SweepPlan::from_file(&file)?;
            let mut flags = args.flags();
            if let Some(p) = &args.config {
                flags = RawConfig::from_file(p)?.overlay(&flags);
            }
            let report = run::sweep(&plan, &flags)?;
            for e in &report.entries {
                match &e.error {
                    None => eprintln!("run {}: ok ({})", e.index, e.stem.as_deref().unwrap_or("")),
                    Some(msg) => eprintln!("run {}: {msg}", e.index),
                }
            }
            println!("{}", report.index_path.display());
            if let Some(code) = report.first_failure {
                let failed = report.entries.iter().filter(|e| e.error.is_some()).count();
                let msg = format!("{failed} of {} runs failed", report.entries.len());
                return Err(match code {
                    3 => CliError::Guard(msg),
                    4 => CliError::Io { path: report.index_path, source: std::io::Error::other(msg) },
                    _ => CliError::Config(msg),
                });
            }
        }
        Command::Plot { record, kind, out } => {
            let kinds = match kind {
                KindArg::Density => vec![PlotKind::Density],
                KindArg::Cdf => vec![PlotKind::Cdf],
                KindArg::Both => vec![PlotKind::Density, PlotKind::Cdf],
            };
            for f in run::plot_file(&record, &kinds, out.as_deref())? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
