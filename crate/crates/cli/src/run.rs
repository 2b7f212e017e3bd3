//! Running configurations: dispatch, caching, file output and sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use occwalk::engine::{default_half_width, occupation_in_window};
use occwalk::{classical, par, riesz, Execution};
use serde::Serialize;
use serde_json::json;

use crate::config::{ClassicalMode, Format, Model, RawConfig, RunConfig, DEFAULT_OUT, VERSION};
use crate::error::{CliError, CliResult};
use crate::record::{RecordDiagnostics, ResultRecord};
use crate::svg::{self, PlotKind};

/// What a single run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: ResultRecord,
    pub cache_hit: bool,
    pub files: Vec<PathBuf>,
    pub elapsed: Duration,
}

fn execution() -> Execution {
    if cfg!(feature = "parallel") {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

/// Runs `f` on a dedicated pool when a thread count is requested.
#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {t} threads: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(_threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    Ok(f())
}

/// Computes the record for `config` without touching the file system.
pub fn compute(config: &RunConfig) -> CliResult<ResultRecord> {
    let exec = execution();
    let n = config.steps;
    let mut exact = None;
    let mut exact_cdf = None;
    let (probs, diagnostics) = match &config.model {
        Model::Quantum(spec) => {
            let window = config.window.unwrap_or_else(|| default_half_width(n));
            let dist = occupation_in_window(spec, n, config.engine, exec, window)?;
            let d = RecordDiagnostics {
                pre_clamp_sum: dist.diagnostics.pre_clamp_sum,
                boundary_mass: dist.diagnostics.boundary_mass,
            };
            (dist.probs, d)
        }
        Model::Classical(mode) => {
            let probs = match mode {
                ClassicalMode::Exact | ClassicalMode::Enumerate => {
                    let rational = if *mode == ClassicalMode::Exact {
                        classical::exact_distribution(n as u64)
                    } else {
                        classical::enumerate_paths_with(n, exec)?
                    };
                    let cum = classical::cumulative(&rational);
                    exact = Some(rational.iter().map(ToString::to_string).collect());
                    exact_cdf = Some(cum.iter().map(ToString::to_string).collect());
                    rational.iter().map(classical::to_f64).collect()
                }
                ClassicalMode::MonteCarlo => {
                    classical::monte_carlo_with(n, config.trials, config.seed, exec)?.frequencies()
                }
                ClassicalMode::Arcsine => classical::arcsine_bins(n),
            };
            let d = RecordDiagnostics { pre_clamp_sum: probs.iter().sum(), boundary_mass: 0.0 };
            (probs, d)
        }
    };
    let cdf = occwalk::engine::cdf(&probs);
    Ok(ResultRecord {
        config: config.canonical(),
        engine: config.engine_label().to_string(),
        n,
        probs,
        cdf,
        exact,
        exact_cdf,
        diagnostics,
        version: VERSION.to_string(),
        config_hash: config.hash(),
    })
}

pub fn cache_path(config: &RunConfig) -> PathBuf {
    config.out.join(".cache").join(format!("{}.json", config.hash()))
}

/// Stored record bytes for `config`, if a valid entry exists.
fn cached(config: &RunConfig) -> Option<(String, ResultRecord)> {
    let text = fs::read_to_string(cache_path(config)).ok()?;
    let record = ResultRecord::from_json(&text).ok()?;
    (record.config_hash == config.hash() && record.version == VERSION).then_some((text, record))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    // write-then-rename so a reader never sees a half-written file
    let tmp = path.with_extension("partial");
    fs::write(&tmp, contents).map_err(CliError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(CliError::io(path))
}

/// Writes the requested formats; `json` is the exact record text.
fn emit(config: &RunConfig, record: &ResultRecord, json: &str) -> CliResult<Vec<PathBuf>> {
    let stem = config.stem();
    let mut files = Vec::new();
    for format in &config.formats {
        match format {
            Format::Csv => {
                let p = config.out.join(format!("{stem}.csv"));
                write(&p, &record.to_csv())?;
                files.push(p);
            }
            Format::Json => {
                let p = config.out.join(format!("{stem}.json"));
                write(&p, json)?;
                files.push(p);
            }
            Format::Svg => {
                for kind in [PlotKind::Density, PlotKind::Cdf] {
                    let p = config.out.join(format!("{stem}.{}.svg", kind.as_str()));
                    write(&p, &svg::render(record, kind)?)?;
                    files.push(p);
                }
            }
        }
    }
    Ok(files)
}

/// Cache lookup or computation, on the configured thread pool.
fn obtain(config: &RunConfig) -> CliResult<(String, ResultRecord, bool)> {
    if let Some((text, record)) = cached(config) {
        return Ok((text, record, true));
    }
    let record = with_threads(config.threads, || compute(config))??;
    Ok((record.to_json(), record, false))
}

fn persist(config: &RunConfig, text: &str, record: &ResultRecord, hit: bool) -> CliResult<Vec<PathBuf>> {
    if !hit {
        write(&cache_path(config), text)?;
    }
    emit(config, record, text)
}

/// Runs one configuration and writes its outputs.
pub fn run(config: &RunConfig) -> CliResult<RunOutput> {
    let start = Instant::now();
    let (text, record, cache_hit) = obtain(config)?;
    let files = persist(config, &text, &record, cache_hit)?;
    Ok(RunOutput { record, cache_hit, files, elapsed: start.elapsed() })
}

/// A sweep file: top-level keys are shared defaults, each `[[runs]]` table
/// overrides them for one run.
#[derive(Debug, Clone, Default)]
pub struct SweepPlan {
    pub defaults: RawConfig,
    pub runs: Vec<RawConfig>,
}

impl SweepPlan {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let runs = match table.remove("runs") {
            None => Vec::new(),
            Some(toml::Value::Array(items)) => items
                .into_iter()
                .map(|v| v.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string())))
                .collect::<CliResult<_>>()?,
            Some(_) => return Err(CliError::Config("'runs' must be an array of tables".into())),
        };
        let defaults = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        Ok(SweepPlan { defaults, runs })
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::from_toml(&text)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub index: usize,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exit_code: Option<i32>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    pub index_path: PathBuf,
    /// Exit code of the first failed run, if any.
    pub first_failure: Option<i32>,
}

fn relative(base: &Path, p: &Path) -> String {
    p.strip_prefix(base).unwrap_or(p).display().to_string()
}

/// Runs every entry of `plan` with `flags` applied on top. Failures are
/// recorded per run; the others still complete.
pub fn sweep(plan: &SweepPlan, flags: &RawConfig) -> CliResult<SweepReport> {
    if plan.runs.is_empty() {
        return Err(CliError::Config("sweep needs at least one [[runs]] entry".into()));
    }
    let base = plan.defaults.clone().overlay(flags);
    let out = base.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let configs: Vec<CliResult<RunConfig>> = plan
        .runs
        .iter()
        .map(|r| {
            let mut raw = plan.defaults.clone().overlay(r).overlay(flags);
            if raw.out.is_none() {
                raw.out = Some(out.clone());
            }
            raw.resolve()
        })
        .collect();
    let threads = base.threads;
    // compute in parallel, write afterwards from this thread only
    let computed = with_threads(threads, || {
        par::map_indexed(execution(), configs.len(), |i| match &configs[i] {
            Ok(c) => obtain(c).map(|r| (c.clone(), r)),
            Err(e) => Err(clone_error(e)),
        })
    })?;
    let mut entries = Vec::with_capacity(computed.len());
    let mut first_failure = None;
    for (index, result) in computed.into_iter().enumerate() {
        let written = result.and_then(|(c, (text, record, hit))| {
            persist(&c, &text, &record, hit).map(|files| (c, files))
        });
        entries.push(match written {
            Ok((c, files)) => SweepEntry {
                index,
                status: "ok",
                config_hash: Some(c.hash()),
                stem: Some(c.stem()),
                files: files.iter().map(|f| relative(&out, f)).collect(),
                error: None,
                exit_code: None,
            },
            Err(e) => {
                first_failure.get_or_insert(e.exit_code());
                SweepEntry {
                    index,
                    status: "error",
                    config_hash: None,
                    stem: None,
                    files: Vec::new(),
                    error: Some(e.to_string()),
                    exit_code: Some(e.exit_code()),
                }
            }
        });
    }
    let index_path = out.join("index.json");
    let mut text = serde_json::to_string_pretty(&json!({ "version": VERSION, "runs": entries }))
        .expect("index serializes");
    text.push('\n');
    write(&index_path, &text)?;
    Ok(SweepReport { entries, index_path, first_failure })
}

fn clone_error(e: &CliError) -> CliError {
    match e {
        CliError::Config(m) => CliError::Config(m.clone()),
        CliError::Guard(m) => CliError::Guard(m.clone()),
        CliError::Io { path, source } => {
            CliError::Io { path: path.clone(), source: std::io::Error::new(source.kind(), source.to_string()) }
        }
    }
}

/// Verblunsky coefficient table of the Riesz measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub rho: f64,
}

pub fn riesz_table(count: usize, depth: u32) -> CliResult<Vec<AlphaRow>> {
    let spec = riesz::TruncationSpec::new(depth)?;
    let moments = riesz::riesz_moments(count, spec);
    let recovered = riesz::verblunsky_from_moments(&moments, count)?;
    Ok(recovered
        .alphas
        .iter()
        .enumerate()
        .map(|(index, a)| AlphaRow { index, re: a.re + 0.0, im: a.im + 0.0, rho: (1.0 - a.norm_sqr()).max(0.0).sqrt() })
        .collect())
}

pub fn alphas_csv(rows: &[AlphaRow]) -> String {
    let mut s = String::from("j,re,im,rho\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.index, r.re, r.im, r.rho));
    }
    s
}

pub fn alphas_json(rows: &[AlphaRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

/// Writes the alpha table in the requested formats under `out`.
pub fn write_alphas(rows: &[AlphaRow], depth: u32, formats: &[Format], out: &Path) -> CliResult<Vec<PathBuf>> {
    let stem = format!("riesz-alphas-k{depth}-c{}", rows.len());
    let mut files = Vec::new();
    for f in formats {
        let (ext, text) = match f {
            Format::Csv => ("csv", alphas_csv(rows)),
            Format::Json => ("json", alphas_json(rows)),
            Format::Svg => return Err(CliError::Config("riesz-alphas writes csv or json only".into())),
        };
        let p = out.join(format!("{stem}.{ext}"));
        write(&p, &text)?;
        files.push(p);
    }
    Ok(files)
}

/// Renders SVG plots of a stored record next to it (or into `out`).
pub fn plot_file(record_path: &Path, kinds: &[PlotKind], out: Option<&Path>) -> CliResult<Vec<PathBuf>> {
    let text = fs::read_to_string(record_path).map_err(CliError::io(record_path))?;
    let record = ResultRecord::from_json(&text)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => record_path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let stem = record_path.file_stem().and_then(|s| s.to_str()).unwrap_or("record");
    let mut files = Vec::new();
    for &kind in kinds {
        let p = dir.join(format!("{stem}.{}.svg", kind.as_str()));
        write(&p, &svg::render(&record, kind)?)?;
        files.push(p);
    }
    Ok(files)
}
