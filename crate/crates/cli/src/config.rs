//! Run configuration: file and flag layers, validation and the canonical
//! form used for hashing.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use occwalk::coin::DEFAULT_RIESZ_DEPTH;
use occwalk::engine::BRUTE_FORCE_LIMIT;
use occwalk::{Engine, ModelSpec, C64};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_STEPS: usize = 60;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_OUT: &str = "occwalk-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalMode {
    Exact,
    Enumerate,
    MonteCarlo,
    Arcsine,
}

impl ClassicalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassicalMode::Exact => "exact",
            ClassicalMode::Enumerate => "enumerate",
            ClassicalMode::MonteCarlo => "montecarlo",
            ClassicalMode::Arcsine => "arcsine",
        }
    }
}

impl FromStr for ClassicalMode {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "exact" => Ok(ClassicalMode::Exact),
            "enumerate" => Ok(ClassicalMode::Enumerate),
            "montecarlo" => Ok(ClassicalMode::MonteCarlo),
            "arcsine" => Ok(ClassicalMode::Arcsine),
            other => Err(CliError::Config(format!("unknown classical mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Quantum(ModelSpec),
    Classical(ClassicalMode),
}

impl Model {
    /// Short file-name friendly label.
    pub fn slug(&self) -> String {
        match self {
            Model::Quantum(ModelSpec::Hadamard) => "hadamard".into(),
            Model::Quantum(ModelSpec::Constant { alpha }) => format!("constant{alpha}"),
            Model::Quantum(ModelSpec::PolynomialCoin) => "polynomial-coin".into(),
            Model::Quantum(ModelSpec::Riesz { depth, .. }) => format!("riesz-k{depth}"),
            Model::Classical(mode) => format!("classical-{}", mode.as_str()),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Quantum(m) => f.write_str(&m.name()),
            Model::Classical(mode) => write!(f, "classical-{}", mode.as_str()),
        }
    }
}

/// A number given either as a TOML number or as a string such as `"3/5"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> CliResult<f64> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Text(s) => parse_rational(s),
        }
    }
}

/// Parses `p/q` or a decimal literal.
pub fn parse_rational(s: &str) -> CliResult<f64> {
    let bad = || CliError::Config(format!("'{s}' is not a rational number"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(p as f64 / q as f64)
        }
        None => {
            let x: f64 = s.parse().map_err(|_| bad())?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(bad())
            }
        }
    }
}

/// One layer of settings; later layers override earlier ones key by key.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RawConfig {
    pub model: Option<String>,
    pub alpha: Option<Number>,
    pub steps: Option<usize>,
    pub engine: Option<String>,
    pub alpha_minus_one: Option<Number>,
    pub riesz_depth: Option<u32>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<FormatList>,
    pub window: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FormatList {
    One(String),
    Many(Vec<String>),
}

impl FormatList {
    fn parse(&self) -> CliResult<Vec<Format>> {
        let items: Vec<&str> = match self {
            FormatList::One(s) => s.split(',').collect(),
            FormatList::Many(v) => v.iter().map(String::as_str).collect(),
        };
        let mut out = Vec::new();
        for item in items {
            let f: Format = item.parse()?;
            if !out.contains(&f) {
                out.push(f);
            }
        }
        Ok(out)
    }
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl RawConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::from_toml(&text)
    }

    /// `self` with every key set in `top` replaced.
    pub fn overlay(mut self, top: &RawConfig) -> Self {
        overlay!(self, top; model, alpha, steps, engine, alpha_minus_one, riesz_depth, seed,
                 trials, threads, out, format, window);
        self
    }

    pub fn resolve(&self) -> CliResult<RunConfig> {
        let model_name = self.model.as_deref().unwrap_or("hadamard");
        let model = match model_name {
            "hadamard" => Model::Quantum(ModelSpec::Hadamard),
            "constant" => {
                let alpha = self
                    .alpha
                    .as_ref()
                    .ok_or_else(|| CliError::Config("model 'constant' needs --alpha".into()))?
                    .value()?;
                Model::Quantum(ModelSpec::Constant { alpha })
            }
            "polynomial-coin" | "polynomial_coin" => Model::Quantum(ModelSpec::PolynomialCoin),
            "riesz" => {
                let a = match &self.alpha_minus_one {
                    Some(n) => n.value()?,
                    None => 0.0,
                };
                Model::Quantum(ModelSpec::Riesz {
                    alpha_minus_one: C64::new(a, 0.0),
                    depth: self.riesz_depth.unwrap_or(DEFAULT_RIESZ_DEPTH),
                })
            }
            other => match other.strip_prefix("classical-") {
                Some(mode) => Model::Classical(mode.parse()?),
                None => return Err(CliError::Config(format!("unknown model '{other}'"))),
            },
        };
        if let Model::Quantum(spec) = &model {
            spec.validate()?;
        }
        let engine: Engine = match &self.engine {
            Some(e) => e.parse().map_err(|_| CliError::Config(format!("unknown engine '{e}'")))?,
            None => Engine::Density,
        };
        let steps = self.steps.unwrap_or(DEFAULT_STEPS);
        let trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        if let Some(w) = self.window {
            if w < steps + 2 {
                return Err(CliError::Config(format!(
                    "window half-width {w} is below steps + 2 = {}",
                    steps + 2
                )));
            }
        }
        let config = RunConfig {
            model,
            steps,
            engine,
            window: self.window,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            trials,
            formats: match &self.format {
                Some(f) => f.parse()?,
                None => vec![Format::Csv, Format::Json],
            },
            out: self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            threads: self.threads,
        };
        config.check_guards()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub steps: usize,
    pub engine: Engine,
    pub window: Option<usize>,
    pub seed: u64,
    pub trials: u64,
    pub formats: Vec<Format>,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn check_guards(&self) -> CliResult<()> {
        match self.model {
            Model::Quantum(_) if self.engine == Engine::Brute && self.steps > BRUTE_FORCE_LIMIT => {
                Err(CliError::Guard(format!(
                    "brute force needs steps ≤ {BRUTE_FORCE_LIMIT}, got {}; use the density or transform engine",
                    self.steps
                )))
            }
            Model::Classical(ClassicalMode::Enumerate)
                if self.steps > occwalk::classical::ENUMERATION_LIMIT =>
            {
                Err(CliError::Guard(format!(
                    "path enumeration needs steps ≤ {}, got {}",
                    occwalk::classical::ENUMERATION_LIMIT,
                    self.steps
                )))
            }
            _ => Ok(()),
        }
    }

    /// Name of the method that produced the numbers.
    pub fn engine_label(&self) -> &'static str {
        match self.model {
            Model::Quantum(_) => self.engine.as_str(),
            Model::Classical(mode) => mode.as_str(),
        }
    }

    /// Only the keys that influence the numbers; output location, formats
    /// and thread count are left out.
    pub fn canonical(&self) -> Value {
        let mut v = json!({ "model": self.model.to_string(), "steps": self.steps });
        let obj = v.as_object_mut().expect("object literal");
        match &self.model {
            Model::Quantum(spec) => {
                obj.insert("engine".into(), json!(self.engine.as_str()));
                obj.insert("window".into(), json!(self.window));
                match spec {
                    ModelSpec::Constant { alpha } => {
                        obj.insert("alpha".into(), json!(alpha));
                    }
                    ModelSpec::Riesz { alpha_minus_one, depth } => {
                        obj.insert("alpha_minus_one".into(), json!(alpha_minus_one.re));
                        obj.insert("riesz_depth".into(), json!(depth));
                    }
                    _ => {}
                }
            }
            Model::Classical(ClassicalMode::MonteCarlo) => {
                obj.insert("seed".into(), json!(self.seed));
                obj.insert("trials".into(), json!(self.trials));
                obj.insert("rng".into(), json!(occwalk::classical::RNG_ALGORITHM));
            }
            Model::Classical(_) => {}
        }
        v
    }

    /// SHA-256 over the canonical configuration and the tool version.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical().to_string().as_bytes());
        h.update(b"\n");
        h.update(VERSION.as_bytes());
        hex::encode(h.finalize())
    }

    pub fn stem(&self) -> String {
        format!("{}-n{}-{}-{}", self.model.slug(), self.steps, self.engine_label(), &self.hash()[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/5").unwrap(), 0.6);
        assert_eq!(parse_rational(" -1/2 ").unwrap(), -0.5);
        assert_eq!(parse_rational("0.25").unwrap(), 0.25);
        for bad in ["1/0", "x", "1/2/3", "inf"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_override_file() {
        let file = RawConfig::from_toml("model = \"constant\"\nalpha = \"3/5\"\nsteps = 10\n").unwrap();
        let flags = RawConfig { steps: Some(12), ..Default::default() };
        let c = file.overlay(&flags).resolve().unwrap();
        assert_eq!(c.steps, 12);
        assert_eq!(c.model, Model::Quantum(ModelSpec::Constant { alpha: 0.6 }));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RawConfig::from_toml("colour = 1").is_err());
        let r = |s: &str| RawConfig::from_toml(s).unwrap().resolve();
        assert!(matches!(r("model = \"constant\""), Err(CliError::Config(_))));
        assert!(matches!(r("model = \"constant\"\nalpha = 1"), Err(CliError::Config(_))));
        assert!(matches!(r("model = \"nope\""), Err(CliError::Config(_))));
        assert!(matches!(r("engine = \"brute\"\nsteps = 21"), Err(CliError::Guard(_))));
        assert!(matches!(r("model = \"classical-enumerate\"\nsteps = 30"), Err(CliError::Guard(_))));
        assert!(matches!(r("steps = 10\nwindow = 5"), Err(CliError::Config(_))));
        assert!(matches!(r("format = \"png\""), Err(CliError::Config(_))));
    }

    #[test]
    fn hash_ignores_presentation_keys() {
        let a = RawConfig::from_toml("steps = 8\nthreads = 1\nout = \"a\"").unwrap().resolve().unwrap();
        let b = RawConfig::from_toml("steps = 8\nthreads = 3\nout = \"b\"\nformat = [\"svg\"]")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RawConfig::from_toml("steps = 9").unwrap().resolve().unwrap();
        assert_ne!(a.hash(), c.hash());
        let d = RawConfig::from_toml("model = \"constant\"\nalpha = 0.6").unwrap().resolve().unwrap();
        let e = RawConfig::from_toml("model = \"constant\"\nalpha = \"3/5\"").unwrap().resolve().unwrap();
        assert_eq!(d.hash(), e.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn format_lists() {
        let c = RawConfig::from_toml("format = \"csv,svg,csv\"").unwrap().resolve().unwrap();
        assert_eq!(c.formats, vec![Format::Csv, Format::Svg]);
        let c = RawConfig::from_toml("format = [\"json\"]").unwrap().resolve().unwrap();
        assert_eq!(c.formats, vec![Format::Json]);
    }
}
