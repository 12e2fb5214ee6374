//! Run configuration: presets, parameter files and inline flags.
//!
//! Parameter files hold one `key = value` pair per line; `#` starts a comment. Keys are
//! `q`, `alpha`, `beta`, `gamma`, `delta`, `N` and `theta` (comma-separated complex numbers such
//! as `1, 0.9+0.1i`). Precedence, lowest first: preset, parameter file, inline flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use asep2_core::model::{BoundaryFamily, ModelParams};
use asep2_core::Complex64;
use clap::{Args, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    File {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("invalid {key}: {msg}")]
    Value { key: &'static str, msg: String },
    #[error(transparent)]
    Model(#[from] asep2_core::model::ModelError),
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "paper-A")]
    PaperA,
    #[value(name = "paper-B")]
    PaperB,
}

impl Preset {
    fn family(self) -> BoundaryFamily {
        match self {
            Preset::PaperA => BoundaryFamily::A,
            Preset::PaperB => BoundaryFamily::B,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// Parameter file (`key = value` lines).
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<BoundaryFamily>,
    /// Number of sites.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Inhomogeneities, comma separated (`1,0.9+0.1i`).
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn parse_family(s: &str) -> Result<BoundaryFamily, String> {
    s.parse()
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    Complex64::from_str(&t).map_err(|_| format!("'{}' is not a complex number", s.trim()))
}

pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(parse_complex).collect()
}

/// Values read from a parameter file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FileValues {
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub n: Option<usize>,
    pub theta: Option<Vec<Complex64>>,
}

pub fn parse_param_text(text: &str, path: &Path) -> Result<FileValues, ConfigError> {
    let mut v = FileValues::default();
    for (i, raw) in text.lines().enumerate() {
        let err = |msg: String| ConfigError::File {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected `key = value`".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let real = |value: &str| value.parse::<f64>().map_err(|e| err(format!("{key}: {e}")));
        match key {
            "q" => v.q = Some(real(value)?),
            "alpha" => v.alpha = Some(real(value)?),
            "beta" => v.beta = Some(real(value)?),
            "gamma" => v.gamma = Some(real(value)?),
            "delta" => v.delta = Some(real(value)?),
            "N" => v.n = Some(value.parse().map_err(|e| err(format!("N: {e}")))?),
            "theta" => v.theta = Some(parse_complex_list(value).map_err(err)?),
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }
    Ok(v)
}

/// Fully resolved model selection.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub family: BoundaryFamily,
    pub params: ModelParams,
}

/// Default chain length.
pub const DEFAULT_N: usize = 2;

/// Resolves family and parameters. `implied` is a family fixed by another flag (e.g. the variant).
pub fn resolve(
    args: &CommonArgs,
    implied: Option<BoundaryFamily>,
) -> Result<Resolved, ConfigError> {
    let file = match &args.params {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.clone(),
                source,
            })?;
            parse_param_text(&text, path)?
        }
        None => FileValues::default(),
    };
    let family = match (args.family, implied, args.preset) {
        (Some(f), Some(g), _) if f != g => {
            return Err(ConfigError::Other(format!(
                "--family {f} conflicts with a variant of family {g}"
            )));
        }
        (Some(f), _, _) | (None, Some(f), _) => f,
        (None, None, Some(p)) => p.family(),
        (None, None, None) => BoundaryFamily::A,
    };
    let base = ModelParams::preset(args.preset.map(Preset::family).unwrap_or(family), 1);
    let theta_flag = args
        .theta
        .as_deref()
        .map(parse_complex_list)
        .transpose()
        .map_err(|msg| ConfigError::Value { key: "theta", msg })?;
    let theta = theta_flag.or(file.theta);
    let n = args.n.or(file.n);
    let theta = match (theta, n) {
        (Some(t), Some(n)) if t.len() != n => {
            return Err(ConfigError::Other(format!(
                "theta has {} entries but N = {}",
                t.len(),
                n
            )));
        }
        (Some(t), _) => t,
        (None, n) => vec![Complex64::new(1.0, 0.0); n.unwrap_or(DEFAULT_N)],
    };
    let pick = |flag: Option<f64>, file: Option<f64>, preset: f64| flag.or(file).unwrap_or(preset);
    let params = ModelParams::new(
        pick(args.q, file.q, base.q()),
        pick(args.alpha, file.alpha, base.alpha()),
        pick(args.beta, file.beta, base.beta()),
        pick(args.gamma, file.gamma, base.gamma()),
        pick(args.delta, file.delta, base.delta()),
        theta,
    )?;
    Ok(Resolved { family, params })
}

/// Grid `start:stop:count`; endpoints may be complex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: Complex64,
    pub stop: Complex64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not start:stop:count"));
        };
        let count: usize = n.trim().parse().map_err(|e| format!("grid count: {e}"))?;
        if count < 2 {
            return Err("grid count must be at least 2".into());
        }
        Ok(GridSpec {
            start: parse_complex(a)?,
            stop: parse_complex(b)?,
            count,
        })
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            start: Complex64::new(0.2, 0.0),
            stop: Complex64::new(2.0, 0.0),
            count: 181,
        }
    }
}
