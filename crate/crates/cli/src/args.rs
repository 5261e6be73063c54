use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fincov::{NetworkParams, Preset};

use crate::error::{usage, CliResult};

#[derive(Debug, Parser)]
#[command(name = "fincov", version, about = "Coverage of finite-area cellular networks with non-uniform access points")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Serving-distance pdf as CSV (r,d1,pdf).
    Nnd,
    /// Laplace functional of the interference vs MU position (r,d1,laplace).
    Laplace,
    /// Coverage probability vs MU position.
    Coverage,
    /// Coverage-maximising deployment shape for a sweep of MU profiles.
    Optimize,
    /// Monte Carlo estimate of one quantity.
    Simulate {
        #[arg(long, value_enum, default_value_t = Quantity::Coverage)]
        quantity: Quantity,
        /// MU bearing when --r fixes its radius.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = SamplerArg::Inverse)]
        sampler: SamplerArg,
    },
    /// Analytic-vs-simulation checks at reduced trial counts.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Coverage,
    Nnd,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Inverse,
    Thinning,
}

/// Flags shared by every subcommand. List-valued flags take comma-separated
/// values.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Domain radius.
    #[arg(long = "R", global = true)]
    pub radius: Option<f64>,
    /// Peak AP intensity(ies)
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda0: Vec<f64>,
    /// Deployment shape(s), within [-2/R^2, 2/R^2].
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "preset")]
    pub b: Vec<f64>,
    /// MU density shape(s), within [-2/R^2, 2/R^2].
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub beta: Vec<f64>,
    /// Path-loss exponent(s)
    #[arg(long, global = true, value_delimiter = ',')]
    pub eta: Vec<f64>,
    /// SINR threshold
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Transmit power
    #[arg(long, global = true)]
    pub power: Option<f64>,
    /// Noise power
    #[arg(long, global = true)]
    pub noise: Option<f64>,
    /// MU distance(s) from the centre
    #[arg(long, global = true, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Serving distance(s)
    #[arg(long, global = true, value_delimiter = ',')]
    pub d1: Vec<f64>,
    /// Largest serving distance on the nnd grid
    #[arg(long = "d1-max", global = true)]
    pub d1_max: Option<f64>,
    /// Grid size for the command
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Monte Carlo trials
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Master RNG seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output CSV path (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// uniform | concave | convex
    #[arg(long, global = true, value_delimiter = ',')]
    pub preset: Vec<Preset>,
    /// key=value file; flags override it, it overrides defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 16] = [
    "R", "lambda0", "b", "beta", "eta", "q", "power", "noise", "r", "d1", "d1-max", "steps", "trials", "seed", "out",
    "preset",
];

pub fn read_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", no + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if !CONFIG_KEYS.contains(&key) {
            return Err(usage(format!("config line {}: unknown key '{key}'", no + 1)));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// A deployment shape to evaluate, with the label used for its output block.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub label: String,
    pub b: f64,
}

/// Flags merged over the config file.
#[derive(Debug, Clone)]
pub struct Resolved {
    opts: Options,
    file: BTreeMap<String, String>,
}

impl Resolved {
    pub fn new(opts: Options) -> CliResult<Self> {
        let file = match &opts.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        Ok(Self { opts, file })
    }

    fn from_file<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.file
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| usage(format!("config: bad value '{v}' for {key}"))))
            .transpose()
    }

    fn list_from_file<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>> {
        self.file
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse::<T>().map_err(|_| usage(format!("config: bad value '{s}' for {key}"))))
                    .collect()
            })
            .transpose()
    }

    fn scalar<T: FromStr + Copy>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.from_file(key)?.unwrap_or(default)),
        }
    }

    fn list(&self, flag: &[f64], key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        Ok(self.list_from_file(key)?.unwrap_or_else(|| default.to_vec()))
    }

    pub fn radius(&self) -> CliResult<f64> {
        let r = self.scalar(self.opts.radius, "R", 5.0)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(usage(format!("--R must be positive, got {r}")));
        }
        Ok(r)
    }

    pub fn lambda0s(&self, default: &[f64]) -> CliResult<Vec<f64>> {
        self.list(&self.opts.lambda0, "lambda0", default)
    }

    pub fn etas(&self, default: &[f64]) -> CliResult<Vec<f64>> {
        self.list(&self.opts.eta, "eta", default)
    }

    pub fn betas(&self, default: &[f64]) -> CliResult<Vec<f64>> {
        self.list(&self.opts.beta, "beta", default)
    }

    pub fn radii(&self, default: &[f64]) -> CliResult<Vec<f64>> {
        self.list(&self.opts.r, "r", default)
    }

    pub fn radii_given(&self) -> bool {
        !self.opts.r.is_empty() || self.file.contains_key("r")
    }

    pub fn d1s(&self, default: &[f64]) -> CliResult<Vec<f64>> {
        self.list(&self.opts.d1, "d1", default)
    }

    pub fn d1_max(&self, default: f64) -> CliResult<f64> {
        self.scalar(self.opts.d1_max, "d1-max", default)
    }

    pub fn steps(&self, default: usize) -> CliResult<usize> {
        let s = self.scalar(self.opts.steps, "steps", default)?;
        if s == 0 {
            return Err(usage("--steps must be >= 1"));
        }
        Ok(s)
    }

    pub fn trials(&self, default: u64) -> CliResult<u64> {
        let t = self.scalar(self.opts.trials, "trials", default)?;
        if t == 0 {
            return Err(usage("--trials must be >= 1"));
        }
        Ok(t)
    }

    pub fn seed(&self) -> CliResult<Option<u64>> {
        match self.opts.seed {
            Some(s) => Ok(Some(s)),
            None => self.from_file("seed"),
        }
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.opts.out.clone().or_else(|| self.file.get("out").map(PathBuf::from))
    }

    /// Deployment shapes from `--b` or `--preset` (flags first, then file),
    /// falling back to `default`.
    pub fn shapes(&self, default: &[Preset]) -> CliResult<Vec<Shape>> {
        let radius = self.radius()?;
        let from_b = |bs: Vec<f64>| -> Vec<Shape> {
            bs.into_iter()
                .map(|b| {
                    let label = Preset::ALL
                        .into_iter()
                        .find(|p| p.b(radius) == b)
                        .map(|p| p.name().to_string())
                        .unwrap_or_else(|| format!("b{b}"));
                    Shape { label, b }
                })
                .collect()
        };
        let from_presets = |ps: Vec<Preset>| -> Vec<Shape> {
            ps.into_iter()
                .map(|p| Shape {
                    label: p.name().to_string(),
                    b: p.b(radius),
                })
                .collect()
        };
        if !self.opts.b.is_empty() {
            return Ok(from_b(self.opts.b.clone()));
        }
        if !self.opts.preset.is_empty() {
            return Ok(from_presets(self.opts.preset.clone()));
        }
        let file_b: Option<Vec<f64>> = self.list_from_file("b")?;
        let file_preset: Option<Vec<Preset>> = self.list_from_file("preset")?;
        match (file_b, file_preset) {
            (Some(_), Some(_)) => Err(usage("config sets both b and preset")),
            (Some(bs), None) => Ok(from_b(bs)),
            (None, Some(ps)) => Ok(from_presets(ps)),
            (None, None) => Ok(from_presets(default.to_vec())),
        }
    }

    /// Base parameters with `b = 0`, `λ0` and `η` as given.
    pub fn params(&self, lambda0: f64, eta: f64, default_q: f64) -> CliResult<NetworkParams> {
        let p = NetworkParams {
            radius: self.radius()?,
            lambda0,
            b: 0.0,
            eta,
            power: self.scalar(self.opts.power, "power", 1.0)?,
            noise: self.scalar(self.opts.noise, "noise", 1.0)?,
            q: self.scalar(self.opts.q, "q", default_q)?,
        };
        p.validate().map_err(|e| usage(e.to_string()))?;
        Ok(p)
    }

    /// A parameter set with shape `b`, reported as a usage error when out of range.
    pub fn with_shape(p: &NetworkParams, b: f64) -> CliResult<NetworkParams> {
        p.with_b(b).map_err(|e| usage(e.to_string()))
    }
}

pub fn single(values: Vec<f64>, name: &str) -> CliResult<f64> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(usage(format!("--{name} takes a single value for this command"))),
    }
}
