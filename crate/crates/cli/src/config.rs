//! Resolved subcommand settings: defaults, then the config file, then flags.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(self) -> &'static str {
        match self {
            Format::Csv => ",",
            Format::Tsv => "\t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    #[default]
    Periodic,
    Open,
}

impl fmt::Display for BoundaryArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryArg::Periodic => "periodic",
            BoundaryArg::Open => "open",
        })
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat `key = value` file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<std::path::PathBuf>,
    /// Seed for the random number generator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    // Header lines echoed into output files may be pasted back verbatim.
    let body: String = text
        .lines()
        .map(|l| l.strip_prefix("# ").unwrap_or(l))
        .filter(|l| !l.starts_with("ising-chain "))
        .collect::<Vec<_>>()
        .join("\n");
    toml::from_str(&body).with_context(|| format!("parsing config file {}", path.display()))
}

macro_rules! overlay {
    ($cfg:ident, $src:expr, $($field:ident),+ $(,)?) => {
        $( if let Some(v) = $src.$field.clone() { $cfg.$field = v; } )+
    };
}

fn check(cond: bool, field: &str, msg: &str) -> Result<()> {
    if !cond {
        bail!("invalid `{field}`: {msg}");
    }
    Ok(())
}

/// Settings for `spectrum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub n: usize,
    pub gamma: f64,
    pub lambda2: f64,
    pub lambda1_min: f64,
    pub lambda1_max: f64,
    pub lambda1_step: f64,
    pub seed: u64,
    pub format: Format,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            n: 51,
            gamma: 1.0,
            lambda2: 0.1,
            lambda1_min: 0.0,
            lambda1_max: 1.2,
            lambda1_step: 0.01,
            seed: 0,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    /// Chain length [config: n, default 51].
    #[arg(long)]
    pub n: Option<usize>,
    /// Transverse field scale [config: gamma, default 1].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Fixed second-neighbour coupling [config: lambda2, default 0.1].
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Start of the lambda1 scan [config: lambda1_min, default 0].
    #[arg(long)]
    pub lambda1_min: Option<f64>,
    /// End of the lambda1 scan, inclusive [config: lambda1_max, default 1.2].
    #[arg(long)]
    pub lambda1_max: Option<f64>,
    /// Scan step [config: lambda1_step, default 0.01].
    #[arg(long)]
    pub lambda1_step: Option<f64>,
}

impl SpectrumConfig {
    pub fn resolve(common: &CommonArgs, args: &SpectrumArgs) -> Result<Self> {
        let mut cfg: Self = load(common.config.as_deref())?;
        overlay!(cfg, args, n, gamma, lambda2, lambda1_min, lambda1_max, lambda1_step);
        overlay!(cfg, common, seed, format);
        check(cfg.lambda1_step > 0.0, "lambda1_step", "must be positive")?;
        check(cfg.lambda1_max >= cfg.lambda1_min, "lambda1_max", "must not be below lambda1_min")?;
        Ok(cfg)
    }
}

/// Settings for `mingap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MingapConfig {
    pub n: usize,
    pub gamma: f64,
    /// Field strength in units of `gamma`.
    pub h: f64,
    pub m_min: usize,
    pub m_max: usize,
    pub profiles: Vec<String>,
    pub seed: u64,
    pub format: Format,
}

impl Default for MingapConfig {
    fn default() -> Self {
        Self {
            n: 51,
            gamma: 1.0,
            h: 0.1,
            m_min: 1,
            m_max: 14,
            profiles: vec!["linear".into(), "exponential".into()],
            seed: 0,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct MingapArgs {
    /// Chain length, odd [config: n, default 51].
    #[arg(long)]
    pub n: Option<usize>,
    /// Transverse field scale [config: gamma, default 1].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Longitudinal field in units of gamma [config: h, default 0.1].
    #[arg(long)]
    pub h: Option<f64>,
    /// Smallest neighbour count [config: m_min, default 1].
    #[arg(long)]
    pub m_min: Option<usize>,
    /// Largest neighbour count [config: m_max, default 14].
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Decay profiles, comma separated [config: profiles, default linear,exponential].
    #[arg(long, value_delimiter = ',')]
    pub profiles: Option<Vec<String>>,
}

impl MingapConfig {
    pub fn resolve(common: &CommonArgs, args: &MingapArgs) -> Result<Self> {
        let mut cfg: Self = load(common.config.as_deref())?;
        overlay!(cfg, args, n, gamma, h, m_min, m_max, profiles);
        overlay!(cfg, common, seed, format);
        check(cfg.m_min >= 1, "m_min", "must be at least 1")?;
        check(cfg.m_max >= cfg.m_min, "m_max", "must not be below m_min")?;
        check(!cfg.profiles.is_empty(), "profiles", "needs at least one profile")?;
        Ok(cfg)
    }
}

/// Settings for `oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub sizes: Vec<usize>,
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Uniform fields, raw units; zero is always diagonalized as the reference.
    pub fields: Vec<f64>,
    pub boundary: BoundaryArg,
    pub seed: u64,
    pub format: Format,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            sizes: vec![9, 11, 13],
            gamma: 1.0,
            lambda1: 0.5,
            lambda2: 0.0,
            fields: vec![0.0],
            boundary: BoundaryArg::Periodic,
            seed: 0,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct OracleArgs {
    /// Chain lengths, at most 16 [config: sizes, default 9,11,13].
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Transverse field scale [config: gamma, default 1].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Nearest-neighbour coupling [config: lambda1, default 0.5].
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Next-nearest-neighbour coupling [config: lambda2, default 0].
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Uniform longitudinal fields [config: fields, default 0]. With two or
    /// more nonzero values the power-law exponent of the gap shift is fitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub fields: Option<Vec<f64>>,
    /// Spin boundary condition [config: boundary, default periodic].
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
}

impl OracleConfig {
    pub fn resolve(common: &CommonArgs, args: &OracleArgs) -> Result<Self> {
        let mut cfg: Self = load(common.config.as_deref())?;
        overlay!(cfg, args, sizes, gamma, lambda1, lambda2, fields, boundary);
        overlay!(cfg, common, seed, format);
        check(!cfg.sizes.is_empty(), "sizes", "needs at least one chain length")?;
        check(!cfg.fields.is_empty(), "fields", "needs at least one field value")?;
        Ok(cfg)
    }
}

/// Settings for `ec3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ec3Config {
    pub n: usize,
    pub k: usize,
    pub m_values: Vec<usize>,
    pub p_values: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
    pub format: Format,
}

impl Default for Ec3Config {
    fn default() -> Self {
        Self {
            n: 12,
            k: 20,
            m_values: (1..=8).collect(),
            p_values: vec![0.2, 0.3, 0.4, 0.5],
            runs: 100,
            seed: 1,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Ec3Args {
    /// Bits per instance [config: n, default 12].
    #[arg(long)]
    pub n: Option<usize>,
    /// Clauses per instance [config: k, default 20].
    #[arg(long)]
    pub k: Option<usize>,
    /// Locality restrictions M [config: m_values, default 1..8].
    #[arg(long, value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,
    /// Bit probabilities [config: p_values, default 0.2,0.3,0.4,0.5].
    #[arg(long, value_delimiter = ',')]
    pub p_values: Option<Vec<f64>>,
    /// Runs per cell [config: runs, default 100].
    #[arg(long)]
    pub runs: Option<usize>,
}

impl Ec3Config {
    pub fn resolve(common: &CommonArgs, args: &Ec3Args) -> Result<Self> {
        let mut cfg: Self = load(common.config.as_deref())?;
        overlay!(cfg, args, n, k, m_values, p_values, runs);
        overlay!(cfg, common, seed, format);
        check(cfg.runs >= 1, "runs", "must be at least 1")?;
        check(cfg.k >= 1, "k", "must be at least 1")?;
        check(!cfg.m_values.is_empty(), "m_values", "needs at least one value")?;
        check(!cfg.p_values.is_empty(), "p_values", "needs at least one value")?;
        Ok(cfg)
    }
}
