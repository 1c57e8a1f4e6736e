//! Subcommands of the `ising-chain` binary. Each produces a [`Table`] that
//! is rendered with a commented header recording the resolved settings.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use ising_chain::ec3::{estimate_pe, SimParams};
use ising_chain::oracle::{build_hamiltonian, oracle_spectrum, Boundary};
use ising_chain::numeric::power_law_exponent;
use ising_chain::perturb::min_gap_with_field;
use ising_chain::spectrum::spectrum;
use ising_chain::{ChainSpec, CouplingProfile, ProfileKind};
use serde::Serialize;

pub use config::{
    BoundaryArg, CommonArgs, Ec3Args, Ec3Config, Format, MingapArgs, MingapConfig, OracleArgs,
    OracleConfig, SpectrumArgs, SpectrumConfig,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Spectra, minimum gaps, exact-diagonalization checks and Exact Cover 3
/// simulations for extended quantum Ising chains.
///
/// Every subcommand accepts a flat `key = value` config file whose keys are
/// the flag names with underscores (shown in brackets in each subcommand's
/// help). Flags override the file. Output starts with `#` comment lines
/// holding the resolved settings, which can be fed back via `--config`.
#[derive(Debug, Parser)]
#[command(name = "ising-chain", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-fermion levels Lambda_k over a lambda1 scan.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: SpectrumArgs,
    },
    /// Minimum gap with a longitudinal field against the neighbour count M.
    Mingap {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: MingapArgs,
    },
    /// Exact-diagonalization gaps compared with the free-fermion gap.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: OracleArgs,
    },
    /// Error probability of planted Exact Cover 3 instances over an (M, p) grid.
    Ec3 {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: Ec3Args,
    },
}

/// Rendered output of one invocation and where it should go.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub text: String,
}

/// Resolves settings and runs the subcommand without writing anything.
pub fn execute(cli: Cli) -> Result<Output> {
    let (common, text) = match cli.command {
        Command::Spectrum { common, args } => {
            let cfg = SpectrumConfig::resolve(&common, &args)?;
            let text = render("spectrum", &cfg, cfg.format, &cmd_spectrum(&cfg)?)?;
            (common, text)
        }
        Command::Mingap { common, args } => {
            let cfg = MingapConfig::resolve(&common, &args)?;
            let text = render("mingap", &cfg, cfg.format, &cmd_mingap(&cfg)?)?;
            (common, text)
        }
        Command::Oracle { common, args } => {
            let cfg = OracleConfig::resolve(&common, &args)?;
            let text = render("oracle", &cfg, cfg.format, &cmd_oracle(&cfg)?)?;
            (common, text)
        }
        Command::Ec3 { common, args } => {
            let cfg = Ec3Config::resolve(&common, &args)?;
            let text = render("ec3", &cfg, cfg.format, &cmd_ec3(&cfg)?)?;
            (common, text)
        }
    };
    Ok(Output { path: common.out, text })
}

/// Parses `argv` (program name first) and runs it in process.
pub fn run_args<I, T>(argv: I) -> Result<Output>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    execute(Cli::try_parse_from(argv)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// Header comments, column names and rows.
pub fn render<C: Serialize>(command: &str, config: &C, format: Format, table: &Table) -> Result<String> {
    let mut out = format!("# ising-chain {VERSION} {command}\n");
    let settings = toml::to_string(config).context("serializing resolved settings")?;
    for line in settings.lines() {
        out.push_str(&format!("# {line}\n"));
    }
    let sep = format.separator();
    out.push_str(&table.columns.join(sep));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    Ok(out)
}

/// Writes to `path` through a temporary file in the same directory, so a
/// failed run never leaves a partial file; standard output when `None`.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            tmp.write_all(content.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

/// Rounds away the accumulation error of `start + i * step`.
fn grid_value(start: f64, step: f64, i: usize) -> f64 {
    let x = start + i as f64 * step;
    (x * 1e12).round() / 1e12
}

pub fn cmd_spectrum(cfg: &SpectrumConfig) -> Result<Table> {
    let mut table = Table::new(vec!["lambda1", "k", "Lambda_k"]);
    let steps = ((cfg.lambda1_max - cfg.lambda1_min) / cfg.lambda1_step + 1e-9).floor() as usize;
    for i in 0..=steps {
        let l1 = grid_value(cfg.lambda1_min, cfg.lambda1_step, i);
        let profile = CouplingProfile::explicit(vec![l1, cfg.lambda2])?;
        let spec = ChainSpec::new(cfg.n, cfg.gamma, profile)
            .with_context(|| format!("chain at lambda1 = {l1}"))?;
        let s = spectrum(&spec);
        for (k, lambda) in s.k_values.iter().zip(&s.lambda_k) {
            table.rows.push(vec![l1.to_string(), k.to_string(), lambda.to_string()]);
        }
    }
    Ok(table)
}

pub fn cmd_mingap(cfg: &MingapConfig) -> Result<Table> {
    let mut table =
        Table::new(vec!["M", "profile", "mingap_over_Gamma", "mingap_raw", "validity_ratio", "verdict"]);
    for name in &cfg.profiles {
        let kind: ProfileKind = name.parse().map_err(|e| anyhow!("invalid `profiles`: {e}"))?;
        for m in cfg.m_min..=cfg.m_max {
            let profile = CouplingProfile::decaying(kind, m)?;
            let spec = ChainSpec::new(cfg.n, cfg.gamma, profile)
                .and_then(|s| s.with_uniform_field(cfg.h * cfg.gamma))
                .with_context(|| format!("chain with M = {m}"))?;
            let r = min_gap_with_field(&spec)?;
            table.rows.push(vec![
                m.to_string(),
                kind.to_string(),
                r.min_gap_total.to_string(),
                r.min_gap_raw().to_string(),
                r.validity_ratio.to_string(),
                r.verdict.to_string(),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_oracle(cfg: &OracleConfig) -> Result<Table> {
    let mut table = Table::new(vec![
        "N",
        "lambda1",
        "lambda2",
        "h",
        "gap_oracle",
        "gap_analytic",
        "discrepancy",
        "scaled_discrepancy",
        "fit_exponent",
    ]);
    let boundary = match cfg.boundary {
        BoundaryArg::Periodic => Boundary::Periodic,
        BoundaryArg::Open => Boundary::Open,
    };
    let lambdas: Vec<f64> = match (cfg.lambda1, cfg.lambda2) {
        (l1, l2) if l1 == 0.0 && l2 == 0.0 => Vec::new(),
        (l1, l2) if l2 == 0.0 => vec![l1],
        (l1, l2) => vec![l1, l2],
    };
    let nonzero: Vec<f64> = cfg.fields.iter().copied().filter(|h| *h != 0.0).collect();
    for &n in &cfg.sizes {
        let base = ChainSpec::new(n, cfg.gamma, CouplingProfile::explicit(lambdas.clone())?)
            .with_context(|| format!("chain with N = {n}"))?;
        let gap_analytic = spectrum(&base).gap;
        let gap_at = |h: f64| -> Result<f64> {
            let spec = base.clone().with_uniform_field(h)?;
            Ok(oracle_spectrum(&build_hamiltonian(&spec, boundary)?, 2)?.gap)
        };
        let gap_zero = gap_at(0.0)?;
        let gaps: Vec<f64> =
            cfg.fields.iter().map(|&h| if h == 0.0 { Ok(gap_zero) } else { gap_at(h) }).collect::<Result<_>>()?;
        let exponent = if nonzero.len() >= 2 {
            let shifts: Vec<f64> = cfg
                .fields
                .iter()
                .zip(&gaps)
                .filter(|(h, _)| **h != 0.0)
                .map(|(_, g)| g - gap_zero)
                .collect();
            let abs: Vec<f64> = nonzero.iter().map(|h| h.abs()).collect();
            power_law_exponent(&abs, &shifts).to_string()
        } else {
            String::new()
        };
        for (&h, &gap) in cfg.fields.iter().zip(&gaps) {
            let discrepancy = (gap - gap_analytic).abs();
            table.rows.push(vec![
                n.to_string(),
                cfg.lambda1.to_string(),
                cfg.lambda2.to_string(),
                h.to_string(),
                gap.to_string(),
                gap_analytic.to_string(),
                discrepancy.to_string(),
                (n as f64 * discrepancy / cfg.gamma).to_string(),
                exponent.clone(),
            ]);
        }
    }
    Ok(table)
}

pub fn cmd_ec3(cfg: &Ec3Config) -> Result<Table> {
    let mut table =
        Table::new(vec!["N", "K", "M", "p", "runs", "p_E", "half_width", "shortages", "seed"]);
    for &p in &cfg.p_values {
        for &m in &cfg.m_values {
            let r = estimate_pe(SimParams { n: cfg.n, m, p, k: cfg.k, runs: cfg.runs, seed: cfg.seed })
                .with_context(|| format!("cell M = {m}, p = {p}"))?;
            table.rows.push(vec![
                cfg.n.to_string(),
                cfg.k.to_string(),
                m.to_string(),
                p.to_string(),
                cfg.runs.to_string(),
                r.p_e.to_string(),
                r.half_width.to_string(),
                r.shortages.to_string(),
                cfg.seed.to_string(),
            ]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values_are_clean() {
        assert_eq!(grid_value(0.0, 0.01, 30), 0.3);
        assert_eq!(grid_value(0.0, 0.01, 90), 0.9);
    }

    #[test]
    fn uncoupled_spectrum_row() {
        let cfg = SpectrumConfig { lambda1_max: 0.0, lambda2: 0.0, n: 7, ..Default::default() };
        let t = cmd_spectrum(&cfg).unwrap();
        assert_eq!(t.rows.len(), 7);
        assert!(t.rows.iter().all(|r| r[2] == "1"));
    }

    #[test]
    fn render_layout() {
        let table = Table { columns: vec!["a", "b"], rows: vec![vec!["1".into(), "2".into()]] };
        let cfg = Ec3Config::default();
        let text = render("ec3", &cfg, Format::Tsv, &table).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# ising-chain {VERSION} ec3"));
        assert!(lines.contains(&"# runs = 100"));
        assert_eq!(&lines[lines.len() - 2..], &["a\tb", "1\t2"]);
    }

    #[test]
    fn single_run_cells_are_zero_or_one() {
        let cfg = Ec3Config { runs: 1, m_values: vec![2, 5], p_values: vec![0.3], ..Default::default() };
        let t = cmd_ec3(&cfg).unwrap();
        let col = t.column("p_E").unwrap();
        assert!(t.rows.iter().all(|r| r[col] == "0" || r[col] == "1"));
    }
}
