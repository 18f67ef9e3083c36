//! Flag definitions and the flat `key = value` config file.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nlinterf::{Complex64, Scheme};

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "NLINTERF_SEED";

#[derive(Debug, Parser)]
#[command(name = "nlinterf", version, about = "Fisher information, LOCC bounds, MLE studies and SNR tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Fisher,
    Bound,
    Simulate,
    Snr,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numeric and closed-form Fisher matrices per parameter tuple.
    Fisher(SweepArgs),
    /// Fisher trace norm against the LOCC bound.
    Bound(SweepArgs),
    /// Maximum-likelihood ensembles against the Cramér–Rao bound.
    Simulate(SweepArgs),
    /// Strong-light signal-to-noise table.
    Snr(SweepArgs),
}

impl Command {
    pub fn split(self) -> (CommandKind, SweepArgs) {
        match self {
            Command::Fisher(a) => (CommandKind::Fisher, a),
            Command::Bound(a) => (CommandKind::Bound, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::Snr(a) => (CommandKind::Snr, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ScheduleKind {
    /// `δ, δ + π/2, δ, …`
    #[default]
    Alternating,
    Constant,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Measurement schemes (direct, entangled, heterodyne, homodyne).
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme)]
    pub scheme: Vec<Scheme>,
    /// Mean photon numbers: a list `a,b,c` or a range `lo:hi:n`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Vec<String>,
    /// Degree of coherence as `g1,g2`; repeat for several values.
    #[arg(long, value_parser = parse_g, allow_hyphen_values = true)]
    pub g: Vec<Complex64>,
    /// Relative phases δ.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub delta: Vec<f64>,
    /// Phase schedule for simulated records.
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleKind>,
    /// Measurements per record.
    #[arg(long, value_parser = parse_count)]
    pub m: Option<usize>,
    /// Independent records per ensemble.
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<usize>,
    /// Master seed; falls back to NLINTERF_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo shots per phase for `snr --verify`.
    #[arg(long, value_parser = parse_count)]
    pub shots: Option<usize>,
    /// Quadrature nodes per axis for continuous schemes.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Quadrature extent for continuous schemes.
    #[arg(long)]
    pub grid_extent: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file with defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run the canonical parameter sets of the acceptance suite.
    #[arg(long)]
    pub paper_table: bool,
    /// Check results against their tolerances (Monte Carlo agreement for
    /// `snr`, variance/CRB ratios for `simulate`).
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Parser)]
#[command(name = "config", no_binary_name = true, disable_help_flag = true, disable_version_flag = true)]
struct ConfigArgs {
    #[command(flatten)]
    args: SweepArgs,
}

impl SweepArgs {
    /// Fills every flag not given on the command line from `--config`.
    pub fn with_config(self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        Ok(self.or(file))
    }

    fn or(self, other: Self) -> Self {
        fn vec<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Self {
            scheme: vec(self.scheme, other.scheme),
            eps: vec(self.eps, other.eps),
            g: vec(self.g, other.g),
            delta: vec(self.delta, other.delta),
            schedule: self.schedule.or(other.schedule),
            m: self.m.or(other.m),
            trials: self.trials.or(other.trials),
            seed: self.seed.or(other.seed),
            shots: self.shots.or(other.shots),
            grid_points: self.grid_points.or(other.grid_points),
            grid_extent: self.grid_extent.or(other.grid_extent),
            format: self.format.or(other.format),
            out: self.out.or(other.out),
            config: self.config,
            paper_table: self.paper_table || other.paper_table,
            verify: self.verify || other.verify,
        }
    }

    /// Seed from the flags or config, else from the environment.
    pub fn seed_or_env(&self) -> Result<Option<u64>> {
        if let Some(s) = self.seed {
            return Ok(Some(s));
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map(Some).map_err(|_| anyhow!("{SEED_ENV} is not an unsigned integer: {v:?}")),
            Err(_) => Ok(None),
        }
    }

    pub fn epsilons(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for item in &self.eps {
            out.extend(parse_eps_item(item)?);
        }
        Ok(out)
    }
}

const BOOLEAN_KEYS: [&str; 2] = ["paper-table", "verify"];

/// Parses a config file into flags. Keys are long flag names (`-` or `_`);
/// `g` accepts several pairs separated by `;`.
fn read_config(path: &Path) -> Result<SweepArgs> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut argv: Vec<String> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected `key = value`", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            bail!("config line {}: nested config files are not supported", n + 1);
        }
        if BOOLEAN_KEYS.contains(&key.as_str()) {
            match value {
                "true" => argv.push(format!("--{key}")),
                "false" => {}
                _ => bail!("config line {}: `{key}` must be true or false", n + 1),
            }
        } else if key == "g" {
            for pair in value.split(';') {
                argv.push(format!("--g={}", pair.trim()));
            }
        } else {
            argv.push(format!("--{key}={value}"));
        }
    }
    let parsed = ConfigArgs::try_parse_from(argv)
        .map_err(|e| anyhow!("config {}: {}", path.display(), e.render().to_string().trim()))?;
    Ok(parsed.args)
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    Scheme::ALL
        .into_iter()
        .find(|x| x.name() == s.trim().to_ascii_lowercase())
        .ok_or_else(|| format!("unknown scheme `{s}` (direct, entangled, heterodyne, homodyne)"))
}

fn parse_g(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    match parts.as_slice() {
        [a] => Ok(Complex64::new(num(a)?, 0.0)),
        [a, b] => Ok(Complex64::new(num(a)?, num(b)?)),
        _ => Err(format!("expected `g1,g2`, got `{s}`")),
    }
}

/// Accepts integers and integral floats such as `1e5`.
fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 => Ok(x as usize),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

fn parse_eps_item(item: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| anyhow!("`{t}` is not a number in --eps"));
    let parts: Vec<&str> = item.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [lo, hi, n] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let n = parse_count(n.trim()).map_err(|e| anyhow!(e))?;
            if n < 2 {
                bail!("--eps range needs at least two points");
            }
            Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
        }
        _ => bail!("--eps item `{item}` is neither a number nor `lo:hi:n`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_lists_and_ranges() {
        let a = SweepArgs { eps: vec!["0.1".into(), "0:1:5".into()], ..Default::default() };
        assert_eq!(a.epsilons().unwrap(), vec![0.1, 0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_eps_item("1:2").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert_eq!(parse_count("200"), Ok(200));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-1").is_err());
    }

    #[test]
    fn g_pairs() {
        assert_eq!(parse_g("0.6,-0.3"), Ok(Complex64::new(0.6, -0.3)));
        assert_eq!(parse_g("0.6"), Ok(Complex64::new(0.6, 0.0)));
        assert!(parse_g("a,b").is_err());
    }
}
