//! Command-line flags, the key=value config file, and their merge.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmc_core::{DeConfig, ObjectiveId, RmcConfig};

#[derive(Debug, Parser)]
#[command(name = "rmc", version, about = "Rotational mutation and crossover search over box domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run; prints the run result.
    Optimize(Options),
    /// Independent replicates of one function; one record per run.
    Benchmark(Options),
    /// Replicated summary rows for F1..F5 (or just --function).
    Table2(Options),
    /// Published generation counts plus measured RMC and DE rows.
    Table3(Options),
    /// Exhaustive grid search for a deterministic low-dimensional function.
    Oracle(Options),
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Optimize(o)
            | Command::Benchmark(o)
            | Command::Table2(o)
            | Command::Table3(o)
            | Command::Oracle(o) => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Rmc,
    De,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_function(s: &str) -> Result<ObjectiveId, String> {
    ObjectiveId::from_str(s).map_err(|_| {
        format!("unknown function '{s}' (expected one of f1, f2, f3, f4, f5, gp, e)")
    })
}

/// Comma-separated step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder(pub Vec<f64>);

fn parse_ladder(s: &str) -> Result<Ladder, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("'{t}' is not a number"))
        })
        .collect::<Result<_, _>>()
        .map(Ladder)
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    #[arg(long, value_parser = parse_function)]
    pub function: Option<ObjectiveId>,
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    /// Comma-separated mutation steps, ascending.
    #[arg(long, value_parser = parse_ladder)]
    pub alpha_ladder: Option<Ladder>,
    /// Comma-separated redirect steps, ascending.
    #[arg(long, value_parser = parse_ladder)]
    pub beta_ladder: Option<Ladder>,
    #[arg(long)]
    pub direction_budget: Option<usize>,
    #[arg(long)]
    pub vertex_budget: Option<usize>,
    #[arg(long)]
    pub max_generations: Option<u64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the event trace of an `optimize` run as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Grid points per axis for `oracle`.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Raised for bad flags or config entries; maps to the usage exit code.
#[derive(Debug)]
pub struct UsageError(pub String);

const KEYS: [&str; 13] = [
    "function",
    "algorithm",
    "alpha-ladder",
    "beta-ladder",
    "direction-budget",
    "vertex-budget",
    "max-generations",
    "replicates",
    "seed",
    "format",
    "output",
    "trace",
    "resolution",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            UsageError(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(UsageError(format!("config line {}: unknown key '{key}'", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn config_value<T>(
    map: &BTreeMap<String, String>,
    key: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, UsageError> {
    map.get(key)
        .map(|v| parse(v).map_err(|e| UsageError(format!("config key '{key}': {e}"))))
        .transpose()
}

fn parsed<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

fn value_enum<T: ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s, true)
}

impl Options {
    /// Fills unset fields from a config map.
    pub fn merge(mut self, map: &BTreeMap<String, String>) -> Result<Self, UsageError> {
        macro_rules! fill {
            ($field:ident, $key:literal, $parse:expr) => {
                if self.$field.is_none() {
                    self.$field = config_value(map, $key, $parse)?;
                }
            };
        }
        fill!(function, "function", parse_function);
        fill!(algorithm, "algorithm", value_enum::<Algorithm>);
        fill!(alpha_ladder, "alpha-ladder", parse_ladder);
        fill!(beta_ladder, "beta-ladder", parse_ladder);
        fill!(direction_budget, "direction-budget", parsed::<usize>);
        fill!(vertex_budget, "vertex-budget", parsed::<usize>);
        fill!(max_generations, "max-generations", parsed::<u64>);
        fill!(replicates, "replicates", parsed::<usize>);
        fill!(seed, "seed", parsed::<u64>);
        fill!(format, "format", value_enum::<Format>);
        fill!(output, "output", parsed::<PathBuf>);
        fill!(trace, "trace", parsed::<PathBuf>);
        fill!(resolution, "resolution", parsed::<usize>);
        Ok(self)
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm.unwrap_or(Algorithm::Rmc)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn require_function(&self) -> Result<ObjectiveId, UsageError> {
        self.function
            .ok_or_else(|| UsageError("--function is required for this command".into()))
    }

    /// Rejects RMC-only flags when DE is selected.
    pub fn check_algorithm_flags(&self) -> Result<(), UsageError> {
        if self.algorithm() == Algorithm::De {
            let rmc_only = [
                ("--alpha-ladder", self.alpha_ladder.is_some()),
                ("--beta-ladder", self.beta_ladder.is_some()),
                ("--direction-budget", self.direction_budget.is_some()),
                ("--vertex-budget", self.vertex_budget.is_some()),
            ];
            if let Some((flag, _)) = rmc_only.iter().find(|(_, set)| *set) {
                return Err(UsageError(format!("{flag} only applies to --algorithm rmc")));
            }
        }
        Ok(())
    }

    pub fn rmc_config(&self) -> RmcConfig {
        let mut c = RmcConfig::default();
        if let Some(a) = &self.alpha_ladder {
            c.alpha_ladder = a.0.clone();
        }
        if let Some(b) = &self.beta_ladder {
            c.beta_ladder = b.0.clone();
        }
        if let Some(d) = self.direction_budget {
            c.direction_budget = d;
        }
        if let Some(v) = self.vertex_budget {
            c.vertex_budget = v;
        }
        if let Some(g) = self.max_generations {
            c.max_generations = g;
        }
        c.seed = self.seed();
        c
    }

    /// Applies overrides on top of a DE config that may already carry a target.
    pub fn de_config(&self, mut c: DeConfig) -> DeConfig {
        if let Some(g) = self.max_generations {
            c.max_generations = g;
        }
        c.seed = self.seed();
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let map = parse_config("# comment\nfunction = f2\nmax_generations=50 # trailing\n\n").unwrap();
        assert_eq!(map["function"], "f2");
        assert_eq!(map["max-generations"], "50");
        assert!(parse_config("nonsense").is_err());
        assert!(parse_config("colour = blue").is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let map = parse_config("seed = 3\nfunction = f1\nalpha-ladder = 0.5, 1").unwrap();
        let opts = Options {
            seed: Some(9),
            ..Options::default()
        }
        .merge(&map)
        .unwrap();
        assert_eq!(opts.seed(), 9);
        assert_eq!(opts.function, Some(ObjectiveId::F1));
        assert_eq!(opts.alpha_ladder, Some(Ladder(vec![0.5, 1.0])));
    }

    #[test]
    fn bad_config_values_are_usage_errors() {
        let map = parse_config("function = nosuch").unwrap();
        assert!(Options::default().merge(&map).is_err());
        let map = parse_config("replicates = many").unwrap();
        assert!(Options::default().merge(&map).is_err());
    }

    #[test]
    fn rmc_flags_rejected_for_de() {
        let opts = Options {
            algorithm: Some(Algorithm::De),
            alpha_ladder: Some(Ladder(vec![0.1])),
            ..Options::default()
        };
        assert!(opts.check_algorithm_flags().is_err());
    }
}
