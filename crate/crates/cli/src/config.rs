//! Command-line surface and configuration merging.
//!
//! Every tunable lives in [`Params`], which is both a set of global clap
//! flags and the schema of the optional config file (TOML, or JSON when the
//! path ends in `.json`). Precedence: CLI flags, then the file, then each
//! experiment's defaults.

use crate::error::{config_err, CliError, CliResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "fidest", version, about = "Fidelity-estimation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// FOFE vs 1/2-DFE on a depolarized complete 3-uniform hypergraph state.
    Fig2a,
    /// Haar-average ℓ₁ norms, plain and phase-stripped.
    HaarScan,
    /// NLDFE weight W against ‖ψ‖₁ on Haar states, plus a variance comparison.
    NldfeCompare,
    /// Rank-based variance bounds for random and complete 3-uniform hypergraphs.
    HypergraphBounds,
    /// One estimator run on one target.
    Run,
    /// MUB tomography over a shot ladder.
    Tomography,
    /// Sampling from the ℓ₂ Pauli distribution of a random real MPS.
    MpsSample,
    /// ℓ₁ sampling for Dicke states.
    Dicke,
    /// Pauli norms and stabilizer Rényi entropies of a target.
    Norms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fig2a => "fig2a",
            Command::HaarScan => "haar-scan",
            Command::NldfeCompare => "nldfe-compare",
            Command::HypergraphBounds => "hypergraph-bounds",
            Command::Run => "run",
            Command::Tomography => "tomography",
            Command::MpsSample => "mps-sample",
            Command::Dicke => "dicke",
            Command::Norms => "norms",
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// Master RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Omit the timestamp line so identical runs give identical bytes.
    #[arg(long, global = true)]
    #[serde(default)]
    pub deterministic: bool,
    /// Config file supplying defaults for any flag.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Number of qubits.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub n_min: Option<usize>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Shots (state copies) per estimate or per basis.
    #[arg(long, global = true)]
    pub shots: Option<usize>,
    /// Monte Carlo samples (Dirichlet draws, rank samples, sampler draws).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Haar states averaged with exact norms.
    #[arg(long, global = true)]
    pub exact_samples: Option<usize>,
    /// Median-of-means batch count.
    #[arg(long, global = true)]
    pub batches: Option<usize>,
    #[arg(long, global = true)]
    pub repetitions: Option<usize>,
    /// Importance-sampling exponent α.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Target fidelity of the depolarized input (sets p).
    #[arg(long, global = true)]
    pub fidelity: Option<f64>,
    /// Depolarizing probability (overrides --fidelity).
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Dicke excitation number.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// MPS bond dimension.
    #[arg(long, global = true)]
    pub chi: Option<usize>,
    /// Estimator: dfe, fofe or nldfe.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// Target family: hypergraph, haar, dicke, phase, stabilizer, mps, plus.
    #[arg(long, global = true)]
    pub target: Option<String>,
    /// DFE measurement path (frame, bernoulli) or tomography path (direct, fofe).
    #[arg(long, global = true)]
    pub path: Option<String>,
    /// NLDFE frame ordering: canonical or greedy.
    #[arg(long, global = true)]
    pub ordering: Option<String>,
    /// Stripped-norm prefactor: classcount, rederived or literal.
    #[arg(long, global = true)]
    pub prefactor: Option<String>,
    /// Hyperedges as dash-joined 0-based vertices, comma separated: "0-1-2,1-2-3".
    #[arg(long, global = true)]
    pub edges: Option<String>,
    /// Comma-separated shot counts for the tomography ladder.
    #[arg(long, global = true, value_delimiter = ',')]
    pub shot_ladder: Option<Vec<usize>>,
    /// Comma-separated Rényi orders for `norms`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Check samplers against full enumeration.
    #[arg(long, global = true)]
    #[serde(default)]
    pub verify: bool,
    /// Report wall-clock draw cost (makes output nondeterministic).
    #[arg(long, global = true)]
    #[serde(default)]
    pub timing: bool,
    /// State file (JSON) used as the target by `norms`.
    #[arg(long, global = true)]
    pub state: Option<PathBuf>,
    /// Where `tomography` writes its final reconstruction.
    #[arg(long, global = true)]
    pub state_out: Option<PathBuf>,
}

macro_rules! prefer {
    ($hi:ident, $lo:ident; $($f:ident),*) => {
        Params {
            $($f: $hi.$f.or($lo.$f),)*
            deterministic: $hi.deterministic || $lo.deterministic,
            verify: $hi.verify || $lo.verify,
            timing: $hi.timing || $lo.timing,
            config: $hi.config.or($lo.config),
        }
    };
}

impl Params {
    /// Field-wise `self` over `lower`; flags are set if either side sets them.
    pub fn over(self, lower: Params) -> Params {
        let (hi, lo) = (self, lower);
        prefer!(hi, lo; seed, workers, out, format, n, n_min, n_max, shots, samples,
            exact_samples, batches, repetitions, alpha, fidelity, p, k, chi, scheme, target,
            path, ordering, prefactor, edges, shot_ladder, alphas, state, state_out)
    }
}

pub fn load_config_file(path: &Path) -> CliResult<Params> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

/// Fully merged settings for one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: Params,
}

pub const DEFAULT_SEED: u64 = 1;

impl ExperimentConfig {
    pub fn new(command: Command, params: Params) -> Self {
        Self { command, params }
    }

    /// CLI params merged over the config file they name, if any.
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let file = match &cli.params.config {
            Some(p) => load_config_file(p)?,
            None => Params::default(),
        };
        Ok(Self::new(cli.command, cli.params.over(file)))
    }

    pub fn seed(&self) -> u64 {
        self.params.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn format(&self) -> Format {
        self.params.format.unwrap_or_default()
    }

    /// JSON echo of every explicitly set parameter.
    pub fn echo(&self) -> String {
        let mut v = serde_json::to_value(&self.params).expect("params serialize");
        if let Some(map) = v.as_object_mut() {
            map.retain(|_, x| !x.is_null() && *x != serde_json::Value::Bool(false));
            map.remove("out");
        }
        v.to_string()
    }
}

/// Parses "0-1-2,1-2-3" into hyperedges.
pub fn parse_edges(text: &str) -> CliResult<Vec<Vec<usize>>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|e| {
            e.trim()
                .split('-')
                .map(|v| {
                    v.parse::<usize>()
                        .map_err(|_| CliError::Config(format!("bad vertex {v:?} in edge {e:?}")))
                })
                .collect()
        })
        .collect()
}

pub(crate) fn positive(name: &str, v: usize) -> CliResult<usize> {
    if v == 0 {
        return config_err(format!("--{name} must be positive"));
    }
    Ok(v)
}

pub(crate) fn range(cfg: &ExperimentConfig, lo: usize, hi: usize) -> CliResult<(usize, usize)> {
    let a = cfg.params.n_min.unwrap_or(lo);
    let b = cfg.params.n_max.unwrap_or(hi);
    if a > b {
        return config_err(format!("--n-min {a} exceeds --n-max {b}"));
    }
    Ok((a, b))
}
