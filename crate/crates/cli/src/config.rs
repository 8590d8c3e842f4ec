//! Experiment configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use groverlab::circuit::{format_bitstring, parse_bitstring};
use groverlab::transpile::{CouplingGraph, TranspileOptions};
use groverlab::{GroverSpec, NoiseModel, Variant};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SHOTS: u64 = 1000;
pub const DEFAULT_NOISY_SHOTS: u64 = 4000;
pub const SEED_ENV: &str = "GROVERLAB_SEED";

/// Flags shared by every subcommand that builds a circuit. Anything left unset
/// falls back to the `--config` file, then to the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct CircuitArgs {
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of data qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// Goal state as a bitstring, most significant qubit first (e.g. 1110).
    #[arg(long)]
    pub goal: Option<String>,
    /// sdp, noancilla or oneancilla.
    #[arg(long)]
    pub variant: Option<String>,
    /// Ancilla count; only a consistency check against --variant.
    #[arg(long)]
    pub ancilla: Option<usize>,
}

/// Execution flags for `run` and `run-noisy`.
#[derive(Debug, Clone, Default, Args)]
pub struct ExecArgs {
    #[arg(long)]
    pub shots: Option<u64>,
    /// Master seed; the GROVERLAB_SEED environment variable takes precedence.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decompose to one-qubit gates and CX before running.
    #[arg(long)]
    pub transpiled: bool,
    /// Route onto a named coupling graph: line7, heavy-hex27 or full. Implies --transpiled.
    #[arg(long)]
    pub coupling: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NoiseArgs {
    /// Depolarizing probability after each one-qubit gate.
    #[arg(long)]
    pub p1: Option<f64>,
    /// Depolarizing probability on each qubit of a multi-qubit gate.
    #[arg(long)]
    pub p2: Option<f64>,
    /// Readout flip probability.
    #[arg(long = "eps-ro")]
    pub eps_ro: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Every key a config file may hold.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    goal: Option<String>,
    variant: Option<String>,
    ancilla: Option<usize>,
    #[serde(alias = "repetitions")]
    r: Option<OneOrMany<usize>>,
    p: Option<OneOrMany<f64>>,
    seeds: Option<u64>,
    shots: Option<u64>,
    seed: Option<u64>,
    transpiled: Option<bool>,
    coupling: Option<String>,
    p1: Option<f64>,
    p2: Option<f64>,
    eps_ro: Option<f64>,
}

fn load_file(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The fully resolved configuration, embedded in every JSON result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub goal: String,
    pub variant: Variant,
    pub repetitions: usize,
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<NoiseModel>,
    pub transpiled: bool,
    pub coupling: Option<String>,
}

impl ExperimentConfig {
    pub fn spec(&self) -> Result<GroverSpec> {
        let goal = parse_bitstring(&self.goal, self.n)?;
        Ok(GroverSpec::new(self.n, goal, self.repetitions, self.variant)?)
    }

    pub fn transpile_options(&self) -> Result<TranspileOptions> {
        let width = self.n + self.variant.n_ancilla();
        Ok(match &self.coupling {
            Some(name) => TranspileOptions::routed(CouplingGraph::preset(name, width)?),
            None if self.transpiled => TranspileOptions::decomposed(),
            None => TranspileOptions::default(),
        })
    }
}

pub struct Resolver {
    file: FileConfig,
}

impl Resolver {
    pub fn new(config: Option<&Path>) -> Result<Self> {
        Ok(Resolver {
            file: load_file(config)?,
        })
    }

    /// `(n, goal bitstring, variant)` with the goal normalised.
    pub fn circuit(&self, args: &CircuitArgs) -> Result<(usize, String, Variant)> {
        let f = &self.file;
        let n = args.n.or(f.n).ok_or_else(|| invalid("n", "missing --n"))?;
        let goal = args.goal.clone().or(f.goal.clone()).ok_or_else(|| invalid("goal", "missing --goal"))?;
        let ancilla = args.ancilla.or(f.ancilla);
        let variant = match args.variant.as_deref().or(f.variant.as_deref()) {
            Some(v) => v.parse::<Variant>()?,
            None => match ancilla {
                Some(1) => Variant::OneAncilla,
                _ => Variant::NoAncilla,
            },
        };
        if let Some(a) = ancilla {
            if a != variant.n_ancilla() {
                bail!(groverlab::Error::Validation {
                    field: "ancilla",
                    reason: format!("variant {variant} uses {} ancilla, not {a}", variant.n_ancilla()),
                });
            }
        }
        let index = parse_bitstring(&goal, n)?;
        Ok((n, format_bitstring(index, n), variant))
    }

    pub fn experiment(
        &self,
        circuit: &CircuitArgs,
        r: Option<usize>,
        exec: &ExecArgs,
        noise: Option<&NoiseArgs>,
    ) -> Result<ExperimentConfig> {
        let f = &self.file;
        let (n, goal, variant) = self.circuit(circuit)?;
        let repetitions = self.repetitions(r)?;
        let default_shots = if noise.is_some() { DEFAULT_NOISY_SHOTS } else { DEFAULT_SHOTS };
        let noise = noise
            .map(|a| {
                NoiseModel::new(
                    a.p1.or(f.p1).unwrap_or(0.0),
                    a.p2.or(f.p2).unwrap_or(0.0),
                    a.eps_ro.or(f.eps_ro).unwrap_or(0.0),
                )
            })
            .transpose()?;
        let coupling = exec.coupling.clone().or(f.coupling.clone());
        if let Some(name) = &coupling {
            CouplingGraph::preset(name, n + variant.n_ancilla())?;
        }
        Ok(ExperimentConfig {
            n,
            goal,
            variant,
            repetitions,
            shots: exec.shots.or(f.shots).unwrap_or(default_shots),
            seed: self.seed(exec.seed)?,
            noise,
            transpiled: exec.transpiled || f.transpiled.unwrap_or(false) || coupling.is_some(),
            coupling,
        })
    }

    /// A single repetition count; defaults to 1.
    pub fn repetitions(&self, flag: Option<usize>) -> Result<usize> {
        if let Some(r) = flag {
            return Ok(r);
        }
        match &self.file.r {
            None => Ok(1),
            Some(OneOrMany::One(r)) => Ok(*r),
            Some(OneOrMany::Many(_)) => Err(invalid("r", "expected a single repetition count")),
        }
    }

    pub fn repetition_grid(&self, flag: &[usize], default: &[usize]) -> Vec<usize> {
        if !flag.is_empty() {
            return flag.to_vec();
        }
        self.file.r.as_ref().map_or_else(|| default.to_vec(), OneOrMany::to_vec)
    }

    pub fn noise_grid(&self, flag: &[f64], default: &[f64]) -> Vec<f64> {
        if !flag.is_empty() {
            return flag.to_vec();
        }
        self.file.p.as_ref().map_or_else(|| default.to_vec(), OneOrMany::to_vec)
    }

    pub fn seeds(&self, flag: Option<u64>) -> u64 {
        flag.or(self.file.seeds).unwrap_or(1)
    }

    pub fn seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            return v
                .trim()
                .parse()
                .map_err(|_| invalid("seed", format!("{SEED_ENV}={v:?} is not an unsigned integer")));
        }
        Ok(flag.or(self.file.seed).unwrap_or(0))
    }

    pub fn shots(&self, flag: Option<u64>, default: u64) -> u64 {
        flag.or(self.file.shots).unwrap_or(default)
    }

    pub fn eps_ro(&self, flag: Option<f64>) -> f64 {
        flag.or(self.file.eps_ro).unwrap_or(0.0)
    }

    pub fn transpiled(&self, flag: bool) -> bool {
        flag || self.file.transpiled.unwrap_or(false)
    }

    pub fn coupling(&self, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_owned).or(self.file.coupling.clone())
    }
}

pub fn invalid(field: &'static str, reason: impl Into<String>) -> anyhow::Error {
    groverlab::Error::Validation {
        field,
        reason: reason.into(),
    }
    .into()
}
