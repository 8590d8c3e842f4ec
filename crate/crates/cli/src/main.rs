//! `groverlab`: build, run and sweep Grover search circuits.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use groverlab::qasm::export_qasm;
use groverlab::sim::{exact_distribution, sample};
use groverlab::transpile::{metrics, transpile, CouplingGraph, TranspileOptions};
use groverlab::{build_grover, run_ideal, run_noisy, selectivity, total_variation, Distribution, NoiseModel};

use config::{invalid, CircuitArgs, ExecArgs, NoiseArgs, Resolver, DEFAULT_NOISY_SHOTS};
use output::{Outputs, RunDocument, SweepRecord, TOOL};

#[derive(Debug, Parser)]
#[command(name = "groverlab", version, about = "Grover search circuits: build, simulate, add noise, sweep")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a circuit and write it as OpenQASM 2.0.
    Build {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Grover repetitions.
        #[arg(long = "r")]
        r: Option<usize>,
        /// Lower multi-controlled gates to one-qubit gates and CX.
        #[arg(long)]
        decompose: bool,
        /// Route onto a named coupling graph (implies --decompose).
        #[arg(long)]
        route: Option<String>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        qasm: Option<PathBuf>,
    },
    /// Exact distribution plus a sampled histogram.
    Run {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long = "r")]
        r: Option<usize>,
        #[command(flatten)]
        exec: ExecArgs,
        #[command(flatten)]
        out: Outputs,
    },
    /// Histogram from depolarizing-noise trajectories.
    RunNoisy {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long = "r")]
        r: Option<usize>,
        #[command(flatten)]
        exec: ExecArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        out: Outputs,
    },
    /// Noisy runs over a grid of repetitions and noise levels, as CSV.
    Sweep {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Comma-separated repetition counts.
        #[arg(long = "r", value_delimiter = ',')]
        r: Vec<usize>,
        /// Comma-separated noise levels, used for both p1 and p2.
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long = "eps-ro")]
        eps_ro: Option<f64>,
        /// Number of seeds per cell, counting up from --seed.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        transpiled: bool,
        #[arg(long)]
        coupling: Option<String>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare two `run` / `run-noisy` JSON results.
    Report {
        #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
        compare: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let text = e.to_string();
                    let first = text.lines().next().unwrap_or_default();
                    report_error("usage", first.trim_start_matches("error: "));
                    ExitCode::from(2)
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(error_kind(&e), &format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}

fn report_error(kind: &str, message: &str) {
    let quoted = serde_json::to_string(message).unwrap_or_else(|_| "\"?\"".into());
    eprintln!("error: kind={kind} message={quoted}");
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<groverlab::Error>() {
            return err.kind();
        }
        if cause.is::<std::io::Error>() {
            return "io";
        }
        if cause.is::<serde_json::Error>() || cause.is::<csv::Error>() {
            return "format";
        }
    }
    "internal"
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Build {
            circuit,
            r,
            decompose,
            route,
            qasm,
        } => {
            let resolver = Resolver::new(circuit.config.as_deref())?;
            let exec = ExecArgs {
                transpiled: decompose,
                coupling: route,
                ..ExecArgs::default()
            };
            let cfg = resolver.experiment(&circuit, r, &exec, None)?;
            let built = transpile(&build_grover(&cfg.spec()?)?, &cfg.transpile_options()?)?;
            output::write_or_print(qasm.as_deref(), &export_qasm(&built)?)
        }
        Command::Run { circuit, r, exec, out } => {
            let resolver = Resolver::new(circuit.config.as_deref())?;
            let cfg = resolver.experiment(&circuit, r, &exec, None)?;
            let spec = cfg.spec()?;
            let executed = transpile(&build_grover(&spec)?, &cfg.transpile_options()?)?;
            let distribution = exact_distribution(&run_ideal(&executed)?, executed.measured())?;
            let histogram = sample(&distribution, cfg.shots, cfg.seed)?;
            let doc = RunDocument {
                tool: TOOL,
                selectivity: selectivity(&distribution, spec.goal)?,
                sampled_selectivity: Some(selectivity(&histogram, spec.goal)?),
                ideal_selectivity: None,
                metrics: metrics(&executed),
                config: cfg,
                distribution,
                histogram,
            };
            out.emit(&doc)
        }
        Command::RunNoisy {
            circuit,
            r,
            exec,
            noise,
            out,
        } => {
            let resolver = Resolver::new(circuit.config.as_deref())?;
            let cfg = resolver.experiment(&circuit, r, &exec, Some(&noise))?;
            let spec = cfg.spec()?;
            let model = cfg.noise.unwrap_or_default();
            let executed = transpile(&build_grover(&spec)?, &cfg.transpile_options()?)?;
            let distribution = exact_distribution(&run_ideal(&executed)?, executed.measured())?;
            let histogram = run_noisy(&executed, &model, cfg.shots, cfg.seed)?;
            let doc = RunDocument {
                tool: TOOL,
                selectivity: selectivity(&histogram, spec.goal)?,
                sampled_selectivity: None,
                ideal_selectivity: Some(selectivity(&distribution, spec.goal)?),
                metrics: metrics(&executed),
                config: cfg,
                distribution,
                histogram,
            };
            out.emit(&doc)
        }
        Command::Sweep {
            circuit,
            r,
            p,
            eps_ro,
            seeds,
            shots,
            seed,
            transpiled,
            coupling,
            csv,
        } => {
            let resolver = Resolver::new(circuit.config.as_deref())?;
            let (n, goal, variant) = resolver.circuit(&circuit)?;
            let repetitions = resolver.repetition_grid(&r, &[1, 2, 3]);
            let levels = resolver.noise_grid(&p, &[0.0]);
            let eps_ro = resolver.eps_ro(eps_ro);
            let shots = resolver.shots(shots, DEFAULT_NOISY_SHOTS);
            let base_seed = resolver.seed(seed)?;
            let seeds = resolver.seeds(seeds);
            if seeds == 0 {
                return Err(invalid("seeds", "need at least one seed"));
            }
            let coupling = resolver.coupling(coupling.as_deref());
            let options = match &coupling {
                Some(name) => TranspileOptions::routed(CouplingGraph::preset(name, n + variant.n_ancilla())?),
                None if resolver.transpiled(transpiled) => TranspileOptions::decomposed(),
                None => TranspileOptions::default(),
            };
            let models = levels
                .iter()
                .map(|&p| NoiseModel::new(p, p, eps_ro))
                .collect::<groverlab::Result<Vec<_>>>()?;
            let goal_index = groverlab::circuit::parse_bitstring(&goal, n)?;
            let mut records = Vec::new();
            for &reps in &repetitions {
                let spec = groverlab::GroverSpec::new(n, goal_index, reps, variant)?;
                let executed = transpile(&build_grover(&spec)?, &options)?;
                for model in &models {
                    for k in 0..seeds {
                        let seed = base_seed.wrapping_add(k);
                        let histogram = run_noisy(&executed, model, shots, seed)?;
                        records.push(SweepRecord::new(reps, model, shots, seed, &selectivity(&histogram, goal_index)?));
                    }
                }
            }
            output::write_or_print(csv.as_deref(), &output::sweep_csv(&records)?)
        }
        Command::Report { compare } => {
            let a = output::read_document(&compare[0])?;
            let b = output::read_document(&compare[1])?;
            let fa = Distribution::new(a.histogram.frequencies())?;
            let fb = Distribution::new(b.histogram.frequencies())?;
            let tv = total_variation(&fa, &fb).context("comparing histograms")?;
            print!("{}", output::comparison(&compare[0], &a, &compare[1], &b, tv));
            Ok(())
        }
    }
}
