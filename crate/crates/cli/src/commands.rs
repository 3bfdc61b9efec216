//! Command-line interface.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lwc_core::diagnostics::{Averaging, ConvergenceReport, ReportSettings};
use lwc_core::graph::{generate_random_regular, girth, tree_likeness_fraction};
use lwc_core::sampler::{sample_conditioned_plus, sample_unconditioned, SamplerSettings};
use lwc_core::tree::{
    edge_correlation, free_boundary_marginal, free_energy, minus_boundary_marginal, mixture_marginal,
    plus_boundary_marginal, root_magnetization, solve_fixed_point,
};
use lwc_core::{Algorithm, IsingParams, RegularGraph, SampleBatch, TreeMarginal};
use serde_json::json;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::{experiments, output};

#[derive(Debug, Parser)]
#[command(name = "lwc", version, about = "Ising measures on locally tree-like regular graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a uniform simple k-regular graph and write it as an edge list.
    GenerateGraph {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tree fixed point, free energy, correlations, and optionally a ball marginal table.
    SolveTree {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        beta: f64,
        /// Also write the marginal on the depth-`t` ball as CSV.
        #[arg(long, requires = "out")]
        t: Option<usize>,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Plus)]
        boundary: BoundaryArg,
        #[arg(long, default_value_t = 30)]
        t_plus: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Markov chain on a graph and write the samples as CSV.
    Sample {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Defaults to Wolff in the non-uniqueness regime and Glauber otherwise.
        #[arg(long)]
        algorithm: Option<Algorithm>,
        #[arg(long, default_value_t = 10)]
        thin: usize,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        no_flip_symmetry: bool,
        /// Keep only samples with positive magnetization (flipping the rest).
        #[arg(long)]
        conditioned: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a sample batch with a tree marginal.
    Analyze {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        batch: PathBuf,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        /// Census threshold; defaults to half the root magnetization.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Defaults to `mixture` for unconditioned batches and `plus` for conditioned ones.
        #[arg(long, value_enum)]
        reference: Option<BoundaryArg>,
        #[arg(long, default_value_t = 30)]
        t_plus: usize,
        #[arg(long)]
        flip_symmetric: bool,
        /// Output JSON file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment (`theorem1-part1`, `theorem1-part2`, `counterexample`, `energy`,
    /// `concentration`, `anticoncentration`, `validate`).
    Experiment {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check both samplers against exact enumeration on K4 and the Petersen graph.
    Validate {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Config file; the shipped default for the experiment when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the effective config and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GraphArg {
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// `K4` or `Petersen`.
    #[arg(long)]
    pub named: Option<String>,
}

impl GraphArg {
    fn load(&self) -> Result<RegularGraph> {
        match (&self.graph, &self.named) {
            (Some(path), _) => read_graph(path),
            (None, Some(name)) => Ok(RegularGraph::named(name)?),
            (None, None) => bail!("either --graph or --named is required"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Plus,
    Minus,
    Free,
    Mixture,
}

impl BoundaryArg {
    fn marginal(self, p: &IsingParams, t: usize, t_plus: usize) -> Result<TreeMarginal> {
        Ok(match self {
            BoundaryArg::Plus => plus_boundary_marginal(p, t, t_plus)?,
            BoundaryArg::Minus => minus_boundary_marginal(p, t, t_plus)?,
            BoundaryArg::Free => free_boundary_marginal(p, t)?,
            BoundaryArg::Mixture => mixture_marginal(p, t, t_plus)?,
        })
    }
}

fn read_graph(path: &Path) -> Result<RegularGraph> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(RegularGraph::read_edge_list(BufReader::new(f))?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = lwc_core::json::to_string(value)?;
    match out {
        Some(path) => create(path)?.write_all(text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Loads the config for a run, applying command-line overrides.
pub fn load_config(kind: ExperimentKind, run: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &run.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default_for(kind),
    };
    if cfg.experiment != kind {
        bail!("config is for `{}`, not `{}`", cfg.experiment.name(), kind.name());
    }
    if let Some(out) = &run.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run_experiment(kind: ExperimentKind, run: &RunArgs) -> Result<bool> {
    let cfg = load_config(kind, run)?;
    if run.print_config {
        print!("{}", cfg.to_toml());
        return Ok(true);
    }
    let outcome = experiments::run(&cfg)?;
    let files = output::write_outcome(&cfg.output_dir, &cfg, &outcome)?;
    for check in &outcome.checks {
        println!("{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    log::info!("wrote {} files to {}", files.len(), cfg.output_dir.display());
    Ok(outcome.passed())
}

/// Executes a parsed command. `Ok(false)` means a configured assertion failed.
pub fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenerateGraph { n, k, seed, out } => {
            let g = generate_random_regular(n, k, seed)?;
            log::info!(
                "n = {n}, k = {k}, girth = {:?}, tree-like radius-2 balls = {:.4}, fingerprint {}",
                girth(&g),
                tree_likeness_fraction(&g, 2),
                g.fingerprint()
            );
            match out {
                Some(path) => g.write_edge_list(create(&path)?)?,
                None => g.write_edge_list(std::io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::SolveTree { k, beta, t, boundary, t_plus, out } => {
            let p = IsingParams::new(k, beta)?;
            let fp = solve_fixed_point(&p)?;
            let summary = json!({
                "params": p,
                "uniqueness": p.is_uniqueness(),
                "fixed_point": fp,
                "root_magnetization": root_magnetization(&p)?,
                "edge_correlation": edge_correlation(&p)?,
                "free_energy": free_energy(&p)?,
            });
            match (t, &out) {
                (Some(t), Some(dir)) => {
                    std::fs::create_dir_all(dir)?;
                    let marginal = boundary.marginal(&p, t, t_plus)?;
                    marginal.write_csv(create(&dir.join("marginal.csv"))?)?;
                    emit_json(&summary, Some(&dir.join("tree.json")))?;
                }
                _ => emit_json(&summary, out.as_deref())?,
            }
            Ok(true)
        }
        Command::Sample { graph, beta, samples, seed, algorithm, thin, burn_in, no_flip_symmetry, conditioned, out } => {
            let g = graph.load()?;
            let p = IsingParams::new(g.k(), beta)?;
            let base = SamplerSettings::new(algorithm.unwrap_or_else(|| Algorithm::default_for(&p)));
            let settings = SamplerSettings {
                thin,
                burn_in: burn_in.unwrap_or(base.burn_in),
                flip_symmetry: !no_flip_symmetry,
                ..base
            };
            let mut batch = sample_unconditioned(&g, &p, samples, &settings, seed)?;
            if conditioned {
                batch = sample_conditioned_plus(batch)?;
            }
            let mut w = create(&out)?;
            batch.write_csv(&mut w)?;
            w.flush()?;
            log::info!("{} samples written to {}", batch.len(), out.display());
            Ok(true)
        }
        Command::Analyze { graph, batch, t, ell, delta, epsilon, reference, t_plus, flip_symmetric, out } => {
            let g = graph.load()?;
            let f = File::open(&batch).with_context(|| format!("opening {}", batch.display()))?;
            let batch = SampleBatch::read_csv(BufReader::new(f))?;
            let meta = batch.meta();
            let p = IsingParams::with_field(g.k(), meta.beta, meta.field)?;
            let reference = reference.unwrap_or(if meta.conditioned { BoundaryArg::Plus } else { BoundaryArg::Mixture });
            let delta = match delta {
                Some(d) => d,
                None => root_magnetization(&p)? / 2.0,
            };
            let settings = ReportSettings {
                t,
                ell,
                delta,
                epsilon,
                averaging: if flip_symmetric { Averaging::FlipSymmetric } else { Averaging::Plain },
            };
            let report = ConvergenceReport::compute(&batch, &g, &reference.marginal(&p, t, t_plus)?, &settings)?;
            emit_json(&json!({ "reference": format!("{reference:?}").to_lowercase(), "settings": settings, "report": report }), out.as_deref())?;
            Ok(true)
        }
        Command::Experiment { name, run } => run_experiment(ExperimentKind::from_name(&name)?, &run),
        Command::Validate { run } => run_experiment(ExperimentKind::Validate, &run),
    }
}
