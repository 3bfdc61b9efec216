//! Named end-to-end experiments.
//!
//! Each experiment turns a validated [`ExperimentConfig`] into an [`Outcome`]: a JSON report,
//! flat CSV tables and a list of pass/fail checks. Independent ladder rungs and grid points
//! run in parallel; results are merged in configuration order so output is deterministic.

use anyhow::{bail, Context, Result};
use lwc_core::diagnostics::{
    anticoncentration, edge_agreement, local_function_variance, q_hat, Anticoncentration, Averaging, ConvergenceReport,
    Estimate, LocalFunction, ReportSettings,
};
use lwc_core::sampler::{
    exact_distribution, sample_conditioned_plus, sample_unconditioned, Algorithm, SamplerSettings,
};
use lwc_core::tree::{
    critical_beta, edge_correlation, free_energy, mixture_marginal, plus_boundary_marginal, root_magnetization,
};
use lwc_core::{IsingParams, RegularGraph, SampleBatch};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind};

/// One named pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// A flat table written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Seeds used by a run, echoed into the manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SeedRecord {
    pub graphs: Vec<Option<u64>>,
    pub chains: Vec<u64>,
    pub graph_fingerprints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub experiment: ExperimentKind,
    pub report: Value,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub seeds: SeedRecord,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// A sampled graph from a size ladder.
#[derive(Debug, Clone)]
pub struct Rung {
    pub graph: RegularGraph,
    pub graph_seed: Option<u64>,
    pub chain_seed: u64,
    pub batch: SampleBatch,
}

/// Builds the configured graphs and runs one chain on each, in parallel.
pub fn sample_ladder(cfg: &ExperimentConfig) -> Result<Vec<Rung>> {
    let p = cfg.params()?;
    let settings = cfg.sampler_settings(&p);
    let graphs = cfg.build_graphs()?;
    graphs
        .into_par_iter()
        .enumerate()
        .map(|(j, graph)| {
            let chain_seed = cfg.sampler_seed(j);
            log::info!("sampling n = {} ({} samples, {:?})", graph.n(), cfg.sampler.samples, settings.algorithm);
            let batch = sample_unconditioned(&graph, &p, cfg.sampler.samples, &settings, chain_seed)
                .with_context(|| format!("sampling graph {j}"))?;
            Ok(Rung { graph, graph_seed: cfg.graph_seed(j), chain_seed, batch })
        })
        .collect()
}

fn seeds_of(rungs: &[Rung]) -> SeedRecord {
    SeedRecord {
        graphs: rungs.iter().map(|r| r.graph_seed).collect(),
        chains: rungs.iter().map(|r| r.chain_seed).collect(),
        graph_fingerprints: rungs.iter().map(|r| r.graph.fingerprint()).collect(),
    }
}

/// Runs the experiment named in `cfg` from scratch.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Theorem1Part1 => theorem1_part1(cfg, &sample_ladder(cfg)?),
        ExperimentKind::Theorem1Part2 => theorem1_part2(cfg, &sample_ladder(cfg)?),
        ExperimentKind::Counterexample => counterexample(cfg),
        ExperimentKind::Energy => energy(cfg),
        ExperimentKind::Concentration => concentration(cfg, &sample_ladder(cfg)?),
        ExperimentKind::Anticoncentration => anticoncentration_ladder(cfg, &sample_ladder(cfg)?),
        ExperimentKind::Validate => validate_samplers(cfg),
    }
}

fn delta_for(cfg: &ExperimentConfig, p: &IsingParams) -> Result<f64> {
    let rho = root_magnetization(p)?;
    let delta = cfg.diagnostics.delta.resolve(rho);
    if !(delta > 0.0 && delta < rho) {
        bail!("delta = {delta} must lie in (0, rho) with rho = {rho}; the census needs a non-uniqueness beta");
    }
    Ok(delta)
}

fn ladder_reports(
    cfg: &ExperimentConfig,
    batches: &[(&RegularGraph, SampleBatch)],
    reference: impl Fn(usize) -> Result<lwc_core::TreeMarginal> + Sync,
    averaging: Averaging,
) -> Result<Vec<Vec<ConvergenceReport>>> {
    let p = cfg.params()?;
    let delta = delta_for(cfg, &p)?;
    let references: Vec<_> = cfg.diagnostics.radii.iter().map(|&t| reference(t)).collect::<Result<_>>()?;
    batches
        .par_iter()
        .map(|(g, batch)| {
            cfg.diagnostics
                .radii
                .iter()
                .zip(&references)
                .map(|(&t, r)| {
                    let settings = ReportSettings { t, ell: cfg.diagnostics.ell, delta, epsilon: cfg.diagnostics.epsilon, averaging };
                    Ok(ConvergenceReport::compute(batch, g, r, &settings)?)
                })
                .collect()
        })
        .collect()
}

fn report_table(name: &str, reports: &[Vec<ConvergenceReport>]) -> Table {
    let mut header: Vec<&str> = vec![];
    let csv_header = ConvergenceReport::csv_header();
    header.extend(csv_header.split(','));
    let mut table = Table::new(name, &header);
    for r in reports.iter().flatten() {
        table.push(r.csv_row().split(',').map(String::from).collect());
    }
    table
}

fn mode_a_checks(cfg: &ExperimentConfig, reports: &[Vec<ConvergenceReport>], label: &str, checks: &mut Vec<Check>) {
    let radii = &cfg.diagnostics.radii;
    if cfg.assertions.mode_a_decreasing == Some(true) {
        for (ti, &t) in radii.iter().enumerate() {
            let series: Vec<f64> = reports.iter().map(|r| r[ti].mode_a_tv).collect();
            let ok = series.windows(2).all(|w| w[1] < w[0]);
            checks.push(Check::new(format!("{label} mode A decreasing in n (t = {t})"), ok, format!("{series:?}")));
        }
    }
    if let Some(max) = cfg.assertions.mode_a_max {
        let t_min = radii.iter().enumerate().min_by_key(|(_, &t)| t).map(|(i, _)| i).expect("radii nonempty");
        let last = reports.last().expect("ladder nonempty");
        let value = last[t_min].mode_a_tv;
        checks.push(Check::new(
            format!("{label} mode A < {max} at n = {} (t = {})", last[t_min].n, radii[t_min]),
            value < max,
            format!("{value:.6}"),
        ));
    }
}

/// Unconditioned batches against `(nu_+ + nu_-)/2`.
pub fn theorem1_part1(cfg: &ExperimentConfig, rungs: &[Rung]) -> Result<Outcome> {
    let p = cfg.params()?;
    let t_plus = cfg.diagnostics.t_plus;
    let batches: Vec<_> = rungs.iter().map(|r| (&r.graph, r.batch.clone())).collect();
    let reports =
        ladder_reports(cfg, &batches, |t| Ok(mixture_marginal(&p, t, t_plus)?), cfg.diagnostics.averaging)?;
    let mut checks = Vec::new();
    mode_a_checks(cfg, &reports, "mixture", &mut checks);
    Ok(Outcome {
        experiment: cfg.experiment,
        report: json!({
            "reference": format!("mixture(t_plus={t_plus})"),
            "averaging": cfg.diagnostics.averaging,
            "radii": cfg.diagnostics.radii,
            "reports": reports,
            "checks": checks,
        }),
        tables: vec![report_table("convergence", &reports)],
        checks,
        seeds: seeds_of(rungs),
    })
}

/// Conditioned batches against `nu_+`.
pub fn theorem1_part2(cfg: &ExperimentConfig, rungs: &[Rung]) -> Result<Outcome> {
    let p = cfg.params()?;
    let t_plus = cfg.diagnostics.t_plus;
    let batches: Vec<_> = rungs
        .iter()
        .map(|r| Ok((&r.graph, sample_conditioned_plus(r.batch.clone())?)))
        .collect::<Result<_>>()?;
    let reports = ladder_reports(cfg, &batches, |t| Ok(plus_boundary_marginal(&p, t, t_plus)?), Averaging::Plain)?;
    let mut checks = Vec::new();
    mode_a_checks(cfg, &reports, "plus", &mut checks);
    if let Some(max) = cfg.assertions.q_hat_max {
        let last = &reports.last().expect("ladder nonempty")[0];
        checks.push(Check::new(format!("q_hat < {max} at n = {}", last.n), last.q_hat < max, format!("{:.6}", last.q_hat)));
    }
    let q_series: Vec<f64> = reports.iter().map(|r| r[0].q_hat).collect();
    Ok(Outcome {
        experiment: cfg.experiment,
        report: json!({
            "reference": format!("plus(t_plus={t_plus})"),
            "delta": delta_for(cfg, &p)?,
            "radii": cfg.diagnostics.radii,
            "q_hat": q_series,
            "reports": reports,
            "checks": checks,
        }),
        tables: vec![report_table("convergence", &reports)],
        checks,
        seeds: seeds_of(rungs),
    })
}

/// Per-sample fraction of components whose magnetization is negative.
fn minus_component_fraction(batch: &SampleBatch, g: &RegularGraph) -> f64 {
    let comps = g.components();
    let total: usize = batch
        .configs()
        .iter()
        .map(|c| comps.iter().filter(|comp| comp.iter().map(|&v| c.get(v) as i64).sum::<i64>() < 0).count())
        .sum();
    total as f64 / (comps.len() * batch.len()) as f64
}

/// Disjoint components conditioned on the global sign, next to a connected graph of equal size.
pub fn counterexample(cfg: &ExperimentConfig) -> Result<Outcome> {
    let crate::config::GraphSpec::Disjoint { copies, size, k, .. } = cfg.graph else {
        bail!("counterexample needs a disjoint graph spec");
    };
    let p = cfg.params()?;
    let delta = delta_for(cfg, &p)?;
    let settings = cfg.sampler_settings(&p);
    let disjoint = cfg.build_graphs()?.remove(0);
    let connected_seed = cfg.graph_seed(1).expect("disjoint spec has a seed");
    let connected = lwc_core::graph::generate_random_regular(copies * size, k, connected_seed)?;
    let graphs = [disjoint, connected];
    let results: Vec<(SampleBatch, f64, f64)> = graphs
        .par_iter()
        .enumerate()
        .map(|(j, g)| {
            let batch = sample_unconditioned(g, &p, cfg.sampler.samples, &settings, cfg.sampler_seed(j))?;
            let conditioned = sample_conditioned_plus(batch)?;
            let q = q_hat(&conditioned, g, cfg.diagnostics.ell, delta)?;
            let minus = minus_component_fraction(&conditioned, g);
            Ok((conditioned, q, minus))
        })
        .collect::<Result<_>>()?;
    let (q_disjoint, q_connected) = (results[0].1, results[1].1);
    let mut checks = Vec::new();
    if let Some([lo, hi]) = cfg.assertions.q_hat_range {
        checks.push(Check::new(
            format!("disjoint q_hat in [{lo}, {hi})"),
            (lo..hi).contains(&q_disjoint),
            format!("{q_disjoint:.6}"),
        ));
    }
    if let Some(excess) = cfg.assertions.q_hat_min_excess {
        checks.push(Check::new(
            format!("disjoint q_hat exceeds connected by >= {excess}"),
            q_disjoint - q_connected >= excess,
            format!("{q_disjoint:.6} - {q_connected:.6} = {:.6}", q_disjoint - q_connected),
        ));
    }
    let mut table = Table::new("q_hat", &["graph", "n", "components", "samples", "q_hat", "minus_component_fraction"]);
    for (label, g, (batch, q, minus)) in [("disjoint", &graphs[0], &results[0]), ("connected", &graphs[1], &results[1])] {
        table.push(vec![
            label.into(),
            g.n().to_string(),
            g.components().len().to_string(),
            batch.len().to_string(),
            num(*q),
            num(*minus),
        ]);
    }
    Ok(Outcome {
        experiment: cfg.experiment,
        report: json!({
            "copies": copies,
            "component_size": size,
            "delta": delta,
            "q_hat_disjoint": q_disjoint,
            "q_hat_connected": q_connected,
            "minus_component_fraction_disjoint": results[0].2,
            "minus_component_fraction_connected": results[1].2,
            "checks": checks,
        }),
        tables: vec![table],
        checks,
        seeds: SeedRecord {
            graphs: vec![cfg.graph_seed(0), Some(connected_seed)],
            chains: vec![cfg.sampler_seed(0), cfg.sampler_seed(1)],
            graph_fingerprints: graphs.iter().map(|g| g.fingerprint()).collect(),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyPoint {
    pub beta: f64,
    pub algorithm: Algorithm,
    pub tree_edge_correlation: f64,
    pub unconditioned: Estimate,
    pub conditioned: Estimate,
    /// Central difference of the free energy, omitted inside the critical window.
    pub free_energy_derivative: Option<f64>,
}

/// Edge agreement under the unconditioned and conditioned measures on a `beta` grid.
pub fn energy(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = cfg.build_graphs()?.remove(0);
    let k = cfg.degree();
    let eps = cfg.diagnostics.fd_step;
    let points: Vec<EnergyPoint> = cfg
        .diagnostics
        .betas
        .par_iter()
        .enumerate()
        .map(|(j, &beta)| {
            let p = cfg.params_at(beta)?;
            let settings = cfg.sampler_settings(&p);
            let batch = sample_unconditioned(&g, &p, cfg.sampler.samples, &settings, cfg.sampler_seed(j))?;
            let unconditioned = edge_agreement(&batch, &g)?;
            let conditioned = edge_agreement(&sample_conditioned_plus(batch)?, &g)?;
            let off_critical = (beta - critical_beta(k)).abs() > 0.02;
            let free_energy_derivative = if off_critical && beta >= eps {
                let hi = free_energy(&cfg.params_at(beta + eps)?)?;
                let lo = free_energy(&cfg.params_at(beta - eps)?)?;
                Some((hi - lo) / (2.0 * eps))
            } else {
                None
            };
            Ok(EnergyPoint {
                beta,
                algorithm: settings.algorithm,
                tree_edge_correlation: edge_correlation(&p)?,
                unconditioned,
                conditioned,
                free_energy_derivative,
            })
        })
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut table = Table::new(
        "energy",
        &["beta", "algorithm", "tree", "mean", "stderr", "conditioned_mean", "conditioned_stderr", "dphi_dbeta"],
    );
    for pt in &points {
        if let Some(m) = cfg.assertions.energy_stderr_multiple {
            for (label, est) in [("mu_n", pt.unconditioned), ("mu_n+", pt.conditioned)] {
                let gap = (est.mean - pt.tree_edge_correlation).abs();
                checks.push(Check::new(
                    format!("beta = {}: {label} edge agreement within {m} stderr of tree", pt.beta),
                    gap <= m * est.stderr,
                    format!("|{:.6} - {:.6}| = {gap:.2e}, stderr {:.2e}", est.mean, pt.tree_edge_correlation, est.stderr),
                ));
            }
            let diff = (pt.unconditioned.mean - pt.conditioned.mean).abs();
            let se = pt.unconditioned.stderr.max(pt.conditioned.stderr);
            checks.push(Check::new(
                format!("beta = {}: mu_n and mu_n+ agree within stderr", pt.beta),
                diff <= se,
                format!("{diff:.2e} vs {se:.2e}"),
            ));
        }
        if let (Some(tol), Some(d)) = (cfg.assertions.thermodynamic_tolerance, pt.free_energy_derivative) {
            let expected = 0.5 * k as f64 * pt.tree_edge_correlation;
            checks.push(Check::new(
                format!("beta = {}: dphi/dbeta = (k/2) edge correlation", pt.beta),
                (d - expected).abs() < tol,
                format!("{:.3e}", (d - expected).abs()),
            ));
        }
        table.push(vec![
            num(pt.beta),
            pt.algorithm.name().into(),
            num(pt.tree_edge_correlation),
            num(pt.unconditioned.mean),
            num(pt.unconditioned.stderr),
            num(pt.conditioned.mean),
            num(pt.conditioned.stderr),
            pt.free_energy_derivative.map(num).unwrap_or_default(),
        ]);
    }
    Ok(Outcome {
        experiment: cfg.experiment,
        report: json!({ "n": g.n(), "points": points, "checks": checks }),
        tables: vec![table],
        checks,
        seeds: SeedRecord {
            graphs: vec![cfg.graph_seed(0)],
            chains: (0..cfg.diagnostics.betas.len()).map(|j| cfg.sampler_seed(j)).collect(),
            graph_fingerprints: vec![g.fingerprint()],
        },
    })
}

const CONCENTRATION_FUNCTIONS: [LocalFunction; 2] = [LocalFunction::Spin, LocalFunction::NeighbourAgreement];

fn function_name(f: LocalFunction) -> &'static str {
    match f {
        LocalFunction::Constant(_) => "constant",
        LocalFunction::Spin => "spin",
        LocalFunction::NeighbourAgreement => "neighbour_agreement",
    }
}

/// Variance of local averages under the conditioned measure along the ladder.
pub fn concentration(cfg: &ExperimentConfig, rungs: &[Rung]) -> Result<Outcome> {
    let variances: Vec<Vec<f64>> = rungs
        .par_iter()
        .map(|r| {
            let conditioned = sample_conditioned_plus(r.batch.clone())?;
            CONCENTRATION_FUNCTIONS
                .iter()
                .map(|&f| Ok(local_function_variance(&conditioned, &r.graph, f)?))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut table = Table::new("variance", &["n", "function", "variance"]);
    let mut series = serde_json::Map::new();
    for (fi, &f) in CONCENTRATION_FUNCTIONS.iter().enumerate() {
        let values: Vec<f64> = variances.iter().map(|v| v[fi]).collect();
        if cfg.assertions.variance_decreasing == Some(true) {
            checks.push(Check::new(
                format!("variance of {} average strictly decreasing in n", function_name(f)),
                values.windows(2).all(|w| w[1] < w[0]),
                format!("{values:?}"),
            ));
        }
        for (r, v) in rungs.iter().zip(&values) {
            table.push(vec![r.graph.n().to_string(), function_name(f).into(), num(*v)]);
        }
        series.insert(function_name(f).into(), json!(values));
    }
    Ok(Outcome {
        experiment: cfg.experiment,
        report: json!({
            "sizes": rungs.iter().map(|r| r.graph.n()).collect::<Vec<_>>(),
            "variance": series,
            "checks": checks,
        }),
        tables: vec![table],
        checks,
        seeds: seeds_of(rungs),
    })
}

/// Anticoncentration statistic along the ladder (unconditioned batches).
pub fn anticoncentration_ladder(cfg: &ExperimentConfig, rungs: &[Rung]) -> Result<Outcome> {
    let stats: Vec<Anticoncentration> =
        rungs.par_iter().map(|r| Ok(anticoncentration(&r.batch, &r.graph)?)).collect::<Result<_>>()?;
    let mut checks = Vec::new();
    if let Some(slack) = cfg.assertions.anticoncentration_slack {
        let series: Vec<f64> = stats.iter().map(|s| s.statistic).collect();
        checks.push(Check::new(
            format!("anticoncentration non-increasing within {:.0}%", slack * 100.0),
            series.windows(2).all(|w| w[1] <= (1.0 + slack) * w[0]),
            format!("{series:?}"),
        ));
        checks.push(Check::new(
            "no degenerate batches",
            stats.iter().all(|s| !s.degenerate),
            format!("{:?}", stats.iter().map(|s| s.degenerate).collect::<Vec<_>>()),
        ));
    }
    let mut table = Table::new("anticoncentration", &["n", "independent_set", "sup_probability", "statistic"]);
    for (r, s) in rungs.iter().zip(&stats) {
        table.push(vec![r.graph.n().to_string(), s.independent_set_size.to_string(), num(s.sup_probability), num(s.statistic)]);
    }
    Ok(Outcome {
        experiment: cfg.experiment,
        report: json!({
            "sizes": rungs.iter().map(|r| r.graph.n()).collect::<Vec<_>>(),
            "stats": stats,
            "checks": checks,
        }),
        tables: vec![table],
        checks,
        seeds: seeds_of(rungs),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplerValidation {
    pub graph: String,
    pub beta: f64,
    pub algorithm: String,
    pub samples: usize,
    pub tv: f64,
}

/// Glauber and Wolff against exact enumeration, and the conditioned sampler against the
/// exact conditional law.
pub fn validate_samplers(cfg: &ExperimentConfig) -> Result<Outcome> {
    let graphs = cfg.build_graphs()?;
    let names: Vec<String> = match &cfg.graph {
        crate::config::GraphSpec::Named { names } => names.clone(),
        _ => graphs.iter().enumerate().map(|(i, _)| format!("graph{i}")).collect(),
    };
    let mut jobs = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        for &beta in &cfg.diagnostics.betas {
            for alg in [Algorithm::Glauber, Algorithm::Wolff] {
                jobs.push((gi, g, beta, alg, false));
            }
        }
        jobs.push((gi, g, cfg.ising.beta, Algorithm::Wolff, true));
    }
    let rows: Vec<(SamplerValidation, Option<bool>)> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(gi, g, beta, alg, conditioned))| {
            let p = cfg.params_at(beta)?;
            let settings = SamplerSettings {
                algorithm: alg,
                thin: cfg.sampler.thin,
                burn_in: cfg.sampler.burn_in.unwrap_or(SamplerSettings::new(alg).burn_in),
                flip_symmetry: cfg.sampler.flip_symmetry,
            };
            let exact = exact_distribution(g, &p)?;
            let batch = sample_unconditioned(g, &p, cfg.sampler.samples, &settings, cfg.sampler_seed(j))?;
            let (tv, identity) = if conditioned {
                let conditioned = sample_conditioned_plus(batch)?;
                let target = exact.conditioned_positive();
                let tv = lwc_core::diagnostics::tv_distance(&conditioned.empirical_table()?, &target)?;
                (tv, Some(exact.flip_map_pushforward() == target))
            } else {
                (lwc_core::diagnostics::tv_distance(&batch.empirical_table()?, exact.probs())?, None)
            };
            let algorithm = if conditioned { format!("{}+conditioned", alg.name()) } else { alg.name().to_string() };
            Ok((SamplerValidation { graph: names[gi].clone(), beta, algorithm, samples: cfg.sampler.samples, tv }, identity))
        })
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut table = Table::new("sampler_tv", &["graph", "beta", "algorithm", "samples", "tv"]);
    for (row, identity) in &rows {
        if let Some(max) = cfg.assertions.sampler_tv_max {
            checks.push(Check::new(
                format!("{} beta = {} {}: TV < {max}", row.graph, row.beta, row.algorithm),
                row.tv < max,
                format!("{:.6}", row.tv),
            ));
        }
        if let Some(same) = identity {
            checks.push(Check::new(
                format!("{} beta = {}: flip map pushes the exact law onto the exact conditional", row.graph, row.beta),
                *same,
                "bitwise comparison",
            ));
        }
        table.push(vec![row.graph.clone(), num(row.beta), row.algorithm.clone(), row.samples.to_string(), num(row.tv)]);
    }
    let validations: Vec<&SamplerValidation> = rows.iter().map(|(r, _)| r).collect();
    Ok(Outcome {
        experiment: cfg.experiment,
        report: json!({ "validations": validations, "checks": checks }),
        tables: vec![table],
        checks,
        seeds: SeedRecord {
            graphs: vec![None; graphs.len()],
            chains: (0..jobs.len()).map(|j| cfg.sampler_seed(j)).collect(),
            graph_fingerprints: graphs.iter().map(|g| g.fingerprint()).collect(),
        },
    })
}
