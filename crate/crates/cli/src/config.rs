//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use lwc_core::graph::generate_random_regular;
use lwc_core::seed::derive_seed;
use lwc_core::{Algorithm, IsingParams, RegularGraph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Theorem1Part1,
    Theorem1Part2,
    Counterexample,
    Energy,
    Concentration,
    Anticoncentration,
    Validate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Theorem1Part1,
        ExperimentKind::Theorem1Part2,
        ExperimentKind::Counterexample,
        ExperimentKind::Energy,
        ExperimentKind::Concentration,
        ExperimentKind::Anticoncentration,
        ExperimentKind::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Theorem1Part1 => "theorem1-part1",
            ExperimentKind::Theorem1Part2 => "theorem1-part2",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::Energy => "energy",
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::Anticoncentration => "anticoncentration",
            ExperimentKind::Validate => "validate",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| ConfigError::UnknownExperiment(name.to_string()))
    }

    /// The shipped configuration for this experiment.
    pub fn default_config_text(self) -> &'static str {
        match self {
            ExperimentKind::Theorem1Part1 => include_str!("../configs/theorem1-part1.toml"),
            ExperimentKind::Theorem1Part2 => include_str!("../configs/theorem1-part2.toml"),
            ExperimentKind::Counterexample => include_str!("../configs/counterexample.toml"),
            ExperimentKind::Energy => include_str!("../configs/energy.toml"),
            ExperimentKind::Concentration => include_str!("../configs/concentration.toml"),
            ExperimentKind::Anticoncentration => include_str!("../configs/anticoncentration.toml"),
            ExperimentKind::Validate => include_str!("../configs/validate.toml"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphSpec {
    /// One configuration-model graph per size.
    Random { sizes: Vec<usize>, k: usize, seed: u64 },
    /// `K4` or `Petersen`.
    Named { names: Vec<String> },
    /// Edge-list files.
    File { paths: Vec<PathBuf> },
    /// `copies` disjoint random components of `size` vertices each.
    Disjoint { copies: usize, size: usize, k: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingSection {
    pub beta: f64,
    #[serde(default)]
    pub field: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    /// Wolff at zero field in the non-uniqueness regime, Glauber otherwise.
    Auto,
    Glauber,
    Wolff,
}

impl AlgorithmChoice {
    pub fn resolve(self, p: &IsingParams) -> Algorithm {
        match self {
            AlgorithmChoice::Auto => Algorithm::default_for(p),
            AlgorithmChoice::Glauber => Algorithm::Glauber,
            AlgorithmChoice::Wolff => Algorithm::Wolff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    #[serde(default = "auto")]
    pub algorithm: AlgorithmChoice,
    pub samples: usize,
    /// Defaults to the algorithm's standard burn-in.
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default = "default_thin")]
    pub thin: usize,
    #[serde(default = "yes")]
    pub flip_symmetry: bool,
    pub seed: u64,
}

fn auto() -> AlgorithmChoice {
    AlgorithmChoice::Auto
}

fn default_thin() -> usize {
    10
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaChoice {
    Auto(AutoTag),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl DeltaChoice {
    /// `rho / 2` when automatic.
    pub fn resolve(self, rho: f64) -> f64 {
        match self {
            DeltaChoice::Auto(_) => rho / 2.0,
            DeltaChoice::Value(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_radii")]
    pub radii: Vec<usize>,
    #[serde(default = "default_ell")]
    pub ell: usize,
    #[serde(default = "auto_delta")]
    pub delta: DeltaChoice,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Depth of the forced boundary for plus and mixture references.
    #[serde(default = "default_t_plus")]
    pub t_plus: usize,
    #[serde(default = "flip_symmetric")]
    pub averaging: lwc_core::diagnostics::Averaging,
    /// Inverse temperatures for grid experiments (energy, sampler validation).
    #[serde(default)]
    pub betas: Vec<f64>,
    /// Finite-difference step for the free-energy derivative.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            ell: default_ell(),
            delta: auto_delta(),
            epsilon: default_epsilon(),
            t_plus: default_t_plus(),
            averaging: flip_symmetric(),
            betas: Vec::new(),
            fd_step: default_fd_step(),
        }
    }
}

fn default_radii() -> Vec<usize> {
    vec![1, 2]
}
fn default_ell() -> usize {
    2
}
fn auto_delta() -> DeltaChoice {
    DeltaChoice::Auto(AutoTag::Auto)
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_t_plus() -> usize {
    30
}
fn flip_symmetric() -> lwc_core::diagnostics::Averaging {
    lwc_core::diagnostics::Averaging::FlipSymmetric
}
fn default_fd_step() -> f64 {
    1e-4
}

/// Pass/fail checks evaluated after a run; absent entries are not checked.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionSection {
    /// Mode-A TV strictly decreasing along the size ladder, for every radius.
    pub mode_a_decreasing: Option<bool>,
    /// Upper bound on mode-A TV at the largest size and smallest radius.
    pub mode_a_max: Option<f64>,
    /// Upper bound on `q_hat` at the largest size.
    pub q_hat_max: Option<f64>,
    /// Half-open interval `[lo, hi)` for `q_hat`.
    pub q_hat_range: Option<[f64; 2]>,
    /// Minimum excess of the disjoint-graph `q_hat` over the connected comparison.
    pub q_hat_min_excess: Option<f64>,
    /// Edge agreement within this many standard errors of the tree value.
    pub energy_stderr_multiple: Option<f64>,
    /// Tolerance of the free-energy derivative identity.
    pub thermodynamic_tolerance: Option<f64>,
    /// Allowed relative increase of the anticoncentration statistic between sizes.
    pub anticoncentration_slack: Option<f64>,
    /// Local-average variance strictly decreasing along the ladder.
    pub variance_decreasing: Option<bool>,
    /// Sampler TV bound against the exact table.
    pub sampler_tv_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub output_dir: PathBuf,
    pub graph: GraphSpec,
    pub ising: IsingSection,
    pub sampler: SamplerSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub assertions: AssertionSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn default_for(kind: ExperimentKind) -> Self {
        Self::from_toml(kind.default_config_text()).expect("shipped configs are valid")
    }

    pub fn params(&self) -> Result<IsingParams, ConfigError> {
        self.params_at(self.ising.beta)
    }

    pub fn params_at(&self, beta: f64) -> Result<IsingParams, ConfigError> {
        IsingParams::with_field(self.degree(), beta, self.ising.field).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn degree(&self) -> usize {
        match &self.graph {
            GraphSpec::Random { k, .. } | GraphSpec::Disjoint { k, .. } => *k,
            GraphSpec::Named { .. } | GraphSpec::File { .. } => 3,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        match &self.graph {
            GraphSpec::Random { sizes, k, .. } => {
                if sizes.is_empty() {
                    return invalid("graph ladder is empty".into());
                }
                if let Some(&n) = sizes.iter().find(|&&n| n <= *k || *k < 3 || (n * k) % 2 == 1) {
                    return invalid(format!("no simple {k}-regular graph on {n} vertices"));
                }
            }
            GraphSpec::Named { names } => {
                if names.is_empty() {
                    return invalid("graph ladder is empty".into());
                }
                for name in names {
                    RegularGraph::named(name).map_err(|e| ConfigError::Invalid(e.to_string()))?;
                }
            }
            GraphSpec::File { paths } => {
                if paths.is_empty() {
                    return invalid("graph ladder is empty".into());
                }
            }
            GraphSpec::Disjoint { copies, size, k, .. } => {
                if *copies == 0 || *size <= *k || *k < 3 || (size * k) % 2 == 1 {
                    return invalid(format!("bad disjoint graph: {copies} copies of {size} vertices, degree {k}"));
                }
            }
        }
        if !(self.ising.beta >= 0.0 && self.ising.beta.is_finite()) {
            return invalid(format!("beta must be finite and >= 0, got {}", self.ising.beta));
        }
        if self.sampler.samples == 0 || self.sampler.thin == 0 {
            return invalid("samples and thin must be positive".into());
        }
        let d = &self.diagnostics;
        if d.radii.is_empty() {
            return invalid("diagnostics.radii is empty".into());
        }
        if let Some(&t) = d.radii.iter().find(|&&t| t >= d.t_plus) {
            return invalid(format!("radius {t} must be below t_plus = {}", d.t_plus));
        }
        if !(d.epsilon > 0.0 && d.epsilon < 1.0) {
            return invalid(format!("epsilon must lie in (0, 1), got {}", d.epsilon));
        }
        if matches!(self.experiment, ExperimentKind::Energy | ExperimentKind::Validate) && d.betas.is_empty() {
            return invalid(format!("{} needs diagnostics.betas", self.experiment.name()));
        }
        if self.experiment == ExperimentKind::Theorem1Part2 && d.averaging == lwc_core::diagnostics::Averaging::FlipSymmetric {
            return invalid("flip-symmetric averaging is biased for conditioned batches; use \"plain\"".into());
        }
        if let Some(b) = d.betas.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
            return invalid(format!("grid beta {b} must be finite and >= 0"));
        }
        if let DeltaChoice::Value(v) = d.delta {
            if !(v > 0.0 && v < 1.0) {
                return invalid(format!("delta must lie in (0, 1), got {v}"));
            }
        }
        Ok(())
    }

    /// Seed of the `j`-th graph in the ladder.
    pub fn graph_seed(&self, j: usize) -> Option<u64> {
        match &self.graph {
            GraphSpec::Random { seed, .. } | GraphSpec::Disjoint { seed, .. } => Some(derive_seed(*seed, j as u64)),
            _ => None,
        }
    }

    /// Seed of the chain run on the `j`-th graph (or grid point).
    pub fn sampler_seed(&self, j: usize) -> u64 {
        derive_seed(self.sampler.seed, j as u64)
    }

    pub fn sampler_settings(&self, p: &IsingParams) -> lwc_core::sampler::SamplerSettings {
        let algorithm = self.sampler.algorithm.resolve(p);
        let base = lwc_core::sampler::SamplerSettings::new(algorithm);
        lwc_core::sampler::SamplerSettings {
            burn_in: self.sampler.burn_in.unwrap_or(base.burn_in),
            thin: self.sampler.thin,
            flip_symmetry: self.sampler.flip_symmetry,
            algorithm,
        }
    }

    /// Builds the graph ladder in configuration order.
    pub fn build_graphs(&self) -> anyhow::Result<Vec<RegularGraph>> {
        Ok(match &self.graph {
            GraphSpec::Random { sizes, k, .. } => sizes
                .iter()
                .enumerate()
                .map(|(j, &n)| generate_random_regular(n, *k, self.graph_seed(j).expect("random")))
                .collect::<Result<_, _>>()?,
            GraphSpec::Named { names } => names.iter().map(|n| RegularGraph::named(n)).collect::<Result<_, _>>()?,
            GraphSpec::File { paths } => paths
                .iter()
                .map(|p| -> anyhow::Result<RegularGraph> {
                    let f = std::fs::File::open(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
                    Ok(RegularGraph::read_edge_list(std::io::BufReader::new(f))?)
                })
                .collect::<Result<_, _>>()?,
            GraphSpec::Disjoint { copies, size, k, .. } => {
                let parts = (0..*copies)
                    .map(|c| generate_random_regular(*size, *k, derive_seed(self.graph_seed(0).expect("disjoint"), c as u64)))
                    .collect::<Result<Vec<_>, _>>()?;
                vec![RegularGraph::disjoint_union(&parts)?]
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
