use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::RegularGraph;
use crate::tree::IsingParams;

use super::mcmc::{ChainState, Kernel};
use super::{Algorithm, SamplerError, SpinConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    pub algorithm: Algorithm,
    /// Sweeps (Glauber) or cluster flips (Wolff) discarded before the first sample.
    pub burn_in: usize,
    /// Sweeps or cluster flips between consecutive samples.
    pub thin: usize,
    /// At zero field, follow each thinning interval by flipping every connected component
    /// independently with probability 1/2 (a global flip when the graph is connected). The
    /// move leaves the measure invariant and removes the chain's memory of which phase each
    /// component is in.
    pub flip_symmetry: bool,
}

impl SamplerSettings {
    pub fn new(algorithm: Algorithm) -> Self {
        let burn_in = match algorithm {
            Algorithm::Glauber => 100,
            Algorithm::Wolff => 200,
        };
        Self { algorithm, burn_in, thin: 10, flip_symmetry: true }
    }

    pub fn for_params(p: &IsingParams) -> Self {
        Self::new(Algorithm::default_for(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchMeta {
    pub graph_hash: String,
    pub n: usize,
    pub beta: f64,
    pub field: f64,
    pub algorithm: Algorithm,
    pub burn_in: usize,
    pub thin: usize,
    pub flip_symmetry: bool,
    pub seed: u64,
    pub conditioned: bool,
}

/// Seeded, thinned spin configurations with the metadata needed to reproduce them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    configs: Vec<SpinConfig>,
    meta: BatchMeta,
}

impl SampleBatch {
    pub fn new(configs: Vec<SpinConfig>, meta: BatchMeta) -> Result<Self, SamplerError> {
        if let Some(c) = configs.iter().find(|c| c.len() != meta.n) {
            return Err(SamplerError::Invalid(format!("config of length {} in batch with n = {}", c.len(), meta.n)));
        }
        if meta.conditioned && configs.iter().any(|c| c.magnetization() <= 0) {
            return Err(SamplerError::Invalid("conditioned batch contains a config with M <= 0".into()));
        }
        Ok(Self { configs, meta })
    }

    pub fn configs(&self) -> &[SpinConfig] {
        &self.configs
    }

    pub fn meta(&self) -> &BatchMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// Empirical distribution over packed configuration indices (`n <= 24`).
    pub fn empirical_table(&self) -> Result<Vec<f64>, SamplerError> {
        if self.meta.n > super::EXACT_MAX_N {
            return Err(SamplerError::SizeLimit { n: self.meta.n, max: super::EXACT_MAX_N });
        }
        let mut counts = vec![0.0; 1 << self.meta.n];
        for c in &self.configs {
            counts[c.index()] += 1.0;
        }
        let total = self.configs.len() as f64;
        counts.iter_mut().for_each(|x| *x /= total);
        Ok(counts)
    }

    /// CSV: `# key=value` metadata lines, then one row of comma-separated `±1` spins per config.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), SamplerError> {
        let m = &self.meta;
        writeln!(w, "# graph_hash={}", m.graph_hash)?;
        writeln!(w, "# n={}", m.n)?;
        writeln!(w, "# beta={:?}", m.beta)?;
        writeln!(w, "# field={:?}", m.field)?;
        writeln!(w, "# algorithm={}", m.algorithm.name())?;
        writeln!(w, "# burn_in={}", m.burn_in)?;
        writeln!(w, "# thin={}", m.thin)?;
        writeln!(w, "# flip_symmetry={}", m.flip_symmetry)?;
        writeln!(w, "# seed={}", m.seed)?;
        writeln!(w, "# conditioned={}", m.conditioned)?;
        let mut line = String::with_capacity(3 * m.n);
        for c in &self.configs {
            line.clear();
            for (j, &s) in c.spins().iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(if s > 0 { "1" } else { "-1" });
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, SamplerError> {
        let mut kv = std::collections::HashMap::new();
        let mut configs = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| SamplerError::Parse { line: idx + 1, msg };
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest.trim().split_once('=').ok_or_else(|| perr("expected key=value".into()))?;
                kv.insert(k.trim().to_string(), v.trim().to_string());
                continue;
            }
            let spins = line
                .split(',')
                .map(|tok| tok.trim().parse::<i8>().map_err(|e| perr(format!("{e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            configs.push(SpinConfig::new(spins).map_err(|e| perr(e.to_string()))?);
        }
        let get = |key: &str| {
            kv.get(key)
                .cloned()
                .ok_or_else(|| SamplerError::Parse { line: 0, msg: format!("missing metadata `{key}`") })
        };
        fn num<T: std::str::FromStr>(key: &str, v: String) -> Result<T, SamplerError> {
            v.parse().map_err(|_| SamplerError::Parse { line: 0, msg: format!("bad value for `{key}`: {v}") })
        }
        let meta = BatchMeta {
            graph_hash: get("graph_hash")?,
            n: num("n", get("n")?)?,
            beta: num("beta", get("beta")?)?,
            field: num("field", get("field")?)?,
            algorithm: get("algorithm")?.parse()?,
            burn_in: num("burn_in", get("burn_in")?)?,
            thin: num("thin", get("thin")?)?,
            flip_symmetry: num("flip_symmetry", get("flip_symmetry")?)?,
            seed: num("seed", get("seed")?)?,
            conditioned: num("conditioned", get("conditioned")?)?,
        };
        Self::new(configs, meta)
    }
}

/// Runs one chain from the all-plus configuration and records `nsamples` thinned states.
pub fn sample_unconditioned(
    g: &RegularGraph,
    p: &IsingParams,
    nsamples: usize,
    settings: &SamplerSettings,
    seed: u64,
) -> Result<SampleBatch, SamplerError> {
    if nsamples == 0 {
        return Err(SamplerError::Invalid("nsamples must be positive".into()));
    }
    if settings.thin == 0 {
        return Err(SamplerError::Invalid("thinning interval must be at least 1".into()));
    }
    if settings.algorithm == Algorithm::Wolff && p.field != 0.0 {
        return Err(SamplerError::NonzeroField(p.field));
    }
    let kernel = Kernel::new(g, p, settings.algorithm)?;
    let mut state = ChainState::new(SpinConfig::all_plus(g.n()), seed);
    for _ in 0..settings.burn_in {
        kernel.step(g, &mut state);
    }
    let use_flip = settings.flip_symmetry && p.field == 0.0;
    let components = if use_flip { g.components() } else { Vec::new() };
    let mut configs = Vec::with_capacity(nsamples);
    for _ in 0..nsamples {
        for _ in 0..settings.thin {
            kernel.step(g, &mut state);
        }
        if components.len() == 1 {
            if state.rng.gen::<bool>() {
                state.config.flip_all();
            }
        } else {
            for comp in &components {
                if state.rng.gen::<bool>() {
                    comp.iter().for_each(|&v| state.config.flip(v));
                }
            }
        }
        configs.push(state.config.clone());
    }
    let meta = BatchMeta {
        graph_hash: g.fingerprint(),
        n: g.n(),
        beta: p.beta,
        field: p.field,
        algorithm: settings.algorithm,
        burn_in: settings.burn_in,
        thin: settings.thin,
        flip_symmetry: use_flip,
        seed,
        conditioned: false,
    };
    SampleBatch::new(configs, meta)
}

/// Maps an unconditioned zero-field batch to one for the measure conditioned on `M > 0`:
/// configurations with `M < 0` are flipped globally and those with `M = 0` are dropped.
pub fn sample_conditioned_plus(batch: SampleBatch) -> Result<SampleBatch, SamplerError> {
    if batch.meta.conditioned {
        return Err(SamplerError::Invalid("batch is already conditioned".into()));
    }
    if batch.meta.field != 0.0 {
        return Err(SamplerError::NonzeroField(batch.meta.field));
    }
    let SampleBatch { configs, mut meta } = batch;
    let configs: Vec<SpinConfig> = configs
        .into_iter()
        .filter(|c| c.magnetization() != 0)
        .map(|mut c| {
            if c.magnetization() < 0 {
                c.flip_all();
            }
            c
        })
        .collect();
    if configs.is_empty() {
        return Err(SamplerError::Invalid("every configuration had zero magnetization".into()));
    }
    meta.conditioned = true;
    SampleBatch::new(configs, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(n: usize) -> BatchMeta {
        BatchMeta {
            graph_hash: "x".into(),
            n,
            beta: 1.0,
            field: 0.0,
            algorithm: Algorithm::Wolff,
            burn_in: 0,
            thin: 1,
            flip_symmetry: true,
            seed: 0,
            conditioned: false,
        }
    }

    #[test]
    fn conditioning_flips_and_discards() {
        let configs = vec![
            SpinConfig::new(vec![1, 1, -1, 1]).unwrap(),
            SpinConfig::new(vec![-1, -1, -1, 1]).unwrap(),
            SpinConfig::new(vec![1, -1, -1, 1]).unwrap(),
        ];
        let out = sample_conditioned_plus(SampleBatch::new(configs, meta(4)).unwrap()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.configs()[0].spins(), &[1, 1, -1, 1]);
        assert_eq!(out.configs()[1].spins(), &[1, 1, 1, -1]);
        assert!(out.meta().conditioned);
        assert!(sample_conditioned_plus(out).is_err());
    }

    #[test]
    fn conditioning_requires_zero_field() {
        let mut m = meta(2);
        m.field = 0.5;
        let b = SampleBatch::new(vec![SpinConfig::all_plus(2)], m).unwrap();
        assert!(matches!(sample_conditioned_plus(b), Err(SamplerError::NonzeroField(_))));
    }

    #[test]
    fn batches_are_bit_identical_per_seed() {
        let g = RegularGraph::petersen();
        let p = IsingParams::new(3, 0.7).unwrap();
        for alg in [Algorithm::Glauber, Algorithm::Wolff] {
            let s = SamplerSettings::new(alg);
            let a = sample_unconditioned(&g, &p, 200, &s, 17).unwrap();
            let b = sample_unconditioned(&g, &p, 200, &s, 17).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, sample_unconditioned(&g, &p, 200, &s, 18).unwrap());
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = RegularGraph::petersen();
        let p = IsingParams::new(3, 0.7).unwrap();
        let b = sample_unconditioned(&g, &p, 30, &SamplerSettings::new(Algorithm::Glauber), 4).unwrap();
        let b = sample_conditioned_plus(b).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        assert_eq!(SampleBatch::read_csv(buf.as_slice()).unwrap(), b);
        let bad = String::from_utf8(buf).unwrap().replace("# seed=4\n", "");
        assert!(SampleBatch::read_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn invalid_settings() {
        let g = RegularGraph::petersen();
        let p = IsingParams::with_field(3, 0.7, 0.2).unwrap();
        assert!(sample_unconditioned(&g, &p, 10, &SamplerSettings::new(Algorithm::Wolff), 1).is_err());
        assert!(sample_unconditioned(&g, &p, 0, &SamplerSettings::new(Algorithm::Glauber), 1).is_err());
        let mut s = SamplerSettings::new(Algorithm::Glauber);
        s.thin = 0;
        assert!(sample_unconditioned(&g, &p, 10, &s, 1).is_err());
    }
}
