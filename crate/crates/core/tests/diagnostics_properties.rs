use lwc_core::diagnostics::{
    anticoncentration, edge_agreement, empirical_ball_law, f_census, local_function_variance, mode_a_statistic,
    mode_c_statistic, tv_distance, Averaging, LocalFunction,
};
use lwc_core::graph::{ball, generate_random_regular, greedy_independent_set, tree_likeness_fraction};
use lwc_core::sampler::{
    exact_distribution, sample_conditioned_plus, sample_unconditioned, Algorithm, BatchMeta, SampleBatch,
    SamplerSettings, SpinConfig,
};
use lwc_core::tree::{mixture_marginal, plus_boundary_marginal};
use lwc_core::{IsingParams, RegularGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(beta: f64) -> IsingParams {
    IsingParams::new(3, beta).unwrap()
}

fn meta(g: &RegularGraph, beta: f64) -> BatchMeta {
    BatchMeta {
        graph_hash: g.fingerprint(),
        n: g.n(),
        beta,
        field: 0.0,
        algorithm: Algorithm::Glauber,
        burn_in: 0,
        thin: 1,
        flip_symmetry: false,
        seed: 0,
        conditioned: false,
    }
}

/// Independent draws from the exact Ising table.
fn exact_batch(g: &RegularGraph, beta: f64, samples: usize, seed: u64) -> SampleBatch {
    let exact = exact_distribution(g, &p(beta)).unwrap();
    let mut cumulative = Vec::with_capacity(exact.probs().len());
    let mut acc = 0.0;
    for q in exact.probs() {
        acc += q;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = (0..samples)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
            SpinConfig::from_index(g.n(), idx)
        })
        .collect();
    SampleBatch::new(configs, meta(g, beta)).unwrap()
}

#[test]
fn infinite_temperature_ball_law_is_near_uniform() {
    let g = RegularGraph::petersen();
    let batch = exact_batch(&g, 0.0, 100_000, 1);
    let law = empirical_ball_law(&batch, &g, 0, 1).unwrap();
    let uniform = vec![1.0 / 16.0; 16];
    assert!(tv_distance(&law.probs, &uniform).unwrap() < 0.02);
}

#[test]
fn ball_law_matches_exact_marginal() {
    let g = RegularGraph::petersen();
    let batch = exact_batch(&g, 0.5, 200_000, 2);
    let exact = exact_distribution(&g, &p(0.5)).unwrap();
    for i in [0, 3, 7] {
        let b = ball(&g, i, 1);
        let law = empirical_ball_law(&batch, &g, i, 1).unwrap();
        let marginal = exact.marginal(&b.vertices);
        // 16 cells at 2e5 samples: expected TV is about 0.003.
        assert!(tv_distance(&law.probs, &marginal).unwrap() < 0.01);
    }
}

#[test]
fn edge_agreement_matches_exact_value() {
    let g = RegularGraph::petersen();
    let exact = exact_distribution(&g, &p(0.5)).unwrap();
    let edges = exact.edge_expectations(&g);
    let oracle = edges.iter().sum::<f64>() / edges.len() as f64;
    let batch = exact_batch(&g, 0.5, 100_000, 3);
    let e = edge_agreement(&batch, &g).unwrap();
    assert!((e.mean - oracle).abs() < 4.0 * e.stderr, "{} vs {oracle} (se {})", e.mean, e.stderr);

    let hot = edge_agreement(&exact_batch(&g, 0.0, 50_000, 4), &g).unwrap();
    assert!(hot.mean.abs() < 3.0 * hot.stderr);
}

#[test]
fn conditioning_preserves_edge_agreement() {
    let g = generate_random_regular(200, 3, 6).unwrap();
    let batch = sample_unconditioned(&g, &p(1.0), 2000, &SamplerSettings::new(Algorithm::Wolff), 7).unwrap();
    let plain = edge_agreement(&batch, &g).unwrap();
    let conditioned = edge_agreement(&sample_conditioned_plus(batch).unwrap(), &g).unwrap();
    assert!((plain.mean - conditioned.mean).abs() <= plain.stderr.max(conditioned.stderr));
}

#[test]
fn infinite_temperature_anticoncentration_is_binomial() {
    let g = generate_random_regular(100, 3, 1).unwrap();
    let batch = sample_unconditioned(&g, &p(0.0), 40_000, &SamplerSettings::new(Algorithm::Glauber), 8).unwrap();
    let a = anticoncentration(&batch, &g).unwrap();
    // M = 2 * Binomial(n, 1/2) - n, whose largest point mass is C(100, 50) / 2^100.
    let peak = 0.0795892373871787;
    assert!((a.sup_probability - peak).abs() < 0.006, "{}", a.sup_probability);
    assert_eq!(a.independent_set_size, greedy_independent_set(&g).len());
    assert!(!a.degenerate);
}

#[test]
fn exact_anticoncentration_on_k4() {
    let g = RegularGraph::complete_k4();
    let exact = exact_distribution(&g, &p(0.4)).unwrap();
    let sup = exact.magnetization_law().iter().map(|&(_, q)| q).fold(0.0, f64::max);
    let batch = exact_batch(&g, 0.4, 200_000, 9);
    let a = anticoncentration(&batch, &g).unwrap();
    assert!((a.sup_probability - sup).abs() < 0.005);
    assert_eq!(a.independent_set_size, 1);
}

#[test]
fn spin_average_variance_at_infinite_temperature() {
    let g = generate_random_regular(100, 3, 2).unwrap();
    let batch = exact_like_iid(&g, 20_000, 10);
    let var = local_function_variance(&batch, &g, LocalFunction::Spin).unwrap();
    assert!((var * 100.0 - 1.0).abs() < 0.05, "{var}");
    assert_eq!(local_function_variance(&batch, &g, LocalFunction::Constant(0.7)).unwrap(), 0.0);
}

/// Independent uniform spins (the beta = 0 measure) without running a chain.
fn exact_like_iid(g: &RegularGraph, samples: usize, seed: u64) -> SampleBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = (0..samples)
        .map(|_| SpinConfig::new((0..g.n()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()).unwrap())
        .collect();
    SampleBatch::new(configs, meta(g, 0.0)).unwrap()
}

#[test]
fn census_bound_on_tree_like_graph() {
    // Radius-1 balls in the Petersen graph are all stars; exact draws with M >= 0.
    let g = RegularGraph::petersen();
    assert_eq!(tree_likeness_fraction(&g, 1), 1.0);
    let batch = exact_batch(&g, 1.0, 20_000, 11);
    let delta = 0.4;
    let bound = 1.0 / (1.0 + delta / 2.0) + 2.0 / g.n() as f64;
    for c in batch.configs().iter().filter(|c| c.magnetization() >= 0) {
        assert!(f_census(c, &g, 1, delta) <= bound);
    }
}

fn random_table(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..1.0, len).prop_filter_map("nonzero mass", |v| {
        let s: f64 = v.iter().sum();
        (s > 0.0).then(|| v.iter().map(|x| x / s).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tv_is_a_metric(a in random_table(16), b in random_table(16), c in random_table(16)) {
        let ab = tv_distance(&a, &b).unwrap();
        let ba = tv_distance(&b, &a).unwrap();
        let ac = tv_distance(&a, &c).unwrap();
        let cb = tv_distance(&c, &b).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mode_a_is_bounded_by_mode_c(n in 10usize..80, seed in any::<u64>(), beta in 0.2f64..1.4, t in 1usize..=2, symmetric in any::<bool>()) {
        prop_assume!(n % 2 == 0);
        let g = generate_random_regular(n, 3, seed).unwrap();
        let batch = sample_unconditioned(&g, &p(beta), 300, &SamplerSettings::new(Algorithm::Wolff), seed ^ 1).unwrap();
        let averaging = if symmetric { Averaging::FlipSymmetric } else { Averaging::Plain };
        for reference in [mixture_marginal(&p(beta), t, t + 20).unwrap(), plus_boundary_marginal(&p(beta), t, t + 20).unwrap()] {
            let a = mode_a_statistic(&batch, &g, t, &reference, averaging).unwrap();
            let c = mode_c_statistic(&batch, &g, t, &reference, 0.1, averaging).unwrap();
            let mean_c = c.per_vertex.iter().sum::<f64>() / n as f64;
            // Non-tree balls already count as 1 in the per-vertex list.
            prop_assert!(a <= mean_c + 1e-12, "{} > {}", a, mean_c);
            prop_assert!((0.0..=1.0).contains(&c.exceed_fraction));
        }
    }
}
