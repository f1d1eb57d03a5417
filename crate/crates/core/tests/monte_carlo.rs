use specldp::distributions::WeibullSpec;
use specldp::experiments::{self, ExperimentConfig, ExperimentKind};
use specldp::planting::{embed, plant_clique, plant_star};
use specldp::randgraph::{self, attach_weights, g_of_gamma, sample_er, split_by_threshold, star_decomposition};
use specldp::spectral::{lambda1, lambda1_sparse_default};
use specldp::variational::{conjugate, phi, psi, typical_light};
use specldp::{rng, Scale};

fn weighted(n: usize, d: f64, alpha: f64, seed: u64) -> randgraph::WeightedGraph {
    let mut r = rng::substream(seed, 0);
    let g = sample_er(n, d, &mut r).unwrap();
    attach_weights(&g, &WeibullSpec::canonical(alpha).unwrap(), &mut r).unwrap()
}

#[test]
fn subcritical_components_are_mostly_trees() {
    for seed in 0..20 {
        let mut r = rng::root(seed);
        let g = sample_er(10_000, 2.0, &mut r).unwrap();
        let rep = randgraph::structure_report(&g, &[0.0, 0.5, 1.0]).unwrap();
        let non_tree = rep.components.iter().filter(|c| c.tree_excess >= 0).count();
        let frac = non_tree as f64 / rep.components.len() as f64;
        assert!(frac <= 0.05, "seed {seed}: non-tree fraction {frac}");
    }
}

#[test]
fn star_decomposition_after_split() {
    let n = 10_000;
    let scale = Scale::from_n(n as f64).unwrap();
    // g(0.1) = 1 at every desk size: the remainder would have to be a matching.
    assert_eq!(g_of_gamma(0.1, scale).unwrap(), 1);
    let alpha = 4.0;
    let cut = (0.1 * scale.log_log_n()).powf(1.0 / alpha);
    let mut successes = 0;
    for seed in 0..20 {
        let z = weighted(n, 1.0, alpha, 100 + seed);
        let (high, low) = split_by_threshold(&z, cut);
        assert_eq!(high.edge_count() + low.edge_count(), z.edge_count());
        let d = star_decomposition(high.graph(), 4).unwrap();
        assert_eq!(d.star_edges().count() + d.remainder.edge_count(), high.edge_count());
        if d.success {
            successes += 1;
        }
    }
    assert!(successes >= 19, "{successes}/20");
}

#[test]
fn planted_star_survives_embedding() {
    let scale = Scale::from_n(1e4).unwrap();
    let s = plant_star(4.0, 0.5, scale).unwrap();
    let target = 1.5 * typical_light(4.0, scale).unwrap();
    assert!(s.certified_lambda1 >= target);
    for seed in 0..5 {
        let z = weighted(10_000, 2.0, 4.0, 200 + seed);
        let mut r = rng::substream(200 + seed, 1);
        let e = embed(&z, &s, &mut r).unwrap();
        assert!(lambda1(&e.graph).unwrap() >= target);
    }
}

#[test]
fn planted_clique_survives_embedding() {
    let scale = Scale::from_n(1e4).unwrap();
    let target = 1.5 * scale.log_n().powf(2.0 / 3.0);
    for k in [2, 3] {
        let s = plant_clique(1.5, 0.5, scale, k).unwrap();
        assert!(s.certified_lambda1 >= target);
        let z = weighted(10_000, 2.0, 1.5, 300 + k as u64);
        let e = embed(&z, &s, &mut rng::substream(300, k as u64)).unwrap();
        assert!(lambda1_sparse_default(&e.graph).unwrap().lambda1 >= target);
        // reported cost against the closed form
        let theta = conjugate(1.5) / 2.0;
        let phi_value = phi(theta, k, 1e-12).unwrap().value;
        let want = 0.5 * 1.5f64.powf(1.5) * phi_value.powf(-0.5);
        assert!((s.params["cost"] - want).abs() <= 1e-8, "k={k}: {} vs {want}", s.params["cost"]);
        let rate = psi(1.5, 0.5, k).unwrap();
        let kf = k as f64;
        assert!((rate - (kf * (kf - 3.0) / 2.0 + want)).abs() <= 1e-10);
    }
}

#[test]
fn star_weight_approaches_heuristic_value() {
    let alpha = 4.0;
    let ratios: Vec<f64> = [1e4, 1e6, 1e8]
        .iter()
        .map(|&n| {
            let scale = Scale::from_n(n).unwrap();
            let s = plant_star(alpha, 0.0, scale).unwrap();
            s.params["weight"] / (2.0 / (alpha - 2.0) * scale.log_log_n()).powf(1.0 / alpha)
        })
        .collect();
    let gaps: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    assert!(gaps[2] < gaps[0], "{ratios:?}");
    assert!(gaps[2] < 0.2, "{ratios:?}");
}

#[test]
fn rate_tabulation_checks_pass() {
    let cfg = ExperimentConfig::defaults(ExperimentKind::RateTabulate);
    let rep = experiments::run(&cfg, 1).unwrap();
    assert!(rep.passed(), "{:?}", rep.checks);
}

#[test]
fn small_bound_stress_has_no_violations() {
    let mut cfg = ExperimentConfig::defaults(ExperimentKind::BoundStress);
    cfg.trials = 100;
    let rep = experiments::run(&cfg, 2).unwrap();
    assert!(rep.check("violations").unwrap().pass);
}
