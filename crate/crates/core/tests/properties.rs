mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::Rng;
use specldp::randgraph::{self, max_clique, star_decomposition, structure_report, Graph, WeightedGraph, CLIQUE_BUDGET};
use specldp::spectral::{self, edge_cover_bound_check, lambda1_dense_graph, lambda1_sparse, star_lambda1};
use specldp::variational::{self, f_rate, f_rate_max, phi, tree_edge_bound, DEFAULT_TOL};
use specldp::rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |mask| {
            let edges = pairs.iter().zip(&mask).filter(|(_, &m)| m).map(|(&e, _)| e);
            Graph::new(n, edges).unwrap()
        })
    })
}

fn weighted_strategy(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let m = g.edge_count();
        proptest::collection::vec(-3.0f64..3.0, m).prop_map(move |w| WeightedGraph::new(g.clone(), w).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clique_matches_brute_force(g in graph_strategy(12)) {
        let got = max_clique(&g, CLIQUE_BUDGET);
        prop_assert!(got.exact);
        let want = if g.edge_count() == 0 { 1 } else { common::brute_max_clique(g.n(), g.edges()) };
        prop_assert_eq!(got.size, want);
    }

    #[test]
    fn star_decomposition_partitions_edges(g in graph_strategy(16), threshold in 1usize..4) {
        let d = star_decomposition(&g, threshold).unwrap();
        let mut seen = HashSet::new();
        for s in &d.stars {
            prop_assert!(seen.insert(s.center));
            for &l in &s.leaves {
                prop_assert!(seen.insert(l));
            }
        }
        let mut all: Vec<(usize, usize)> = d.star_edges().chain(d.remainder.edges().iter().copied()).collect();
        all.sort_unstable();
        prop_assert_eq!(&all[..], g.edges());
        prop_assert_eq!(d.success, d.remainder.max_degree() <= threshold);
    }

    #[test]
    fn d_gamma_nonincreasing_and_tree_excess(g in graph_strategy(16)) {
        prop_assume!(g.n() >= 3);
        let r = structure_report(&g, &randgraph::default_gamma_grid()).unwrap();
        for w in r.d_gamma.windows(2) {
            prop_assert!(w[1].count <= w[0].count);
        }
        let adj = g.adjacency();
        for c in &r.components {
            prop_assert_eq!(c.tree_excess == -1, !has_cycle(&adj, c.root));
        }
    }

    #[test]
    fn dense_matches_jacobi_and_sparse(z in weighted_strategy(14)) {
        let dense = lambda1_dense_graph(&z).unwrap();
        let jac = common::jacobi_lambda1(&z.to_dense());
        prop_assert!((dense - jac).abs() <= 1e-9 * dense.abs().max(1.0));
        let sparse = lambda1_sparse(&z, 1e-11, 20_000).unwrap().lambda1;
        prop_assert!((dense - sparse).abs() <= 1e-8 * dense.abs().max(1.0));
    }

    #[test]
    fn edge_cover_by_single_edges(z in weighted_strategy(10)) {
        let parts: Vec<WeightedGraph> = z
            .triples()
            .map(|(i, j, w)| WeightedGraph::from_triples(z.n(), [(i, j, w)]).unwrap())
            .collect();
        prop_assert!(edge_cover_bound_check(&z, &parts).unwrap());
        prop_assert!(edge_cover_bound_check(&z, std::slice::from_ref(&z)).unwrap());
    }

    #[test]
    fn star_formula(w in proptest::collection::vec(-5.0f64..5.0, 1..30)) {
        let z = WeightedGraph::from_triples(w.len() + 1, w.iter().enumerate().map(|(i, &x)| (0, i + 1, x))).unwrap();
        let want = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((star_lambda1(&w) - want).abs() <= 1e-12 * want.max(1.0));
        prop_assert!((lambda1_dense_graph(&z).unwrap() - want).abs() <= 1e-12 * want.max(1.0));
    }
}

fn has_cycle(adj: &[Vec<usize>], root: usize) -> bool {
    let mut parent = vec![usize::MAX; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                parent[u] = v;
                stack.push(u);
            } else if parent[v] != u {
                return true;
            }
        }
    }
    false
}

#[test]
fn tree_edge_bound_on_random_trees() {
    let mut rng = rng::root(505);
    let mut below_seam = 0;
    for _ in 0..500 {
        let n = rng.gen_range(2..=15usize);
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        let theta = 1.0 + 2.0 * rng.gen::<f64>();
        let s = 0.1 + 5.0 * rng.gen::<f64>();
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(3)).collect();
        let total: f64 = raw.iter().sum();
        let f: Vec<f64> = raw.iter().map(|x| x * s / total).collect();
        let top = f.iter().cloned().fold(0.0, f64::max);
        let xi = top + (s - top) * rng.gen::<f64>();
        if s < 2.0 * xi {
            below_seam += 1;
        }
        let lhs: f64 = edges.iter().map(|&(i, j)| f[i].powf(theta) * f[j].powf(theta)).sum();
        let bound = tree_edge_bound(theta, s, xi).unwrap();
        assert!(lhs <= bound * (1.0 + 1e-12), "n={n} theta={theta} s={s} xi={xi}: {lhs} > {bound}");
    }
    assert!(below_seam > 50 && below_seam < 450);
}

#[test]
fn tree_edge_bound_examples() {
    assert!((tree_edge_bound(1.0, 1.0, 0.5).unwrap() - 0.25).abs() < 1e-15);
    assert!((tree_edge_bound(1.0, 2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn phi_matches_random_search() {
    let mut rng = rng::root(606);
    for theta in [1.05, 1.1, 1.25, 1.5, 2.0, 3.0] {
        for k in 2..=8 {
            let solver = phi(theta, k, DEFAULT_TOL).unwrap().value;
            let search = common::phi_random_search(theta, k, 20_000, &mut rng);
            assert!(search <= solver + 1e-10, "theta={theta} k={k}: search {search} beats {solver}");
            assert!(solver - search <= 1e-5, "theta={theta} k={k}: {solver} vs {search}");
        }
    }
}

#[test]
fn phi_closed_form_agreement_and_bound() {
    for theta in [1.01, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0] {
        let bound = variational::phi_upper_bound(theta).unwrap();
        let profile = variational::phi_profile(theta, 40, DEFAULT_TOL).unwrap();
        for s in &profile {
            assert!(s.value <= bound + 1e-10);
            if let Some(c) = variational::phi_closed_form(theta, s.k).unwrap() {
                assert!((c - s.value).abs() <= 1e-8, "theta={theta} k={}", s.k);
            }
        }
        for w in profile.windows(2) {
            assert!(w[1].value >= w[0].value - 1e-10);
        }
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

#[test]
fn f_rate_max_matches_numeric_search() {
    for alpha in [2.5, 3.0, 4.0, 8.0] {
        for rho in [-0.5, 0.0, 0.3, 1.0] {
            let (gamma, max) = f_rate_max(alpha, rho).unwrap();
            let (x, v) = golden_max(|x| f_rate(alpha, rho, x).unwrap(), 1e-9, 10.0);
            assert!((x - gamma).abs() < 1e-6 && (v - max).abs() < 1e-8, "alpha={alpha} rho={rho}");
            assert!(v - f_rate(alpha, rho, gamma + 0.01).unwrap() > 0.0);
            assert!(v - f_rate(alpha, rho, gamma - 0.01).unwrap() > 0.0);
        }
    }
    let (g, m) = f_rate_max(4.0, 0.0).unwrap();
    assert!((g - 0.5).abs() < 1e-15 && m.abs() < 1e-15);
}

#[test]
fn heavy_rate_trends_to_delta_as_alpha_decreases_to_one() {
    let delta = 0.5;
    let rates: Vec<f64> = [1.3, 1.1, 1.01]
        .iter()
        .map(|&a| variational::heavy_rate(a, delta, 64).unwrap().rate)
        .collect();
    let gaps: Vec<f64> = rates.iter().map(|r| (r - delta).abs()).collect();
    assert!(gaps[0] >= gaps[1] && gaps[1] >= gaps[2]);
    assert!((variational::heavy_rate(1.0, delta, 64).unwrap().rate - delta).abs() < 1e-15);
}

#[test]
fn spectral_lp_bound_on_small_instances() {
    let mut rng = rng::root(707);
    for _ in 0..100 {
        let n = rng.gen_range(2..=10usize);
        let mut triples = Vec::new();
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < 0.5 {
                    triples.push((i, j, rng.gen_range(-2.0..2.0)));
                    edges.insert((i, j));
                }
            }
        }
        let z = WeightedGraph::from_triples(n, triples).unwrap();
        if z.edge_count() == 0 {
            continue;
        }
        let k = common::brute_max_clique(n, &edges.iter().copied().collect::<Vec<_>>()).max(2);
        let lam = common::jacobi_lambda1(&z.to_dense());
        for p in [0.3, 0.7, 1.0, 1.3, 1.7] {
            let b = spectral::spectral_lp_bound(&z, p, k).unwrap();
            assert!(lam <= b + 1e-9, "p={p}: {lam} > {b}");
        }
    }
}
