//! The twelve acceptance criteria, run in order with one PASS/FAIL line each.
//! A criterion fails on a wrong result or on overrunning its time limit.
//! Failures are reported on stdout; with `SPECLDP_ACCEPTANCE_STRICT=1` they
//! also make the process exit nonzero.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use specldp::distributions::{alpha_power_sum_bound, binomial_tail_sandwich, sum_sq_tail_sandwich, TailSide, WeibullSpec};
use specldp::experiments::{self, ExperimentConfig, ExperimentKind, ExperimentReport};
use specldp::planting::{embed, equality_network, plant_clique, plant_star};
use specldp::randgraph::{attach_weights, sample_er, WeightedGraph};
use specldp::spectral::{lambda1_dense_graph, lambda1_sparse_default, star_lambda1};
use specldp::variational::{self as var, Plateau, DEFAULT_TOL};
use specldp::{cli, rng, Scale};

type Outcome = (bool, String);

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "Motzkin-Straus closed forms", limit: secs(1), run: c01 },
        Criterion { id: 2, name: "phi solver vs brute-force oracle", limit: secs(120), run: c02 },
        Criterion { id: 3, name: "phi structure and plateau", limit: secs(60), run: c03 },
        Criterion { id: 4, name: "rate identities", limit: secs(10), run: c04 },
        Criterion { id: 5, name: "argmin contrast", limit: secs(30), run: c05 },
        Criterion { id: 6, name: "quasinorm bound stress", limit: secs(300), run: c06 },
        Criterion { id: 7, name: "equality certification", limit: secs(60), run: c07 },
        Criterion { id: 8, name: "spectral oracle equivalence", limit: secs(120), run: c08 },
        Criterion { id: 9, name: "planted certificates", limit: secs(120), run: c09 },
        Criterion { id: 10, name: "tail bound sandwiches", limit: secs(180), run: c10 },
        Criterion { id: 11, name: "LLN bands", limit: secs(600), run: c11 },
        Criterion { id: 12, name: "determinism across thread counts", limit: secs(60), run: c12 },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let (ok, detail) = (c.run)();
        let took = start.elapsed();
        let in_time = took <= c.limit;
        let pass = ok && in_time;
        let timing = format!("{:.1}s of {}s", took.as_secs_f64(), c.limit.as_secs());
        let verdict = if pass { "PASS" } else { "FAIL" };
        let overrun = if in_time { "" } else { "; over time limit" };
        println!("{verdict} criterion {:>2} {}: {detail} ({timing}{overrun})", c.id, c.name);
        if !pass {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        if std::env::var("SPECLDP_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            ExitCode::FAILURE
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn c01() -> Outcome {
    let ms_ok = (2..=100).all(|k| var::phi_motzkin_straus(k).unwrap() == (k - 1) as f64 / k as f64);
    let mut worst = 0.0f64;
    for theta in [1.1, 1.25, 1.5, 2.0, 3.0] {
        let got = var::phi(theta, 2, DEFAULT_TOL).unwrap().value;
        worst = worst.max((got - 2f64.powf(1.0 - 2.0 * theta)).abs());
    }
    (ms_ok && worst <= 1e-9, format!("(k-1)/k exact for k <= 100: {ms_ok}; max |phi(theta,2) - 2^(1-2theta)| = {worst:.2e}"))
}

fn c02() -> Outcome {
    let grids = [0, 0, 4000, 600, 160, 70, 40];
    let mut worst = 0.0f64;
    for theta in [1.1, 1.25, 1.5, 2.0, 3.0] {
        for k in 2..=6 {
            let solver = var::phi(theta, k, DEFAULT_TOL).unwrap().value;
            let oracle = var::phi_oracle(theta, k, grids[k]).unwrap();
            worst = worst.max((solver - oracle).abs());
        }
    }
    (worst <= 1e-5, format!("max |phi - phi_oracle| = {worst:.2e} over 25 points"))
}

fn c03() -> Outcome {
    let mut monotone = true;
    let mut dominated = true;
    for theta in [1.01, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0] {
        let bound = var::phi_upper_bound(theta).unwrap();
        let profile = var::phi_profile(theta, 30, DEFAULT_TOL).unwrap();
        monotone &= profile.windows(2).all(|w| w[1].value >= w[0].value - 1e-10);
        dominated &= profile.iter().all(|s| s.value <= bound + 1e-10);
    }
    let plateau = var::phi_plateau(1.5, 30).unwrap();
    let plateau_ok = matches!(plateau, Plateau::Found { k: 2, value } if (value - 0.25).abs() <= 1e-9);
    (
        monotone && dominated && plateau_ok,
        format!("monotone to k = 30: {monotone}; below upper bound: {dominated}; plateau(1.5) = {plateau:?}"),
    )
}

fn c04() -> Outcome {
    let mut worst_psi = 0.0f64;
    for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
        for delta in [0.1, 0.5, 1.0, 5.0] {
            let got = var::psi(alpha, delta, 2).unwrap();
            worst_psi = worst_psi.max((got - ((1.0 + delta).powf(alpha) - 1.0)).abs());
        }
    }
    let mut light_ok = true;
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        for delta in [0.1, 1.0, 10.0] {
            let r = var::heavy_rate(alpha, delta, 64).unwrap();
            light_ok &= r.argmin == 2 && (r.rate - ((1.0 + delta).powf(alpha) - 1.0)).abs() <= 1e-12;
        }
    }
    let mut worst_gauss = 0.0f64;
    for delta in [0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        worst_gauss = worst_gauss.max((var::gaussian_psi_bar(delta, 2).unwrap() - delta).abs());
    }
    (
        worst_psi <= 1e-12 && light_ok && worst_gauss <= 1e-12,
        format!("psi(2) err {worst_psi:.1e} on 20 points; alpha <= 1 rate and argmin 2: {light_ok}; gaussian err {worst_gauss:.1e}"),
    )
}

fn c05() -> Outcome {
    let h2 = var::heavy_rate(1.5, 1e2, 64).unwrap().argmin;
    let h3 = var::heavy_rate(1.5, 1e3, 64).unwrap().argmin;
    let g2 = var::gaussian_rate(1e2, 400).unwrap().argmin;
    let g3 = var::gaussian_rate(1e3, 400).unwrap().argmin;
    (h2 == h3 && g3 > g2, format!("heavy argmin {h2} -> {h3}; gaussian argmin {g2} -> {g3}"))
}

fn c06() -> Outcome {
    let cfg = ExperimentConfig::defaults(ExperimentKind::BoundStress);
    let both_cases = cfg.p_grid.iter().any(|&p| p <= 1.0) && cfg.p_grid.iter().any(|&p| p > 1.0);
    let rep = experiments::run(&cfg, 1).unwrap();
    let v = rep.check("violations").unwrap();
    let exact = rep.check("clique-exact").unwrap();
    (
        rep.records.len() == 1000 && both_cases && v.pass && exact.pass,
        format!("{} graphs, p grid {:?}; {}; {}", rep.records.len(), cfg.p_grid, v.detail, exact.detail),
    )
}

fn c07() -> Outcome {
    let mut worst_lo = f64::INFINITY;
    let mut worst_hi = f64::NEG_INFINITY;
    let mut ok = true;
    for p in [1.2, 1.5, 1.8] {
        for k in 2..=5 {
            match equality_network(p, k) {
                Ok(e) => {
                    let r = e.params["ratio"];
                    worst_lo = worst_lo.min(r);
                    worst_hi = worst_hi.max(r);
                    ok &= (1.0 - 1e-6..=1.0 + 1e-10).contains(&r);
                }
                Err(_) => ok = false,
            }
        }
    }
    (ok, format!("ratios in [{worst_lo:.12}, {worst_hi:.12}]"))
}

fn c08() -> Outcome {
    let mut cfg = ExperimentConfig::defaults(ExperimentKind::BoundStress);
    cfg.trials = 500;
    cfg.seed = 8;
    let pairs = cli::oracle_equivalence(&cfg, 1).unwrap();
    let worst = pairs
        .iter()
        .map(|&(d, s)| (d - s).abs() / d.abs().max(1e-300))
        .filter(|e| e.is_finite())
        .fold(0.0, f64::max);
    let degenerate = pairs.iter().filter(|&&(d, s)| d == 0.0 && s != 0.0).count();
    let mut star_worst = 0.0f64;
    let mut stream = rng::root(88);
    for deg in 1..=60 {
        let spec = WeibullSpec::canonical(1.0 + deg as f64 / 20.0).unwrap();
        let w: Vec<f64> = (0..deg).map(|_| specldp::distributions::sample(&spec, &mut stream).unwrap()).collect();
        let z = WeightedGraph::from_triples(deg + 1, w.iter().enumerate().map(|(i, &x)| (0, i + 1, x))).unwrap();
        let formula = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dense = lambda1_dense_graph(&z).unwrap();
        star_worst = star_worst.max((star_lambda1(&w) - formula).abs() / formula).max((dense - formula).abs() / formula);
    }
    (
        pairs.len() == 500 && worst <= 1e-8 && degenerate == 0 && star_worst <= 1e-12,
        format!("{} instances, worst relative gap {worst:.2e}; star formula worst {star_worst:.2e}", pairs.len()),
    )
}

fn ambient(n: usize, alpha: f64, seed: u64) -> WeightedGraph {
    let mut stream = rng::substream(seed, 0);
    let g = sample_er(n, 2.0, &mut stream).unwrap();
    attach_weights(&g, &WeibullSpec::canonical(alpha).unwrap(), &mut stream).unwrap()
}

fn c09() -> Outcome {
    let scale = Scale::from_n(1e4).unwrap();
    let star = plant_star(4.0, 0.5, scale).unwrap();
    let star_target = 1.5 * var::typical_light(4.0, scale).unwrap();
    let mut star_hits = 0;
    for seed in 0..20 {
        let z = ambient(10_000, 4.0, 900 + seed);
        let e = embed(&z, &star, &mut rng::substream(900 + seed, 1)).unwrap();
        if lambda1_sparse_default(&e.graph).unwrap().lambda1 >= star_target {
            star_hits += 1;
        }
    }
    let clique_target = 1.5 * scale.log_n().powf(2.0 / 3.0);
    let mut clique_hits = [0; 2];
    for (slot, k) in [2usize, 3].into_iter().enumerate() {
        let clique = plant_clique(1.5, 0.5, scale, k).unwrap();
        for seed in 0..20 {
            let z = ambient(10_000, 1.5, 950 + seed);
            let e = embed(&z, &clique, &mut rng::substream(950 + seed, k as u64)).unwrap();
            if lambda1_sparse_default(&e.graph).unwrap().lambda1 >= clique_target {
                clique_hits[slot] += 1;
            }
        }
    }
    (
        star_hits == 20 && clique_hits == [20, 20],
        format!("star {star_hits}/20 >= {star_target:.4}; clique k=2 {}/20, k=3 {}/20 >= {clique_target:.4}", clique_hits[0], clique_hits[1]),
    )
}

fn c10() -> Outcome {
    const Z: f64 = 4.0;
    let mut stream = rng::root(1010);
    let mut sum_sq_ok = 0;
    for &(alpha, k, t) in &common::sum_sq_sets() {
        let (lower, upper) = sum_sq_tail_sandwich(k, t, &WeibullSpec::canonical(alpha).unwrap()).unwrap();
        let (p, se) = common::estimate(400_000, &mut stream, |r| {
            (0..k).map(|_| common::weibull(alpha, r).powi(2)).sum::<f64>() >= t
        });
        if lower <= p + Z * se && p - Z * se <= upper {
            sum_sq_ok += 1;
        }
    }
    let mut binom_ok = 0;
    for &(m, q, theta) in &common::binomial_sets() {
        let s = binomial_tail_sandwich(m, q, theta).unwrap();
        let exact = common::binomial_tail(m, q, (theta * m as f64).round() as u64, s.side == TailSide::Upper);
        if s.lower <= exact * (1.0 + 1e-12) && exact <= s.upper * (1.0 + 1e-12) {
            binom_ok += 1;
        }
    }
    let mut power_ok = 0;
    for &(m, l, alpha, eps, n) in &common::alpha_power_sets() {
        let scale = Scale::from_n(n).unwrap();
        let bound = alpha_power_sum_bound(m, l, &WeibullSpec::canonical(alpha).unwrap(), eps, scale).unwrap();
        let thr = (eps * scale.log_log_n()).powf(1.0 / alpha);
        let (p, se) = common::estimate(400_000, &mut stream, |r| {
            (0..m).map(|_| common::weibull_above(alpha, thr, r).abs().powf(alpha)).sum::<f64>() >= l
        });
        if p - Z * se <= bound {
            power_ok += 1;
        }
    }
    (
        sum_sq_ok == 20 && binom_ok == 20 && power_ok == 10,
        format!("sum-of-squares {sum_sq_ok}/20 (MC, 4 se); binomial {binom_ok}/20 (exact CDF); alpha-power {power_ok}/10 (MC)"),
    )
}

fn check_detail(rep: &ExperimentReport, name: &str) -> (bool, String) {
    rep.check(name).map_or((false, format!("missing check {name}")), |c| (c.pass, c.detail.clone()))
}

fn c11() -> Outcome {
    let heavy = experiments::run(&ExperimentConfig::defaults(ExperimentKind::LlnHeavy), 1).unwrap();
    let light = experiments::run(&ExperimentConfig::defaults(ExperimentKind::LlnLight), 1).unwrap();
    let (h_ok, h) = check_detail(&heavy, "band");
    let (b_ok, b) = check_detail(&light, "band");
    let (t_ok, t) = check_detail(&light, "trend");
    (h_ok && b_ok && t_ok, format!("heavy band [{h_ok}] {h}; light band [{b_ok}] {b}; light trend [{t_ok}] {t}"))
}

fn c12() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_specldp");
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let conf = dir.join("acceptance_determinism.conf");
    std::fs::write(&conf, "kind = bound-stress\ntrials = 200\nseed = 12\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["lln", "--alpha", "4", "--n", "3000", "--trials", "8", "--seed", "12"],
        vec!["lln", "--alpha", "1", "--n", "3000", "--trials", "8", "--seed", "12", "--format", "csv"],
        vec!["lln", "--kind", "degree", "--n", "5000", "--trials", "8", "--seed", "12"],
        vec!["decomp", "--n", "5000", "--trials", "6", "--seed", "12"],
        vec!["verify", "--suite", "spectral", "--trials", "50", "--seed", "12"],
        vec!["report", "--config", conf.to_str().unwrap()],
    ];
    let mut identical = 0;
    for args in &runs {
        let outs: Vec<Vec<u8>> = ["1", "3"]
            .iter()
            .map(|t| Command::new(bin).args(args).args(["--threads", t]).env_remove("SPECLDP_SEED").output().unwrap().stdout)
            .collect();
        if !outs[0].is_empty() && outs[0] == outs[1] {
            identical += 1;
        }
    }
    (identical == runs.len(), format!("{identical}/{} experiment reports byte-identical at 1 vs 3 threads", runs.len()))
}
