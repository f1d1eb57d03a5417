//! Command-line front end.
//!
//! Every JSON output is an envelope
//! `{"schema_version", "command", "config", "result"}` where `config` echoes
//! every resolved setting, defaults included. The worker count is left out of
//! the echo because it never changes results.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::WeibullSpec;
use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentConfig, ExperimentKind, ExperimentReport};
use crate::planting::{self, PlantedStructure};
use crate::randgraph::{self, WeightedGraph};
use crate::rng;
use crate::scale::Scale;
use crate::spectral;
use crate::variational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

pub const SEED_ENV: &str = "SPECLDP_SEED";

#[derive(Debug, Parser)]
#[command(name = "specldp", version, about = "Spectral large deviations laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the clique variational problem phi_theta(k).
    Phi(Flags),
    /// Evaluate a rate function (light, heavy or gaussian).
    Rate(Flags),
    /// Typical largest eigenvalue at size n.
    Typical(Flags),
    /// Build a certified planted structure.
    Plant(Flags),
    /// Sample a weighted sparse random graph as an edge list.
    Sample(Flags),
    /// Check spectral inequalities on a graph file or a random suite.
    Verify(Flags),
    /// Law-of-large-numbers experiment.
    Lln(Flags),
    /// Star decomposition stress experiment.
    Decomp(Flags),
    /// Run any experiment described by a config file.
    Report(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Graph size; accepts forms like 1e5.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    /// Input edge list.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// verify: lp-bound, spectral or equality.
    #[arg(long)]
    suite: Option<String>,
    /// plant: star, clique or block; lln: light, heavy or degree; report: experiment kind.
    #[arg(long)]
    kind: Option<String>,
    /// rate: light, heavy or gaussian.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
}

/// Settings from the config file overlaid with flags. Every lookup is
/// recorded so the resolved configuration can be echoed.
struct Settings {
    raw: BTreeMap<String, String>,
    used: BTreeMap<String, Value>,
}

fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", no + 1)))?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", no + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn parse_count(s: &str) -> Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| Error::Parse(format!("not a count: {s:?}")))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(Error::Parse(format!("not a count: {s:?}")))
    }
}

fn parse_list<T>(s: &str, each: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(|x| each(x.trim())).collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

impl Settings {
    fn new(flags: &Flags) -> Result<Self> {
        let mut raw = match &flags.config {
            Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        if !raw.contains_key("seed") && flags.seed.is_none() {
            if let Ok(s) = std::env::var(SEED_ENV) {
                raw.insert("seed".into(), s);
            }
        }
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                raw.insert(k.to_string(), v);
            }
        };
        put("alpha", flags.alpha.map(|v| v.to_string()));
        put("delta", flags.delta.map(|v| v.to_string()));
        put("theta", flags.theta.map(|v| v.to_string()));
        put("k", flags.k.map(|v| v.to_string()));
        put("n", flags.n.clone());
        put("d", flags.d.map(|v| v.to_string()));
        put("trials", flags.trials.map(|v| v.to_string()));
        put("seed", flags.seed.map(|v| v.to_string()));
        put("threads", flags.threads.map(|v| v.to_string()));
        put("tol", flags.tol.map(|v| v.to_string()));
        put("suite", flags.suite.clone());
        put("kind", flags.kind.clone());
        put("family", flags.family.clone());
        put("p", flags.p.map(|v| v.to_string()));
        put("epsilon", flags.epsilon.map(|v| v.to_string()));
        put("format", flags.format.map(|f| format!("{f:?}").to_lowercase()));
        put("out", flags.out.as_ref().map(|p| p.display().to_string()));
        put("in", flags.input.as_ref().map(|p| p.display().to_string()));
        Ok(Settings {
            raw,
            used: BTreeMap::new(),
        })
    }

    fn has(&self, key: &str) -> bool {
        self.raw.contains_key(key)
    }

    fn record(&mut self, key: &str, v: Value) {
        self.used.insert(key.to_string(), v);
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = match self.raw.get(key) {
            Some(s) => parse_f64(s)?,
            None => default,
        };
        self.record(key, json!(v));
        Ok(v)
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        let v = self.raw.get(key).map(|s| parse_f64(s)).transpose()?;
        self.record(key, json!(v));
        Ok(v)
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64> {
        let v = match self.raw.get(key) {
            Some(s) => parse_count(s)?,
            None => default,
        };
        self.record(key, json!(v));
        Ok(v)
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    fn str_or(&mut self, key: &str, default: &str) -> String {
        let v = self.raw.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.record(key, json!(v));
        v
    }

    fn opt_str(&mut self, key: &str) -> Option<String> {
        let v = self.raw.get(key).cloned();
        self.record(key, json!(v));
        v
    }

    fn f64_list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = match self.raw.get(key) {
            Some(s) => parse_list(s, parse_f64)?,
            None => default.to_vec(),
        };
        self.record(key, json!(v));
        Ok(v)
    }

    /// Seed from flag or config, then the environment, then 1.
    fn seed(&mut self) -> Result<u64> {
        self.u64_or("seed", 1)
    }

    /// Worker count; deliberately not echoed.
    fn threads(&self) -> Result<usize> {
        match self.raw.get("threads") {
            Some(s) => {
                let t = parse_count(s)? as usize;
                if t == 0 {
                    return Err(Error::Domain("threads must be at least 1".into()));
                }
                Ok(t)
            }
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    fn format(&mut self) -> Result<Format> {
        match self.str_or("format", "json").as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }

    fn unused(&self) -> Vec<&str> {
        self.raw
            .keys()
            .filter(|k| !self.used.contains_key(*k) && !matches!(k.as_str(), "threads" | "out" | "format" | "in"))
            .map(String::as_str)
            .collect()
    }
}

/// What a subcommand produced.
struct Outcome {
    result: Value,
    /// Per-trial CSV, for experiment reports.
    csv: Option<String>,
    /// Whether verification checks passed.
    passed: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            result,
            csv: None,
            passed: true,
        }
    }

    fn report(rep: &ExperimentReport) -> Result<Self> {
        Ok(Outcome {
            result: serde_json::to_value(rep)?,
            csv: Some(rep.to_csv()?),
            passed: rep.passed(),
        })
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: &'a str,
    command: &'a str,
    config: &'a BTreeMap<String, Value>,
    result: &'a Value,
}

fn scale_for(s: &mut Settings, default_n: u64) -> Result<(u64, Scale)> {
    let n = s.u64_or("n", default_n)?;
    Ok((n, Scale::from_n(n as f64)?))
}

fn cmd_phi(s: &mut Settings) -> Result<Outcome> {
    let theta = s.f64_or("theta", 1.5)?;
    let k = s.usize_or("k", 2)?;
    let tol = s.f64_or("tol", variational::DEFAULT_TOL)?;
    if theta == 1.0 {
        let value = variational::phi_motzkin_straus(k)?;
        return Ok(Outcome::ok(json!({ "theta": theta, "k": k, "value": value })));
    }
    let sol = variational::phi(theta, k, tol)?;
    let mut v = serde_json::to_value(sol)?;
    v["closed_form"] = json!(variational::phi_closed_form(theta, k)?);
    v["upper_bound"] = json!(variational::phi_upper_bound(theta)?);
    Ok(Outcome::ok(v))
}

fn cmd_rate(s: &mut Settings) -> Result<Outcome> {
    let delta = s.f64_or("delta", 1.0)?;
    let family = match s.raw.get("family").cloned() {
        Some(f) => f,
        None => {
            let alpha = s.raw.get("alpha").map(|a| parse_f64(a)).transpose()?;
            match alpha {
                Some(a) if a > 2.0 => "light".into(),
                Some(_) => "heavy".into(),
                None => return Err(Error::Domain("rate needs --alpha or --family gaussian".into())),
            }
        }
    };
    s.record("family", json!(family));
    match family.as_str() {
        "light" => {
            let alpha = s.f64_or("alpha", 4.0)?;
            if !(alpha > 2.0) {
                return Err(Error::Domain(format!("light rates need alpha > 2, got {alpha}")));
            }
            let (upper, lower) = variational::light_rates(delta)?;
            Ok(Outcome::ok(json!({ "family": "light", "upper": upper, "lower": lower })))
        }
        "heavy" => {
            let alpha = s.f64_or("alpha", 1.5)?;
            let k_max = s.usize_or("k", variational::DEFAULT_K_MAX)?;
            let r = variational::heavy_rate(alpha, delta, k_max)?;
            Ok(Outcome::ok(json!({ "family": "heavy", "rate": r.rate, "argmin_k": r.argmin, "ties": r.ties })))
        }
        "gaussian" => {
            let k_max = s.usize_or("k", 200)?;
            let r = variational::gaussian_rate(delta, k_max)?;
            Ok(Outcome::ok(json!({ "family": "gaussian", "rate": r.rate, "argmin_k": r.argmin, "ties": r.ties })))
        }
        other => Err(Error::Parse(format!("unknown rate family {other:?}"))),
    }
}

fn cmd_typical(s: &mut Settings) -> Result<Outcome> {
    let alpha = s.f64_or("alpha", 4.0)?;
    let (n, scale) = scale_for(s, 1_000_000)?;
    let base = json!({ "alpha": alpha, "n": n, "log_n": scale.log_n(), "t_n": scale.t_n() });
    let mut v = base;
    if alpha > 2.0 {
        v["regime"] = json!("light");
        v["b_alpha"] = json!(variational::b_alpha(alpha)?);
        v["typical"] = json!(variational::typical_light(alpha, scale)?);
    } else {
        v["regime"] = json!("heavy");
        v["typical"] = json!(variational::typical_heavy(alpha, scale)?);
    }
    Ok(Outcome::ok(v))
}

fn structure_value(p: &PlantedStructure) -> Result<Value> {
    let mut v = serde_json::to_value(p)?;
    v["edges"] = json!(p.weights.triples().map(|(i, j, w)| json!([i, j, w])).collect::<Vec<_>>());
    v.as_object_mut().expect("object").remove("weights");
    Ok(v)
}

fn cmd_plant(s: &mut Settings, out: Option<&Path>) -> Result<Outcome> {
    let alpha = s.f64_or("alpha", 4.0)?;
    let default_kind = if alpha > 2.0 { "star" } else { "clique" };
    let kind = s.str_or("kind", default_kind);
    let planted = match kind.as_str() {
        "star" => {
            let delta = s.f64_or("delta", 0.5)?;
            let (_, scale) = scale_for(s, 10_000)?;
            planting::plant_star(alpha, delta, scale)?
        }
        "clique" => {
            let delta = s.f64_or("delta", 0.5)?;
            let (_, scale) = scale_for(s, 10_000)?;
            let k = s.usize_or("k", 2)?;
            planting::plant_clique(alpha, delta, scale, k)?
        }
        "block" => {
            let p = s.f64_or("p", 1.5)?;
            let k = s.usize_or("k", 3)?;
            planting::equality_network(p, k)?
        }
        other => return Err(Error::Parse(format!("unknown structure kind {other:?}"))),
    };
    if let Some(path) = out {
        std::fs::write(path, planted.edge_list())?;
        let mut side = path.as_os_str().to_owned();
        side.push(".json");
        std::fs::write(PathBuf::from(side), planted.sidecar_json()?)?;
    }
    Ok(Outcome::ok(structure_value(&planted)?))
}

fn graph_summary(z: &WeightedGraph) -> Value {
    json!({
        "n": z.n(),
        "edge_count": z.edge_count(),
        "max_degree": z.graph().max_degree(),
        "max_abs_weight": spectral::max_abs_entry(z),
    })
}

fn cmd_sample(s: &mut Settings, out: Option<&Path>) -> Result<(Outcome, Option<String>)> {
    let (n, _) = scale_for(s, 1000)?;
    let d = s.f64_or("d", 2.0)?;
    let alpha = s.f64_or("alpha", 4.0)?;
    let seed = s.seed()?;
    let mut stream = rng::root(seed);
    let g = randgraph::sample_er(n as usize, d, &mut stream)?;
    let z = randgraph::attach_weights(&g, &WeibullSpec::canonical(alpha)?, &mut stream)?;
    let text = randgraph::write_weighted(&z);
    match out {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok((Outcome::ok(graph_summary(&z)), None))
        }
        None => Ok((Outcome::ok(Value::Null), Some(text))),
    }
}

fn verify_graph(z: &WeightedGraph, s: &mut Settings) -> Result<Outcome> {
    let p_grid = s.f64_list_or("p_grid", &[0.5, 0.8, 1.0, 1.2, 1.5, 1.8])?;
    let tol = s.f64_or("tol", spectral::DEFAULT_TOL)?;
    let clique = randgraph::max_clique(z.graph(), randgraph::CLIQUE_BUDGET);
    let lambda = if z.n() <= 300 {
        spectral::lambda1_dense_graph(z)?
    } else {
        spectral::lambda1_sparse(z, tol, (50 * z.n()).max(2000))?.lambda1
    };
    let mut checks = Vec::new();
    let mut passed = true;
    if z.edge_count() > 0 {
        for &p in &p_grid {
            let clique_k = if clique.exact { clique.size } else { z.n() };
            let bound = spectral::spectral_lp_bound(z, p, clique_k.max(2))?;
            let ok = lambda <= bound + experiments::SLACK * bound.max(1.0);
            passed &= ok;
            checks.push(json!({ "rule": format!("lp-bound p={p}"), "bound": bound, "pass": ok }));
        }
    }
    let m = spectral::max_abs_entry(z);
    let ok = lambda >= m - experiments::SLACK * m.max(1.0);
    passed &= ok;
    checks.push(json!({ "rule": "max-entry", "bound": m, "pass": ok }));
    let mut v = graph_summary(z);
    v["lambda1"] = json!(lambda);
    v["max_clique"] = json!(clique.size);
    v["clique_exact"] = json!(clique.exact);
    v["checks"] = json!(checks);
    v["violations"] = json!(checks.iter().filter(|c| c["pass"] == json!(false)).count());
    Ok(Outcome {
        result: v,
        csv: None,
        passed,
    })
}

fn spectral_suite(s: &mut Settings, threads: usize) -> Result<Outcome> {
    let trials = s.usize_or("trials", 500)?;
    let seed = s.seed()?;
    let cfg = ExperimentConfig {
        trials,
        seed,
        ..ExperimentConfig::defaults(ExperimentKind::BoundStress)
    };
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let rows = oracle_equivalence(&cfg, threads)?;
    for &(dense, sparse) in &rows {
        let rel = (dense - sparse).abs() / dense.abs().max(1e-300);
        worst = worst.max(rel);
        if rel > 1e-8 {
            failures += 1;
        }
    }
    Ok(Outcome {
        result: json!({ "suite": "spectral", "instances": rows.len(), "failures": failures, "worst_relative_error": worst }),
        csv: None,
        passed: failures == 0,
    })
}

/// Dense and sparse `lambda1` on random instances of up to 120 vertices.
pub fn oracle_equivalence(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<(f64, f64)>> {
    use rand::Rng;
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut stream = rng::substream(cfg.seed, t as u64);
                let n = stream.gen_range(2..=120usize);
                let d = stream.gen_range(0.5..6.0f64).min(n as f64);
                let alpha = [0.5, 1.0, 1.5, 3.0, 4.0][t % 5];
                let g = randgraph::sample_er(n, d, &mut stream)?;
                let z = randgraph::attach_weights(&g, &WeibullSpec::canonical(alpha)?, &mut stream)?;
                let dense = spectral::lambda1_dense_graph(&z)?;
                let sparse = spectral::lambda1_sparse(&z, spectral::DEFAULT_TOL, 100_000)?.lambda1;
                Ok((dense, sparse))
            })
            .collect()
    })
}

fn equality_suite(s: &mut Settings) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut passed = true;
    for p in s.f64_list_or("p_grid", &[1.2, 1.5, 1.8])? {
        for k in 2..=5 {
            match planting::equality_network(p, k) {
                Ok(e) => rows.push(json!({ "p": p, "k": k, "ratio": e.params["ratio"], "certified": true })),
                Err(Error::Certification { ratio }) => {
                    passed = false;
                    rows.push(json!({ "p": p, "k": k, "ratio": ratio, "certified": false }));
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Outcome {
        result: json!({ "suite": "equality", "instances": rows }),
        csv: None,
        passed,
    })
}

fn cmd_verify(s: &mut Settings, threads: usize) -> Result<Outcome> {
    if let Some(path) = s.raw.get("in").cloned() {
        s.record("in", json!(path));
        let z = randgraph::parse_edge_list(&std::fs::read_to_string(&path)?)?.into_weighted();
        return verify_graph(&z, s);
    }
    let suite = s.str_or("suite", "lp-bound");
    match suite.as_str() {
        "lp-bound" => {
            let mut cfg = ExperimentConfig::defaults(ExperimentKind::BoundStress);
            cfg.trials = s.usize_or("trials", cfg.trials)?;
            cfg.seed = s.seed()?;
            cfg.p_grid = s.f64_list_or("p_grid", &cfg.p_grid)?;
            cfg.max_n = s.usize_or("max_n", cfg.max_n)?;
            cfg.n_list = vec![cfg.max_n as u64];
            Outcome::report(&experiments::run(&cfg, threads)?)
        }
        "spectral" => spectral_suite(s, threads),
        "equality" => equality_suite(s),
        other => Err(Error::Parse(format!("unknown suite {other:?}"))),
    }
}

/// Builds an experiment config of `kind` from settings over kind defaults.
fn experiment_config(s: &mut Settings, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::defaults(kind);
    c.alpha = s.f64_or("alpha", c.alpha)?;
    c.d = s.f64_or("d", c.d)?;
    c.delta = s.f64_or("delta", c.delta)?;
    c.n_list = if s.has("n_list") {
        let v = parse_list(&s.raw["n_list"], parse_count)?;
        s.record("n_list", json!(v));
        v
    } else if s.has("n") {
        vec![s.u64_or("n", 0)?]
    } else {
        s.record("n_list", json!(c.n_list));
        c.n_list
    };
    c.trials = s.usize_or("trials", c.trials)?;
    c.seed = s.seed()?;
    c.tol = s.f64_or("tol", c.tol)?;
    let band = s.f64_list_or("band", &c.band)?;
    let mech = s.f64_list_or("mechanism_band", &c.mechanism_band)?;
    if band.len() != 2 || mech.len() != 2 {
        return Err(Error::Parse("bands take two comma-separated numbers".into()));
    }
    c.band = [band[0], band[1]];
    c.mechanism_band = [mech[0], mech[1]];
    c.planted_delta = s.opt_f64("planted_delta")?;
    c.gamma_grid = s.f64_list_or("gamma_grid", &c.gamma_grid)?;
    c.p_grid = s.f64_list_or("p_grid", &c.p_grid)?;
    c.max_n = s.usize_or("max_n", c.max_n)?;
    if kind == ExperimentKind::BoundStress {
        c.n_list = vec![c.max_n as u64];
    }
    c.epsilon = s.f64_or("epsilon", c.epsilon)?;
    c.decomp_gamma = s.f64_or("decomp_gamma", c.decomp_gamma)?;
    c.alpha_grid = s.f64_list_or("alpha_grid", &c.alpha_grid)?;
    c.delta_grid = s.f64_list_or("delta_grid", &c.delta_grid)?;
    c.k_max = s.usize_or("k", c.k_max)?;
    c.validate()?;
    Ok(c)
}

fn cmd_lln(s: &mut Settings, threads: usize) -> Result<Outcome> {
    let alpha = s.raw.get("alpha").map(|a| parse_f64(a)).transpose()?;
    let default_mode = match alpha {
        Some(a) if a < 2.0 => "heavy",
        _ => "light",
    };
    let kind = match s.str_or("kind", default_mode).as_str() {
        "light" => ExperimentKind::LlnLight,
        "heavy" => ExperimentKind::LlnHeavy,
        "degree" => ExperimentKind::DegreeLln,
        other => return Err(Error::Parse(format!("unknown lln kind {other:?}"))),
    };
    let cfg = experiment_config(s, kind)?;
    Outcome::report(&experiments::run(&cfg, threads)?)
}

fn cmd_decomp(s: &mut Settings, threads: usize) -> Result<Outcome> {
    let cfg = experiment_config(s, ExperimentKind::DecompositionStress)?;
    Outcome::report(&experiments::run(&cfg, threads)?)
}

fn cmd_report(s: &mut Settings, threads: usize) -> Result<Outcome> {
    let kind_name = s
        .opt_str("kind")
        .ok_or_else(|| Error::Domain("report needs kind= in the config file or --kind".into()))?;
    let kind = ExperimentKind::parse(&kind_name)?;
    let cfg = experiment_config(s, kind)?;
    Outcome::report(&experiments::run(&cfg, threads)?)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Parse(_) | Error::UnsupportedSampler(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        Error::Budget(_) | Error::InsufficientRange(_) | Error::NotConverged(_) => EXIT_FAILURE,
        Error::Certification { .. } => EXIT_VERIFY,
    }
}

/// Flattens scalar fields of `v` into a two-line CSV.
fn scalar_csv(v: &Value) -> String {
    let Some(obj) = v.as_object() else {
        return String::new();
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let keys: Vec<&String> = obj.keys().filter(|k| !obj[*k].is_array() && !obj[*k].is_object()).collect();
    let cell = |x: &Value| match x {
        Value::Number(n) => n.as_f64().map_or(n.to_string(), |f| {
            if n.is_f64() {
                format!("{f:.16e}")
            } else {
                n.to_string()
            }
        }),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    w.write_record(keys.iter().map(|k| k.as_str())).ok();
    w.write_record(keys.iter().map(|k| cell(&obj[*k]))).ok();
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

fn execute(command: &Command, stdout: &mut dyn Write) -> Result<i32> {
    let (name, flags) = match command {
        Command::Phi(f) => ("phi", f),
        Command::Rate(f) => ("rate", f),
        Command::Typical(f) => ("typical", f),
        Command::Plant(f) => ("plant", f),
        Command::Sample(f) => ("sample", f),
        Command::Verify(f) => ("verify", f),
        Command::Lln(f) => ("lln", f),
        Command::Decomp(f) => ("decomp", f),
        Command::Report(f) => ("report", f),
    };
    let mut s = Settings::new(flags)?;
    let threads = s.threads()?;
    let format = s.format()?;
    let out = s.raw.get("out").map(PathBuf::from);
    let mut raw_text = None;
    let outcome = match command {
        Command::Phi(_) => cmd_phi(&mut s)?,
        Command::Rate(_) => cmd_rate(&mut s)?,
        Command::Typical(_) => cmd_typical(&mut s)?,
        Command::Plant(_) => cmd_plant(&mut s, out.as_deref())?,
        Command::Sample(_) => {
            let (o, text) = cmd_sample(&mut s, out.as_deref())?;
            raw_text = text;
            o
        }
        Command::Verify(_) => cmd_verify(&mut s, threads)?,
        Command::Lln(_) => cmd_lln(&mut s, threads)?,
        Command::Decomp(_) => cmd_decomp(&mut s, threads)?,
        Command::Report(_) => cmd_report(&mut s, threads)?,
    };
    for key in s.unused() {
        eprintln!("warning: setting {key:?} is not used by {name}");
    }
    let data = if let Some(text) = raw_text {
        text
    } else {
        match format {
            Format::Json => {
                let env = Envelope {
                    schema_version: experiments::SCHEMA_VERSION,
                    command: name,
                    config: &s.used,
                    result: &outcome.result,
                };
                let mut text = serde_json::to_string_pretty(&env)?;
                text.push('\n');
                text
            }
            Format::Csv => match &outcome.csv {
                Some(c) => c.clone(),
                None => scalar_csv(&outcome.result),
            },
        }
    };
    // plant and sample already wrote their edge lists to --out
    let writes_file = !matches!(command, Command::Plant(_) | Command::Sample(_));
    match (&out, writes_file) {
        (Some(path), true) => std::fs::write(path, data)?,
        _ => stdout.write_all(data.as_bytes())?,
    }
    if !outcome.passed {
        eprintln!("verification failed");
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Data goes to `stdout` or `--out`; diagnostics to standard error.
pub fn run_with(args: &[String], stdout: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(stdout, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main_exit() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_with(&args, &mut std::io::stdout().lock())
}
