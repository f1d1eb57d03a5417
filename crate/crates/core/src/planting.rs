//! Deterministic weighted structures that push `lambda1` to a prescribed
//! level: equality cases of the `L^p` bound, weighted cliques for heavy
//! tails, and uniform stars for light tails.
//!
//! Every constructor certifies its structure with the dense eigensolver
//! before returning it.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::randgraph::{self, WeightedGraph};
use crate::scale::Scale;
use crate::spectral;
use crate::variational::{self, DEFAULT_TOL};

/// Relative headroom on planted weights so that rounding never drops
/// `lambda1` below its target.
pub const MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Star,
    Clique,
    BlockMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedStructure {
    pub kind: Kind,
    /// Number of vertex slots the structure occupies.
    pub vertices: usize,
    /// Weights on local vertices `0..vertices`.
    pub weights: WeightedGraph,
    pub target_lambda1: f64,
    /// `lambda1` measured by the dense solver at construction.
    pub certified_lambda1: f64,
    pub params: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    kind: Kind,
    vertices: usize,
    target_lambda1: f64,
    certified_lambda1: f64,
    params: &'a BTreeMap<String, f64>,
}

impl PlantedStructure {
    /// Scales every weight, the target and the certificate by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return domain(format!("scale must be positive, got {c}"));
        }
        Ok(Self {
            weights: self.weights.scaled(c),
            target_lambda1: c * self.target_lambda1,
            certified_lambda1: c * self.certified_lambda1,
            ..self.clone()
        })
    }

    /// Edge list of the local weights.
    pub fn edge_list(&self) -> String {
        randgraph::write_weighted(&self.weights)
    }

    /// JSON sidecar with kind, target and parameters.
    pub fn sidecar_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Sidecar {
            kind: self.kind,
            vertices: self.vertices,
            target_lambda1: self.target_lambda1,
            certified_lambda1: self.certified_lambda1,
            params: &self.params,
        })?)
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Block matrix attaining `lambda1(A) = phi^{(p-1)/p} ||A||_p` on a
/// `k`-clique, `1 < p < 2`.
///
/// Takes the maximizer `f` of `phi_{q/2}(k)` with `q = p/(p-1)` and sets
/// `a_ij = (f_i f_j)^{q/(2p)}`. Fails with [`Error::Certification`] unless
/// `lambda1(A)` over the bound lies in `[1 - 1e-6, 1 + 1e-10]`.
pub fn equality_network(p: f64, k: usize) -> Result<PlantedStructure> {
    if !(p > 1.0 && p < 2.0) {
        return domain(format!("p must lie in (1, 2), got {p}"));
    }
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    if k > spectral::DENSE_LIMIT {
        return Err(Error::Budget(format!("k = {k} exceeds the dense certification limit")));
    }
    let q = p / (p - 1.0);
    let sol = variational::phi(q / 2.0, k, DEFAULT_TOL)?;
    let f = sol.vector();
    let expo = q / (2.0 * p);
    let mut triples = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if f[i] > 0.0 && f[j] > 0.0 {
                triples.push((i, j, (f[i] * f[j]).powf(expo)));
            }
        }
    }
    let a = WeightedGraph::from_triples(k, triples)?;
    let lambda = spectral::lambda1_dense_graph(&a)?;
    let bound = spectral::spectral_lp_bound(&a, p, k)?;
    let ratio = lambda / bound;
    if !(1.0 - 1e-6..=1.0 + 1e-10).contains(&ratio) {
        return Err(Error::Certification { ratio });
    }
    Ok(PlantedStructure {
        kind: Kind::BlockMatrix,
        vertices: k,
        weights: a,
        target_lambda1: lambda,
        certified_lambda1: lambda,
        params: params(&[
            ("p", p),
            ("k", k as f64),
            ("k1", sol.k1 as f64),
            ("k2", sol.k2 as f64),
            ("x", sol.x),
            ("y", sol.y),
            ("phi", sol.value),
            ("bound", bound),
            ("ratio", ratio),
        ]),
    })
}

/// `sum_{i != j} |w_ij|^alpha / (2 log n)`, the exponent of the probability of
/// a planted weight pattern.
pub fn planting_cost(weights: &WeightedGraph, alpha: f64, scale: Scale) -> f64 {
    let s: f64 = weights.weights().iter().map(|w| w.abs().powf(alpha)).sum();
    s / scale.log_n()
}

/// Weighted `k`-clique with `lambda1 >= (1+delta)(log n)^{1/alpha}`.
///
/// For `1 < alpha < 2` the weights are the equality block matrix for
/// `p = alpha`, rescaled to the target. For `alpha <= 1` only `k = 2` is
/// allowed and the structure is a single edge.
pub fn plant_clique(alpha: f64, delta: f64, scale: Scale, k: usize) -> Result<PlantedStructure> {
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    let heavy = variational::typical_heavy(alpha, scale)?;
    let target = (1.0 + delta) * heavy;
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    if k > spectral::DENSE_LIMIT {
        return Err(Error::Budget(format!("k = {k} exceeds the dense certification limit")));
    }
    let (weights, predicted_cost) = if alpha <= 1.0 {
        if k != 2 {
            return domain(format!("alpha <= 1 plants a single edge, got k = {k}"));
        }
        let w = WeightedGraph::from_triples(2, [(0, 1, target * (1.0 + MARGIN))])?;
        (w, (1.0 + delta).powf(alpha))
    } else {
        let a = equality_network(alpha, k)?;
        let factor = target / a.certified_lambda1 * (1.0 + MARGIN);
        let phi = a.params["phi"];
        let cost = 0.5 * (1.0 + delta).powf(alpha) * phi.powf(1.0 - alpha);
        (a.weights.scaled(factor), cost)
    };
    let lambda = spectral::lambda1_dense_graph(&weights)?;
    if lambda < target {
        return Err(Error::Certification { ratio: lambda / target });
    }
    let measured_cost = planting_cost(&weights, alpha, scale);
    Ok(PlantedStructure {
        kind: Kind::Clique,
        vertices: k,
        weights,
        target_lambda1: target,
        certified_lambda1: lambda,
        params: params(&[
            ("alpha", alpha),
            ("delta", delta),
            ("log_n", scale.log_n()),
            ("k", k as f64),
            ("cost", predicted_cost),
            ("measured_cost", measured_cost),
        ]),
    })
}

/// Star of degree `g((1+delta)^2 (1 - 2/alpha))` with uniform weights and
/// `lambda1 >= (1+delta) lambda_light`, `alpha > 2`.
pub fn plant_star(alpha: f64, delta: f64, scale: Scale) -> Result<PlantedStructure> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return domain(format!("delta must be nonnegative, got {delta}"));
    }
    let light = variational::typical_light(alpha, scale)?;
    let target = (1.0 + delta) * light;
    let gamma = (1.0 + delta).powi(2) * (1.0 - 2.0 / alpha);
    let deg = randgraph::g_of_gamma(gamma, scale)?;
    if deg == 0 {
        return domain("star degree g(gamma) is zero");
    }
    let w = (target * target / deg as f64).sqrt() * (1.0 + MARGIN);
    let weights = WeightedGraph::from_triples(deg + 1, (1..=deg).map(|j| (0, j, w)))?;
    let lambda = spectral::star_lambda1(&vec![w; deg]);
    if lambda < target {
        return Err(Error::Certification { ratio: lambda / target });
    }
    if deg < spectral::DENSE_LIMIT {
        let dense = spectral::lambda1_dense_graph(&weights)?;
        if (dense - lambda).abs() > 1e-9 * lambda.max(1.0) {
            return Err(Error::Certification { ratio: dense / target });
        }
    }
    Ok(PlantedStructure {
        kind: Kind::Star,
        vertices: deg + 1,
        weights,
        target_lambda1: target,
        certified_lambda1: lambda,
        params: params(&[
            ("alpha", alpha),
            ("delta", delta),
            ("log_n", scale.log_n()),
            ("gamma", gamma),
            ("degree", deg as f64),
            ("weight", w),
        ]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub graph: WeightedGraph,
    /// `slots[i]` is the ambient vertex hosting local vertex `i`.
    pub slots: Vec<usize>,
    /// Ambient edges inside the slots that were overwritten or removed.
    pub collisions: usize,
}

/// Places `s` on uniformly random distinct vertices of `g`.
///
/// Every ambient edge with both ends among the chosen vertices is replaced, so
/// the restriction of the output to those vertices is exactly the planted
/// matrix and `lambda1(output) >= s.certified_lambda1`.
pub fn embed<R: Rng + ?Sized>(g: &WeightedGraph, s: &PlantedStructure, rng: &mut R) -> Result<Embedding> {
    let n = g.n();
    if s.vertices > n {
        return domain(format!("structure needs {} vertices, graph has {n}", s.vertices));
    }
    let slots: Vec<usize> = index::sample(rng, n, s.vertices).into_vec();
    let chosen: HashSet<usize> = slots.iter().copied().collect();
    let mut collisions = 0;
    let mut triples: Vec<(usize, usize, f64)> = Vec::with_capacity(g.edge_count() + s.weights.edge_count());
    for (i, j, w) in g.triples() {
        if chosen.contains(&i) && chosen.contains(&j) {
            collisions += 1;
        } else {
            triples.push((i, j, w));
        }
    }
    triples.extend(s.weights.triples().map(|(i, j, w)| (slots[i], slots[j], w)));
    Ok(Embedding {
        graph: WeightedGraph::from_triples(n, triples)?,
        slots,
        collisions,
    })
}
