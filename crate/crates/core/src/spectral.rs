//! Largest eigenvalue of weighted graphs and the deterministic spectral
//! inequalities that bound it.
//!
//! `lambda1` always means the largest signed eigenvalue, not the spectral
//! radius. Weighted stars have spectra symmetric about zero, so the iterative
//! solver works on the shifted matrix `Z + sigma I` with
//! `sigma = max_i sum_j |Z_ij|`, which is positive semidefinite and has the
//! target eigenvalue on top.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::randgraph::WeightedGraph;
use crate::rng;
use crate::variational;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest dimension accepted by the dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;

/// Lanczos vectors kept per restart cycle.
const CYCLE_LEN: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub lambda1: f64,
    pub eigvec: Option<Vec<f64>>,
    /// Matrix-vector products performed.
    pub iterations: usize,
    /// `||Z v - lambda1 v||_2` for the returned vector.
    pub residual: f64,
}

fn check_symmetric(a: &[Vec<f64>]) -> Result<usize> {
    let n = a.len();
    let mut scale = 1.0f64;
    for row in a {
        if row.len() != n {
            return domain("matrix is not square");
        }
        for v in row {
            if !v.is_finite() {
                return domain("matrix has non-finite entries");
            }
            scale = scale.max(v.abs());
        }
    }
    for i in 0..n {
        for j in 0..i {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                return domain(format!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    Ok(n)
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn dense_spectrum(a: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = check_symmetric(a)?;
    if n > DENSE_LIMIT {
        return domain(format!("dense solver limited to n <= {DENSE_LIMIT}, got {n}"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[i][j] + a[j][i]));
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    Ok(ev)
}

/// Largest eigenvalue of a symmetric matrix by dense decomposition.
pub fn lambda1_dense(a: &[Vec<f64>]) -> Result<f64> {
    Ok(dense_spectrum(a)?.last().copied().unwrap_or(0.0))
}

/// Dense oracle on a weighted graph.
pub fn lambda1_dense_graph(z: &WeightedGraph) -> Result<f64> {
    lambda1_dense(&z.to_dense())
}

/// Compressed sparse rows of the symmetric matrix.
struct Csr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn new(z: &WeightedGraph) -> Self {
        let n = z.n();
        let mut counts = vec![0usize; n + 1];
        for (i, j, _) in z.triples() {
            counts[i + 1] += 1;
            counts[j + 1] += 1;
        }
        for k in 0..n {
            counts[k + 1] += counts[k];
        }
        let mut fill = counts.clone();
        let nnz = counts[n];
        let (mut cols, mut vals) = (vec![0; nnz], vec![0.0; nnz]);
        for (i, j, w) in z.triples() {
            cols[fill[i]] = j;
            vals[fill[i]] = w;
            fill[i] += 1;
            cols[fill[j]] = i;
            vals[fill[j]] = w;
            fill[j] += 1;
        }
        Self {
            offsets: counts,
            cols,
            vals,
        }
    }

    fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `out = (Z + shift I) x`
    fn apply(&self, x: &[f64], shift: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = shift * x[i];
            for k in self.offsets[i]..self.offsets[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    fn max_abs_row_sum(&self) -> f64 {
        (0..self.n())
            .map(|i| self.vals[self.offsets[i]..self.offsets[i + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Top eigenpair of the symmetric tridiagonal matrix with diagonal `a` and
/// off-diagonal `b`.
fn tridiagonal_top(a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    let k = a.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            a[i]
        } else if i + 1 == j {
            b[i]
        } else if j + 1 == i {
            b[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty tridiagonal");
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// Largest eigenvalue by explicitly restarted Lanczos on `Z + sigma I`.
///
/// Each cycle builds up to 40 fully reorthogonalized Lanczos vectors and
/// restarts from the top Ritz vector. Stops once the true residual
/// `||Z v - lambda v||` is at most `tol * max(1, |lambda|)`. Exceeding
/// `max_iter` matrix-vector products yields [`Error::NotConverged`] with the
/// best estimate.
pub fn lambda1_sparse(z: &WeightedGraph, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    if !(tol > 0.0) {
        return domain(format!("tol must be positive, got {tol}"));
    }
    let n = z.n();
    if n == 0 {
        return Ok(SpectralResult {
            lambda1: 0.0,
            eigvec: None,
            iterations: 0,
            residual: 0.0,
        });
    }
    if z.edge_count() == 0 {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        return Ok(SpectralResult {
            lambda1: 0.0,
            eigvec: Some(v),
            iterations: 0,
            residual: 0.0,
        });
    }
    let csr = Csr::new(z);
    let sigma = csr.max_abs_row_sum();

    let mut start_rng = rng::root(0x1a2c_705f);
    let mut start: Vec<f64> = (0..n).map(|_| start_rng.gen::<f64>() + 0.5).collect();
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);

    let mut iterations = 0usize;
    let mut best = SpectralResult {
        lambda1: f64::NEG_INFINITY,
        eigvec: None,
        iterations: 0,
        residual: f64::INFINITY,
    };
    let mut w = vec![0.0; n];
    loop {
        let m = CYCLE_LEN.min(n);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
        let (mut alphas, mut betas) = (Vec::with_capacity(m), Vec::with_capacity(m));
        basis.push(start.clone());
        for j in 0..m {
            csr.apply(&basis[j], sigma, &mut w);
            iterations += 1;
            let a = dot(&w, &basis[j]);
            alphas.push(a);
            // full reorthogonalization, two passes
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    axpy(-c, v, &mut w);
                }
            }
            let b = norm(&w);
            if j + 1 == m || b <= 1e-13 * (sigma + a.abs()).max(1e-300) {
                break;
            }
            betas.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let (theta, coeffs) = tridiagonal_top(&alphas, &betas);
        let mut ritz = vec![0.0; n];
        for (c, v) in coeffs.iter().zip(&basis) {
            axpy(*c, v, &mut ritz);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= rn);

        csr.apply(&ritz, 0.0, &mut w);
        iterations += 1;
        let lambda = dot(&ritz, &w);
        axpy(-lambda, &ritz, &mut w);
        let residual = norm(&w);
        let _ = theta;

        if residual < best.residual || lambda > best.lambda1 && residual <= best.residual {
            best = SpectralResult {
                lambda1: lambda,
                eigvec: Some(ritz.clone()),
                iterations,
                residual,
            };
        }
        if residual <= tol * lambda.abs().max(1.0) {
            return Ok(SpectralResult {
                lambda1: lambda,
                eigvec: Some(ritz),
                iterations,
                residual,
            });
        }
        if iterations >= max_iter {
            best.iterations = iterations;
            return Err(Error::NotConverged(Box::new(best)));
        }
        start = ritz;
    }
}

/// [`lambda1_sparse`] with tolerance `1e-10` and a budget of `10 n` products
/// (at least 2000).
pub fn lambda1_sparse_default(z: &WeightedGraph) -> Result<SpectralResult> {
    lambda1_sparse(z, DEFAULT_TOL, (10 * z.n()).max(2000))
}

/// Largest eigenvalue by whichever solver fits: dense up to 300 vertices,
/// Lanczos beyond.
pub fn lambda1(z: &WeightedGraph) -> Result<f64> {
    if z.n() <= 300 {
        lambda1_dense_graph(z)
    } else {
        Ok(lambda1_sparse_default(z)?.lambda1)
    }
}

/// Largest eigenvalue of a weighted star: `sqrt(sum w_j^2)`.
pub fn star_lambda1(weights: &[f64]) -> f64 {
    let scale = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * weights.iter().map(|w| (w / scale).powi(2)).sum::<f64>().sqrt()
}

/// `max |Z_ij|`, a lower bound on `lambda1` for zero-diagonal matrices.
pub fn max_abs_entry(z: &WeightedGraph) -> f64 {
    z.weights().iter().fold(0.0, |m, w| m.max(w.abs()))
}

/// Entrywise quasinorm over ordered pairs: `(2 sum_edges |w|^p)^{1/p}`.
pub fn lp_quasinorm(z: &WeightedGraph, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return domain(format!("p must be positive, got {p}"));
    }
    let s: f64 = z.weights().iter().map(|w| w.abs().powf(p)).sum();
    Ok((2.0 * s).powf(1.0 / p))
}

/// Upper bound on `lambda1` from the entrywise `L^p` quasinorm.
///
/// For `1 < p < 2`, `phi_{p/(2(p-1))}(k)^{(p-1)/p} ||Z||_p`, valid whenever the
/// support of `Z` has no clique larger than `clique_k`. For `0 < p <= 1`,
/// `2^{-1/p} ||Z||_p` for every `Z`.
pub fn spectral_lp_bound(z: &WeightedGraph, p: f64, clique_k: usize) -> Result<f64> {
    if !(p > 0.0 && p < 2.0) {
        return domain(format!("p must lie in (0, 2), got {p}"));
    }
    let norm_p = lp_quasinorm(z, p)?;
    if p <= 1.0 {
        return Ok(2f64.powf(-1.0 / p) * norm_p);
    }
    if clique_k < 2 {
        return domain(format!("clique bound must be at least 2, got {clique_k}"));
    }
    let theta = p / (2.0 * (p - 1.0));
    let phi = variational::phi(theta, clique_k, variational::DEFAULT_TOL)?.value;
    Ok(phi.powf((p - 1.0) / p) * norm_p)
}

/// Checks `lambda1(Z) <= sum_i lambda1(part_i) + 1e-9` for parts that cover
/// the edges of `Z`.
///
/// Every part must be a subgraph of `Z` on the same vertex set with matching
/// weights, and every edge of `Z` must lie in some part.
pub fn edge_cover_bound_check(z: &WeightedGraph, parts: &[WeightedGraph]) -> Result<bool> {
    let lookup: std::collections::HashMap<(usize, usize), f64> = z.triples().map(|(i, j, w)| ((i, j), w)).collect();
    let mut covered: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for (k, part) in parts.iter().enumerate() {
        if part.n() != z.n() {
            return domain(format!("part {k} has {} vertices, expected {}", part.n(), z.n()));
        }
        for (i, j, w) in part.triples() {
            match lookup.get(&(i, j)) {
                Some(&zw) if zw == w => {
                    covered.insert((i, j));
                }
                Some(_) => return domain(format!("part {k} reweights edge ({i}, {j})")),
                None => return domain(format!("part {k} has edge ({i}, {j}) not in the graph")),
            }
        }
    }
    if covered.len() != lookup.len() {
        return domain(format!(
            "parts cover {} of {} edges",
            covered.len(),
            lookup.len()
        ));
    }
    let whole = lambda1(z)?;
    let mut sum = 0.0;
    for part in parts {
        sum += lambda1(part)?;
    }
    Ok(whole <= sum + 1e-9)
}
