//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;

/// `ln C(m, j)` for all `j` in `0..=m`.
fn ln_binomials(m: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut acc = 0.0;
    out.push(acc);
    for j in 0..m {
        acc += ((m - j) as f64).ln() - ((j + 1) as f64).ln();
        out.push(acc);
    }
    out
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Exact `P(X >= k)` (`upper`) or `P(X <= k)` for `X ~ Binomial(m, q)`, by
/// summing the pmf in log space.
pub fn binomial_tail(m: u64, q: f64, k: u64, upper: bool) -> f64 {
    let lc = ln_binomials(m);
    let (lq, lp) = (q.ln(), (1.0 - q).ln());
    let terms: Vec<f64> = (0..=m)
        .filter(|&j| if upper { j >= k } else { j <= k })
        .map(|j| lc[j as usize] + j as f64 * lq + (m - j) as f64 * lp)
        .collect();
    log_sum_exp(&terms).exp()
}

/// Canonical Weibull draw, `P(|W| > t) = exp(-t^alpha)`, by inverting the
/// survival function.
pub fn weibull<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let mag = (-u.ln()).powf(1.0 / alpha);
    if rng.gen::<bool>() {
        mag
    } else {
        -mag
    }
}

/// Canonical Weibull conditioned on `|W| > thr`, by rejection.
pub fn weibull_above<R: Rng>(alpha: f64, thr: f64, rng: &mut R) -> f64 {
    loop {
        let w = weibull(alpha, rng);
        if w.abs() > thr {
            return w;
        }
    }
}

/// Monte Carlo estimate of `P(event)` with its standard error.
pub fn estimate<R: Rng>(samples: usize, rng: &mut R, mut event: impl FnMut(&mut R) -> bool) -> (f64, f64) {
    let hits = (0..samples).filter(|_| event(rng)).count();
    let p = hits as f64 / samples as f64;
    let floor = 1.0 / samples as f64;
    (p, (p.max(floor) * (1.0 - p).max(floor) / samples as f64).sqrt())
}

/// `P(Gamma(m, 1) >= x) = e^{-x} sum_{j < m} x^j / j!`.
pub fn gamma_upper_tail(m: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..m {
        term *= x / j as f64;
        sum += term;
    }
    (-x).exp() * sum
}

/// Largest clique by exhaustive subset enumeration (`n <= 20`).
pub fn brute_max_clique(n: usize, edges: &[(usize, usize)]) -> usize {
    assert!(n <= 20);
    let mut adj = vec![0u32; n];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let clique = (0..n).filter(|&v| mask >> v & 1 == 1).all(|v| mask & !(1 << v) & !adj[v] == 0);
        if clique {
            best = size;
        }
    }
    best
}

/// Largest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_lambda1(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::NEG_INFINITY, f64::max)
}

/// Best value of `sum_{i != j} |v_i|^theta |v_j|^theta` over random points of
/// the simplex and a fine scan of two-level vectors.
pub fn phi_random_search<R: Rng>(theta: f64, k: usize, samples: usize, rng: &mut R) -> f64 {
    let obj = |v: &[f64]| {
        let p: Vec<f64> = v.iter().map(|x| x.powf(theta)).collect();
        let s: f64 = p.iter().sum();
        s * s - p.iter().map(|x| x * x).sum::<f64>()
    };
    let mut best = 0.0f64;
    for _ in 0..samples {
        let support = rng.gen_range(2..=k);
        let mut v: Vec<f64> = (0..support).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        best = best.max(obj(&v));
    }
    for support in 2..=k {
        for heavy in 1..=support {
            let light = support - heavy;
            for step in 0..=2000 {
                let x = if light == 0 {
                    1.0 / heavy as f64
                } else {
                    step as f64 / 2000.0 / heavy as f64
                };
                let y = if light == 0 { 0.0 } else { (1.0 - heavy as f64 * x) / light as f64 };
                let mut v = vec![x; heavy];
                v.extend(std::iter::repeat(y).take(light));
                best = best.max(obj(&v));
                if light == 0 {
                    break;
                }
            }
        }
    }
    best
}

/// Binomial sandwich cases `(m, q, theta)`, all with integer `theta m`.
pub fn binomial_sets() -> Vec<(u64, f64, f64)> {
    let mut sets = Vec::new();
    for m in [20u64, 50, 100, 200, 1000] {
        for (q, theta) in [(0.1, 0.3), (0.5, 0.2), (0.3, 0.6), (0.4, 0.1)] {
            sets.push((m, q, theta));
        }
    }
    sets
}

/// Sum-of-squares cases `(alpha, k, t)`.
pub fn sum_sq_sets() -> Vec<(f64, u32, f64)> {
    let mut sets = Vec::new();
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        for (k, t) in [(2u32, 2.5), (2, 4.0), (3, 4.0), (3, 6.0), (5, 7.0)] {
            sets.push((alpha, k, t));
        }
    }
    sets
}

/// Alpha-power cases `(m, L, alpha, epsilon, n)`.
pub fn alpha_power_sets() -> Vec<(u32, f64, f64, f64, f64)> {
    vec![
        (3, 12.0, 1.0, 0.1, 1e4),
        (1, 5.0, 1.0, 0.0, 1e4),
        (2, 8.0, 0.5, 0.2, 1e5),
        (4, 15.0, 1.5, 0.1, 1e3),
        (5, 20.0, 1.0, 0.3, 1e6),
        (2, 6.0, 2.0, 0.1, 1e4),
        (3, 9.0, 3.0, 0.05, 1e4),
        (1, 3.0, 0.7, 0.5, 1e3),
        (6, 25.0, 1.2, 0.1, 1e5),
        (3, 7.0, 4.0, 0.2, 1e4),
    ]
}
