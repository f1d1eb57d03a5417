//! The clique variational problem `phi_theta(k)` and the closed-form rate
//! functions and typical values built on it.
//!
//! `phi_theta(k) = sup { sum_{i != j} |v_i|^theta |v_j|^theta : ||v||_1 = 1 }`
//! over vectors supported on `k` coordinates. For `theta > 1` a maximizer
//! takes at most two distinct nonzero values, so the solver searches over
//! block sizes `(k1, k2)` and one free coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scale::Scale;

pub const DEFAULT_TOL: f64 = 1e-12;

/// Default search range for rate minimization over clique sizes.
pub const DEFAULT_K_MAX: usize = 64;

/// Plateau detection tolerance, relative to `phi(k_max)`.
pub const PLATEAU_TOL: f64 = 1e-9;

const GRID_POINTS: usize = 200;
const GOLDEN_WIDTH: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalSolution {
    pub theta: f64,
    pub k: usize,
    pub value: f64,
    pub k1: usize,
    pub k2: usize,
    pub x: f64,
    pub y: f64,
}

impl VariationalSolution {
    /// The maximizing vector on `k` coordinates: `k1` copies of `x`, `k2`
    /// copies of `y`, zeros after.
    pub fn vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.k];
        v[..self.k1].fill(self.x);
        v[self.k1..self.k1 + self.k2].fill(self.y);
        v
    }
}

fn two_block_value(theta: f64, k1: usize, k2: usize, x: f64, y: f64) -> f64 {
    let (a, b) = (k1 as f64, k2 as f64);
    let xt = x.powf(theta);
    let yt = if y > 0.0 { y.powf(theta) } else { 0.0 };
    a * (a - 1.0) * xt * xt + b * (b - 1.0) * yt * yt + 2.0 * a * b * xt * yt
}

/// Objective of the vector `v` (nonnegative entries assumed).
pub fn objective(theta: f64, v: &[f64]) -> f64 {
    let p: Vec<f64> = v.iter().map(|x| x.abs().powf(theta)).collect();
    let s: f64 = p.iter().sum();
    let sq: f64 = p.iter().map(|x| x * x).sum();
    s * s - sq
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_WIDTH {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Best split for fixed block sizes `k1 >= 1`, `k2 >= 0`, with `x >= y`.
fn best_for_blocks(theta: f64, k1: usize, k2: usize) -> (f64, f64, f64) {
    if k2 == 0 {
        let x = 1.0 / k1 as f64;
        return (two_block_value(theta, k1, 0, x, 0.0), x, 0.0);
    }
    let (a, b) = (k1 as f64, k2 as f64);
    let lo = 1.0 / (a + b);
    let hi = 1.0 / a;
    let y_of = |x: f64| ((1.0 - a * x) / b).max(0.0);
    let g = |x: f64| two_block_value(theta, k1, k2, x, y_of(x));
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let (mut best_i, mut best_v) = (0, f64::NEG_INFINITY);
    for i in 0..GRID_POINTS {
        let v = g(lo + step * i as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut best_x = lo + step * best_i as f64;
    let left = lo + step * best_i.saturating_sub(1) as f64;
    let right = (lo + step * (best_i + 1) as f64).min(hi);
    let (gx, gv) = golden_max(g, left, right);
    if gv > best_v {
        best_v = gv;
        best_x = gx;
    }
    (best_v, best_x, y_of(best_x))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 1.0 && theta.is_finite()) {
        return domain(format!("theta must exceed 1, got {theta} (use phi_motzkin_straus for theta = 1)"));
    }
    Ok(())
}

/// `phi_theta(k)` for every `k` in `2..=k_max`, in one sweep.
///
/// A candidate replaces the incumbent only when it is better by more than
/// `tol` relative, so ties go to the smaller support.
pub fn phi_profile(theta: f64, k_max: usize, tol: f64) -> Result<Vec<VariationalSolution>> {
    check_theta(theta)?;
    if k_max < 2 {
        return domain(format!("k must be at least 2, got {k_max}"));
    }
    if !(tol >= 0.0) {
        return domain(format!("tol must be nonnegative, got {tol}"));
    }
    let mut out = Vec::with_capacity(k_max - 1);
    let mut best = VariationalSolution {
        theta,
        k: 1,
        value: 0.0,
        k1: 1,
        k2: 0,
        x: 1.0,
        y: 0.0,
    };
    for s in 2..=k_max {
        for k1 in 1..=s {
            let k2 = s - k1;
            let (value, x, y) = best_for_blocks(theta, k1, k2);
            if value > best.value * (1.0 + tol) {
                best = VariationalSolution {
                    theta,
                    k: s,
                    value,
                    k1,
                    k2,
                    x,
                    y,
                };
            }
        }
        out.push(VariationalSolution { k: s, ..best });
    }
    Ok(out)
}

/// `phi_theta(k)` by two-block search.
pub fn phi(theta: f64, k: usize, tol: f64) -> Result<VariationalSolution> {
    Ok(*phi_profile(theta, k, tol)?.last().expect("k >= 2"))
}

fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let (mut cum, mut tau) = (0.0, 0.0);
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - tau).max(0.0));
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if parts == 1 {
        prefix.push(total);
        visit(prefix);
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, visit);
        prefix.pop();
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Brute-force lower bound on `phi_theta(k)` for `k <= 6`: best point of a
/// simplex grid with `grid` subdivisions, refined by projected-gradient
/// ascent from the ten best grid points.
pub fn phi_oracle(theta: f64, k: usize, grid: usize) -> Result<f64> {
    check_theta(theta)?;
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    if k > 6 {
        return Err(Error::Budget(format!("oracle limited to k <= 6, got {k}")));
    }
    if grid == 0 {
        return domain("grid must be positive");
    }
    if binomial(grid + k - 1, k - 1) > 5e7 {
        return Err(Error::Budget(format!("grid {grid} too fine for k = {k}")));
    }
    let mut top: Vec<(f64, Vec<f64>)> = Vec::with_capacity(11);
    let mut prefix = Vec::with_capacity(k);
    compositions(grid, k, &mut prefix, &mut |c| {
        let v: Vec<f64> = c.iter().map(|&ci| ci as f64 / grid as f64).collect();
        let val = objective(theta, &v);
        if top.len() < 10 || val > top[top.len() - 1].0 {
            let pos = top.partition_point(|(t, _)| *t >= val);
            top.insert(pos, (val, v));
            top.truncate(10);
        }
    });
    let mut best = top.first().map_or(0.0, |t| t.0);
    for (start_val, start) in top {
        let (mut v, mut val) = (start, start_val);
        let mut step = 0.1;
        for _ in 0..5000 {
            let p: Vec<f64> = v.iter().map(|x| x.powf(theta)).collect();
            let s: f64 = p.iter().sum();
            let grad: Vec<f64> = v
                .iter()
                .zip(&p)
                .map(|(&x, &px)| if x > 0.0 { 2.0 * theta * x.powf(theta - 1.0) * (s - px) } else { 0.0 })
                .collect();
            let mut cand: Vec<f64> = v.iter().zip(&grad).map(|(x, g)| x + step * g).collect();
            project_simplex(&mut cand);
            let cv = objective(theta, &cand);
            if cv > val {
                v = cand;
                val = cv;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-16 {
                    break;
                }
            }
        }
        best = best.max(val);
    }
    Ok(best)
}

/// `phi_1(k) = (k - 1) / k`.
pub fn phi_motzkin_straus(k: usize) -> Result<f64> {
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    Ok((k - 1) as f64 / k as f64)
}

/// `r^{2 theta - 2} - r^{2 theta - 1}` with `r = (2 theta - 2)/(2 theta - 1)`,
/// an upper bound on `phi_theta(k)` for every `k`.
pub fn phi_upper_bound(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let r = (2.0 * theta - 2.0) / (2.0 * theta - 1.0);
    Ok(r.powf(2.0 * theta - 2.0) - r.powf(2.0 * theta - 1.0))
}

/// Closed form of `phi_theta(k)` where one is known: `k = 2`, or
/// `k <= (2 theta - 1)/(2 theta - 2)` where the uniform vector is optimal.
pub fn phi_closed_form(theta: f64, k: usize) -> Result<Option<f64>> {
    check_theta(theta)?;
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    if k == 2 {
        return Ok(Some(2f64.powf(1.0 - 2.0 * theta)));
    }
    let limit = (2.0 * theta - 1.0) / (2.0 * theta - 2.0);
    let kf = k as f64;
    if kf <= limit * (1.0 + 1e-12) {
        Ok(Some(kf.powf(2.0 - 2.0 * theta) - kf.powf(1.0 - 2.0 * theta)))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Plateau {
    Found { k: usize, value: f64 },
    NotFound { k_max: usize, value: f64 },
}

impl Plateau {
    pub fn k(&self) -> Option<usize> {
        match self {
            Plateau::Found { k, .. } => Some(*k),
            Plateau::NotFound { .. } => None,
        }
    }
}

fn plateau_of(profile: &[VariationalSolution]) -> Plateau {
    let last = profile.last().expect("nonempty profile");
    let start = profile
        .iter()
        .position(|s| last.value - s.value <= PLATEAU_TOL * last.value)
        .expect("last entry qualifies");
    if profile.len() > 1 && start == profile.len() - 1 {
        Plateau::NotFound {
            k_max: last.k,
            value: last.value,
        }
    } else {
        Plateau::Found {
            k: profile[start].k,
            value: profile[start].value,
        }
    }
}

/// Smallest `k*` such that `phi_theta` is constant (within `1e-9` relative) on
/// `k*..=k_max`. Reports not-found when `phi` is still rising at `k_max`.
pub fn phi_plateau(theta: f64, k_max: usize) -> Result<Plateau> {
    if k_max < 3 {
        return domain(format!("plateau detection needs k_max >= 3, got {k_max}"));
    }
    Ok(plateau_of(&phi_profile(theta, k_max, DEFAULT_TOL)?))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    Ok(())
}

/// Holder conjugate `alpha / (alpha - 1)`.
pub fn conjugate(alpha: f64) -> f64 {
    alpha / (alpha - 1.0)
}

fn psi_from_phi(alpha: f64, delta: f64, k: usize, phi: f64) -> f64 {
    let kf = k as f64;
    kf * (kf - 3.0) / 2.0 + 0.5 * (1.0 + delta).powf(alpha) * phi.powf(1.0 - alpha)
}

/// `psi_{alpha,delta}(k) = k(k-3)/2 + (1+delta)^alpha phi_{beta/2}(k)^{1-alpha} / 2`.
pub fn psi(alpha: f64, delta: f64, k: usize) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return domain(format!("psi needs alpha in (1, 2), got {alpha}"));
    }
    if !(delta > -1.0 && delta.is_finite()) {
        return domain(format!("delta must exceed -1, got {delta}"));
    }
    let theta = conjugate(alpha) / 2.0;
    let p = phi(theta, k, DEFAULT_TOL)?.value;
    Ok(psi_from_phi(alpha, delta, k, p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMinimum {
    pub rate: f64,
    pub argmin: usize,
    /// Other clique sizes whose value ties the minimum within `1e-12`.
    pub ties: Vec<usize>,
}

fn minimize(values: impl Iterator<Item = (usize, f64)>) -> RateMinimum {
    let values: Vec<(usize, f64)> = values.collect();
    let (argmin, rate) = values
        .iter()
        .copied()
        .fold((0, f64::INFINITY), |best, (k, v)| if v < best.1 { (k, v) } else { best });
    let ties = values
        .iter()
        .filter(|&&(k, v)| k != argmin && (v - rate).abs() <= 1e-12 * rate.abs().max(1.0))
        .map(|&(k, _)| k)
        .collect();
    RateMinimum { rate, argmin, ties }
}

/// Upper-tail rate for Weibull weights with `alpha < 2`.
///
/// `(1+delta)^alpha - 1` (attained by one edge) when `alpha <= 1`, otherwise
/// `min_k psi_{alpha,delta}(k)` over `2..=k_max`. Fails with
/// [`Error::InsufficientRange`] unless `phi_{beta/2}` has plateaued by
/// `k_max`, since only then is the restricted minimum exact.
pub fn heavy_rate(alpha: f64, delta: f64, k_max: usize) -> Result<RateMinimum> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return domain(format!("heavy rate needs alpha in (0, 2), got {alpha}"));
    }
    check_delta(delta)?;
    if alpha <= 1.0 {
        return Ok(RateMinimum {
            rate: (1.0 + delta).powf(alpha) - 1.0,
            argmin: 2,
            ties: Vec::new(),
        });
    }
    if k_max < 3 {
        return domain(format!("k_max must be at least 3, got {k_max}"));
    }
    let theta = conjugate(alpha) / 2.0;
    let profile = phi_profile(theta, k_max, DEFAULT_TOL)?;
    if let Plateau::NotFound { .. } = plateau_of(&profile) {
        return Err(Error::InsufficientRange(format!(
            "phi_{theta} still increasing at k_max = {k_max}"
        )));
    }
    Ok(minimize(
        profile.iter().map(|s| (s.k, psi_from_phi(alpha, delta, s.k, s.value))),
    ))
}

/// `k(k-3)/2 + (1+delta)/2 * k/(k-1)`.
pub fn gaussian_psi_bar(delta: f64, k: usize) -> Result<f64> {
    check_delta(delta)?;
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    let kf = k as f64;
    Ok(kf * (kf - 3.0) / 2.0 + (1.0 + delta) / 2.0 * kf / (kf - 1.0))
}

/// `min_k gaussian_psi_bar(delta, k)` over `2..=k_max`. The sequence is convex
/// in `k`, so a minimizer strictly inside the range is global; a minimizer at
/// `k_max` is reported as insufficient range.
pub fn gaussian_rate(delta: f64, k_max: usize) -> Result<RateMinimum> {
    check_delta(delta)?;
    if k_max < 3 {
        return domain(format!("k_max must be at least 3, got {k_max}"));
    }
    let mut values = Vec::with_capacity(k_max - 1);
    for k in 2..=k_max {
        values.push((k, gaussian_psi_bar(delta, k)?));
    }
    let m = minimize(values.into_iter());
    if m.argmin == k_max {
        return Err(Error::InsufficientRange(format!(
            "minimizer reached k_max = {k_max} at delta = {delta}"
        )));
    }
    Ok(m)
}

/// `2^{1/alpha} alpha^{-1/2} (alpha-2)^{1/2-1/alpha}`.
pub fn b_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return domain(format!("light tail needs alpha > 2, got {alpha}"));
    }
    Ok(2f64.powf(1.0 / alpha) * alpha.powf(-0.5) * (alpha - 2.0).powf(0.5 - 1.0 / alpha))
}

/// Typical largest eigenvalue for `alpha > 2`:
/// `B_alpha (log n)^{1/2} / (log log n)^{1/2 - 1/alpha}`.
pub fn typical_light(alpha: f64, scale: Scale) -> Result<f64> {
    Ok(b_alpha(alpha)? * scale.log_n().sqrt() / scale.log_log_n().powf(0.5 - 1.0 / alpha))
}

/// Typical largest eigenvalue for `alpha < 2`: `(log n)^{1/alpha}`.
pub fn typical_heavy(alpha: f64, scale: Scale) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return domain(format!("heavy tail needs alpha in (0, 2), got {alpha}"));
    }
    Ok(scale.log_n().powf(1.0 / alpha))
}

/// Upper and lower light-tail rates `(1+delta)^2 - 1` and `1 - (1-delta)^2`.
/// The lower rate exists only for `delta < 1`.
pub fn light_rates(delta: f64) -> Result<(f64, Option<f64>)> {
    check_delta(delta)?;
    let upper = (1.0 + delta).powi(2) - 1.0;
    let lower = (delta < 1.0).then(|| 1.0 - (1.0 - delta).powi(2));
    Ok((upper, lower))
}

fn check_f_domain(alpha: f64, rho: f64) -> Result<()> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return domain(format!("alpha must exceed 2, got {alpha}"));
    }
    if !(rho > -1.0 && rho.is_finite()) {
        return domain(format!("rho must exceed -1, got {rho}"));
    }
    Ok(())
}

/// `1 - x - (1+rho)^alpha (2/(alpha-2)) (1-2/alpha)^{alpha/2} x^{1-alpha/2}`.
pub fn f_rate(alpha: f64, rho: f64, x: f64) -> Result<f64> {
    check_f_domain(alpha, rho)?;
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("x must be positive, got {x}"));
    }
    let c = (1.0 + rho).powf(alpha) * (2.0 / (alpha - 2.0)) * (1.0 - 2.0 / alpha).powf(alpha / 2.0);
    Ok(1.0 - x - c * x.powf(1.0 - alpha / 2.0))
}

/// Maximizer `(1+rho)^2 (1-2/alpha)` and maximum `1 - (1+rho)^2` of `f_rate`.
pub fn f_rate_max(alpha: f64, rho: f64) -> Result<(f64, f64)> {
    check_f_domain(alpha, rho)?;
    let s = (1.0 + rho).powi(2);
    Ok((s * (1.0 - 2.0 / alpha), 1.0 - s))
}

/// Bound on `sum_{i~j} f_i^theta f_j^theta` over a tree with `sum f = s` and
/// `f_i <= xi`: `s^{2 theta}/4` if `s < 2 xi`, else `xi^theta (s-xi)^theta`.
pub fn tree_edge_bound(theta: f64, s: f64, xi: f64) -> Result<f64> {
    if !(theta >= 1.0 && theta.is_finite()) {
        return domain(format!("theta must be at least 1, got {theta}"));
    }
    if !(s > 0.0 && xi > 0.0) {
        return domain(format!("s and xi must be positive, got s = {s}, xi = {xi}"));
    }
    if s < 2.0 * xi {
        Ok(s.powf(2.0 * theta) / 4.0)
    } else {
        Ok(xi.powf(theta) * (s - xi).powf(theta))
    }
}
