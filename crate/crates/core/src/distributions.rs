//! Weibull-tailed edge weights and the analytic tail bounds used for sums of them.
//!
//! The canonical law has exact two-sided tails `P(|W| > t) = exp(-eta t^alpha)`
//! with a fair random sign. Specs with other tail constants are bound-only
//! objects: their tail sandwiches can be evaluated, but they cannot be sampled.

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scale::Scale;

/// Shape and tail constants of a symmetric Weibull-tailed law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullSpec {
    pub alpha: f64,
    /// Lower tail constant: `c_lower e^{-eta t^alpha} <= P(|W| >= t)` for `t > 1`.
    pub c_lower: f64,
    /// Upper tail constant.
    pub c_upper: f64,
    pub eta: f64,
    /// Exponent `c` of an optional `t^{-c}` tail correction.
    pub poly_power: f64,
}

impl WeibullSpec {
    pub fn new(alpha: f64, c_lower: f64, c_upper: f64, eta: f64, poly_power: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        if !(c_lower > 0.0 && c_lower <= c_upper && c_upper.is_finite()) {
            return domain(format!(
                "need 0 < c_lower <= c_upper, got ({c_lower}, {c_upper})"
            ));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return domain(format!("eta must be positive, got {eta}"));
        }
        if !(poly_power >= 0.0 && poly_power.is_finite()) {
            return domain(format!("poly_power must be nonnegative, got {poly_power}"));
        }
        Ok(Self {
            alpha,
            c_lower,
            c_upper,
            eta,
            poly_power,
        })
    }

    /// Exact tails `P(|W| > t) = e^{-t^alpha}`.
    pub fn canonical(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, 1.0, 1.0, 0.0)
    }

    /// Whether the tails are exact, so that the inverse-CDF sampler applies.
    /// Any `eta` is allowed.
    pub fn is_canonical(&self) -> bool {
        self.c_lower == 1.0 && self.c_upper == 1.0 && self.poly_power == 0.0
    }

    fn require_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::UnsupportedSampler(format!(
                "only exact-tail specs can be sampled (c_lower = c_upper = 1, poly_power = 0), got {self:?}"
            )))
        }
    }
}

/// Inverse-CDF map: `sign * (-ln u / eta)^{1/alpha}`.
pub fn weibull_from_uniform(spec: &WeibullSpec, u: f64, positive: bool) -> f64 {
    let magnitude = (-u.ln() / spec.eta).powf(1.0 / spec.alpha);
    if positive {
        magnitude
    } else {
        -magnitude
    }
}

/// Inverse-CDF map for the law conditioned on `|W| > threshold`:
/// `|W|^alpha = threshold^alpha + Exp(eta)`.
pub fn conditioned_from_uniform(spec: &WeibullSpec, threshold: f64, u: f64, positive: bool) -> f64 {
    let magnitude = (threshold.powf(spec.alpha) - u.ln() / spec.eta).powf(1.0 / spec.alpha);
    if positive {
        magnitude
    } else {
        -magnitude
    }
}

pub fn sample<R: Rng + ?Sized>(spec: &WeibullSpec, rng: &mut R) -> Result<f64> {
    spec.require_canonical()?;
    let u: f64 = rng.sample(Open01);
    let positive: bool = rng.gen();
    Ok(weibull_from_uniform(spec, u, positive))
}

/// Draw from the law of `W` conditioned on `|W| > threshold`. Rejection free.
pub fn sample_conditioned<R: Rng + ?Sized>(
    spec: &WeibullSpec,
    threshold: f64,
    rng: &mut R,
) -> Result<f64> {
    spec.require_canonical()?;
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return domain(format!("threshold must be finite and >= 0, got {threshold}"));
    }
    let u: f64 = rng.sample(Open01);
    let positive: bool = rng.gen();
    Ok(conditioned_from_uniform(spec, threshold, u, positive))
}

/// Sandwich `(lower, upper)` for `P(|W| >= t)`.
///
/// Exact for canonical specs. Otherwise the constants apply for `t > 1`; for
/// `t <= 1` the upper value is the trivial 1 and the lower value is the
/// `t = 1` bound, valid by monotonicity of the tail.
pub fn tail_prob(spec: &WeibullSpec, t: f64) -> (f64, f64) {
    let t = t.max(0.0);
    if spec.is_canonical() {
        let p = (-spec.eta * t.powf(spec.alpha)).exp();
        return (p, p);
    }
    if t > 1.0 {
        let core = t.powf(-spec.poly_power) * (-spec.eta * t.powf(spec.alpha)).exp();
        ((spec.c_lower * core).min(1.0), (spec.c_upper * core).min(1.0))
    } else {
        ((spec.c_lower * (-spec.eta).exp()).min(1.0), 1.0)
    }
}

/// Bounds on `P(Y_1^2 + ... + Y_k^2 >= t)` for light tails (`alpha > 2`) and `t > k`:
///
/// `c_lower^k e^{-t^{a/2} k^{1-a/2}} <= P <= c_upper^k (2et/k)^k e^{-(t-k)^{a/2} k^{1-a/2}}`.
pub fn sum_sq_tail_sandwich(k: u32, t: f64, spec: &WeibullSpec) -> Result<(f64, f64)> {
    let alpha = spec.alpha;
    if alpha <= 2.0 {
        return domain(format!("sum-of-squares sandwich needs alpha > 2, got {alpha}"));
    }
    if k < 2 {
        return domain(format!("k must be at least 2, got {k}"));
    }
    let kf = k as f64;
    if !(t > kf) {
        return domain(format!("need t > k, got t = {t}, k = {k}"));
    }
    let half = alpha / 2.0;
    let k_pow = kf.powf(1.0 - half);
    let ln_lower = kf * spec.c_lower.ln() - t.powf(half) * k_pow;
    let ln_upper = kf * spec.c_upper.ln() + kf * (2.0 * std::f64::consts::E * t / kf).ln()
        - (t - kf).powf(half) * k_pow;
    Ok((ln_lower.exp(), ln_upper.exp()))
}

/// Upper bound on `P(|Y~_1|^alpha + ... + |Y~_m|^alpha >= L)` where `Y~` is
/// conditioned on `|Y| > (epsilon log log n)^{1/alpha}`:
///
/// `C^m e^{-L} e^m (L/m)^m e^{epsilon m log log n}`, with `C = max(1, c_upper)`.
pub fn alpha_power_sum_bound(
    m: u32,
    l: f64,
    spec: &WeibullSpec,
    epsilon: f64,
    scale: Scale,
) -> Result<f64> {
    alpha_power_sum_bound_with_constant(m, l, spec.c_upper.max(1.0), epsilon, scale)
}

/// As [`alpha_power_sum_bound`] with an explicit constant `C`.
pub fn alpha_power_sum_bound_with_constant(
    m: u32,
    l: f64,
    constant: f64,
    epsilon: f64,
    scale: Scale,
) -> Result<f64> {
    if m < 1 {
        return domain("m must be at least 1");
    }
    let mf = m as f64;
    if !(l > mf) {
        return domain(format!("need L > m, got L = {l}, m = {m}"));
    }
    if !(epsilon >= 0.0) {
        return domain(format!("epsilon must be nonnegative, got {epsilon}"));
    }
    if !(constant > 0.0) {
        return domain(format!("constant must be positive, got {constant}"));
    }
    let ln_bound = mf * constant.ln() - l + mf + mf * (l / mf).ln()
        + epsilon * mf * scale.log_log_n();
    Ok(ln_bound.exp())
}

/// Relative entropy `I_p(q) = q ln(q/p) + (1-q) ln((1-q)/(1-p))` with `0 ln 0 = 0`.
pub fn relative_entropy(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0, 1), got {p}"));
    }
    if !(0.0..=1.0).contains(&q) {
        return domain(format!("q must lie in [0, 1], got {q}"));
    }
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    Ok((term(q, p) + term(1.0 - q, 1.0 - p)).max(0.0))
}

/// `c = (1 - ln 2) / 2`, the constant in `I_p(p/2) >= c p`.
pub fn entropy_half_constant() -> f64 {
    (1.0 - std::f64::consts::LN_2) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    /// `P(X >= theta m)`
    Upper,
    /// `P(X <= theta m)`
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSandwich {
    pub side: TailSide,
    pub lower: f64,
    pub upper: f64,
}

/// Entropy sandwich for a `Binomial(m, q)` tail at `theta m`.
///
/// `theta > q` bounds the upper tail, `theta < q` the lower tail; in both cases
/// `e^{-m I_q(theta)} / sqrt(8 m theta (1-theta)) <= P <= e^{-m I_q(theta)}`.
/// The lower value is capped by the upper one.
pub fn binomial_tail_sandwich(m: u64, q: f64, theta: f64) -> Result<TailSandwich> {
    if m < 1 {
        return domain("m must be at least 1");
    }
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q must lie in (0, 1), got {q}"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return domain(format!("theta must lie in (0, 1), got {theta}"));
    }
    if theta == q {
        return domain("degenerate threshold: theta equals q");
    }
    let side = if theta > q {
        TailSide::Upper
    } else {
        TailSide::Lower
    };
    let mf = m as f64;
    let upper = (-mf * relative_entropy(q, theta)?).exp();
    let lower = (upper / (8.0 * mf * theta * (1.0 - theta)).sqrt()).min(upper);
    Ok(TailSandwich { side, lower, upper })
}
