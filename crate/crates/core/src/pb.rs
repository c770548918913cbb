//! Poisson binomial win counts.
//!
//! The number of matches won under a fixed line-up is a sum of independent,
//! non-identical Bernoulli trials. This module computes its exact distribution
//! and the analytic bounds (normal approximation, Hoeffding tails, binomial
//! dominance and distance) that the PTAS and the baseline gap bounds rely on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, LineUp};

/// Per-match win probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbParams(Vec<f64>);

impl PbParams {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::invalid(format!(
                "probability {p} at position {i} is outside [0, 1]"
            )));
        }
        Ok(PbParams(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn variance(&self) -> f64 {
        self.0.iter().map(|p| p * (1.0 - p)).sum()
    }

    /// Average success probability `mean / n`.
    pub fn p_bar(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.mean() / self.0.len() as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinReport {
    /// Probability of at least `target` wins.
    pub win_probability: f64,
    pub target: usize,
    /// `distribution[k]` is the probability of exactly `k` wins.
    pub distribution: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl WinReport {
    pub fn from_params(params: &PbParams, target: usize) -> Self {
        let distribution = win_distribution(params);
        let win_probability = upper_tail(&distribution, target);
        WinReport {
            win_probability,
            target,
            distribution,
            mean: params.mean(),
            variance: params.variance(),
        }
    }
}

/// Exact distribution of the number of successes, `O(n^2)` time, `O(n)` space.
///
/// Row `j` of the table holds the distribution after the first `j` trials;
/// only the current row is kept and updated from high counts to low.
pub fn win_distribution(params: &PbParams) -> Vec<f64> {
    let n = params.len();
    let mut a = vec![0.0; n + 1];
    a[0] = 1.0;
    for (j, &p) in params.probs().iter().enumerate() {
        for i in (1..=j + 1).rev() {
            a[i] = a[i - 1] * p + a[i] * (1.0 - p);
        }
        a[0] *= 1.0 - p;
    }
    a
}

/// `sum_{k >= from} dist[k]`, summed from the small tail upward.
pub fn upper_tail(dist: &[f64], from: usize) -> f64 {
    dist.iter().skip(from).rev().sum()
}

/// `sum_{k <= upto} dist[k]`.
pub fn lower_cdf(dist: &[f64], upto: usize) -> f64 {
    dist.iter().take(upto + 1).sum()
}

pub fn evaluate_lineup(inst: &Instance, lineup: &LineUp) -> Result<WinReport> {
    let params = PbParams(inst.lineup_probs(lineup)?);
    Ok(WinReport::from_params(&params, inst.target()))
}

/// Standard normal CDF, absolute error below 1e-10.
///
/// Uses the all-positive power series of `erf` near the origin and the
/// Laplace continued fraction of `erfc` in the tails.
pub fn normal_cdf(x: f64) -> f64 {
    let t = x / std::f64::consts::SQRT_2;
    if t.abs() < 3.0 {
        0.5 * (1.0 + erf_series(t))
    } else if t < 0.0 {
        0.5 * erfc_continued_fraction(-t)
    } else {
        1.0 - 0.5 * erfc_continued_fraction(t)
    }
}

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_k 2^k x^{2k+1} / (2k+1)!!
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 / std::f64::consts::PI.sqrt() * (-x2).exp() * sum
}

// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0.
// Modified Lentz evaluation.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / f
}

/// Slow reference for [`normal_cdf`]: composite Simpson quadrature of the
/// density over `[0, |x|]`.
pub fn normal_cdf_by_quadrature(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.5;
    }
    let steps = 20_000usize;
    let h = a / steps as f64;
    let density = |y: f64| (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = density(0.0) + density(a);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * density(i as f64 * h);
    }
    let half_mass = s * h / 3.0;
    if x > 0.0 {
        0.5 + half_mass
    } else {
        0.5 - half_mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalApprox {
    /// `Phi((k - mean) / sd)`.
    pub estimate: f64,
    /// `1 / sd`, the guaranteed bound on `|Pr[X <= k] - estimate|`.
    pub bound: f64,
}

pub fn normal_approx_error_bound(params: &PbParams, k: usize) -> Result<NormalApprox> {
    let n = params.len();
    if k < 1 || k > n {
        return Err(Error::invalid(format!("k = {k} outside [1, {n}]")));
    }
    let var = params.variance();
    if var <= 0.0 {
        return Err(Error::invalid("normal approximation needs positive variance"));
    }
    let sd = var.sqrt();
    Ok(NormalApprox {
        estimate: normal_cdf((k as f64 - params.mean()) / sd),
        bound: 1.0 / sd,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `Pr[X >= mean + deviation]`
    Upper,
    /// `Pr[X <= mean - deviation]`
    Lower,
}

/// Hoeffding bound `exp(-2 d^2 / n)`, identical for both tails.
pub fn hoeffding_tail(params: &PbParams, deviation: f64, _side: Tail) -> f64 {
    assert!(deviation >= 0.0, "deviation must be nonnegative");
    let n = params.len();
    if n == 0 {
        return 1.0;
    }
    (-2.0 * deviation * deviation / n as f64).exp()
}

/// Exact `Pr[X >= mean + d]` or `Pr[X <= mean - d]` from the distribution.
pub fn exact_tail(params: &PbParams, deviation: f64, side: Tail) -> f64 {
    let dist = win_distribution(params);
    let mean = params.mean();
    dist.iter()
        .enumerate()
        .filter(|&(k, _)| match side {
            Tail::Upper => k as f64 >= mean + deviation,
            Tail::Lower => k as f64 <= mean - deviation,
        })
        .map(|(_, &v)| v)
        .sum()
}

/// Binomial probability mass function of `Bin(n, q)`, by log-space coefficients.
pub fn binomial_pmf(n: usize, q: f64) -> Vec<f64> {
    if q <= 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if q >= 1.0 {
        let mut v = vec![0.0; n + 1];
        v[n] = 1.0;
        return v;
    }
    let (lq, lr) = (q.ln(), (1.0 - q).ln());
    let mut ln_choose = 0.0;
    (0..=n)
        .map(|i| {
            if i > 0 {
                ln_choose += ((n - i + 1) as f64 / i as f64).ln();
            }
            (ln_choose + i as f64 * lq + (n - i) as f64 * lr).exp()
        })
        .collect()
}

/// `Pr[Bin(n, q) <= k]`.
pub fn binomial_cdf(n: usize, q: f64, k: usize) -> f64 {
    if k >= n {
        return 1.0;
    }
    lower_cdf(&binomial_pmf(n, q), k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub p_bar: f64,
    /// Largest `Pr[X <= k] - Pr[Y <= k]` over `k <= n p_bar - 1` (should be <= 0).
    pub lower_violation: f64,
    /// Largest `Pr[Y <= k] - Pr[X <= k]` over `n p_bar <= k <= n` (should be <= 0).
    pub upper_violation: f64,
}

impl DominanceReport {
    pub fn max_violation(&self) -> f64 {
        self.lower_violation.max(self.upper_violation).max(0.0)
    }
}

/// Compares `X ~ PB(p)` against `Y ~ Bin(n, p_bar)` in both CDF directions.
pub fn stochastic_dominance_check(params: &PbParams) -> DominanceReport {
    let n = params.len();
    let p_bar = params.p_bar();
    let np = params.mean();
    let x = win_distribution(params);
    let y = binomial_pmf(n, p_bar);
    let mut lower_violation = f64::NEG_INFINITY;
    let mut upper_violation = f64::NEG_INFINITY;
    let (mut cx, mut cy) = (0.0, 0.0);
    for k in 0..=n {
        cx += x[k];
        cy += y[k];
        let kf = k as f64;
        if kf <= np - 1.0 {
            lower_violation = lower_violation.max(cx - cy);
        }
        if kf >= np {
            upper_violation = upper_violation.max(cy - cx);
        }
    }
    DominanceReport {
        p_bar,
        lower_violation,
        upper_violation,
    }
}

/// Distance bound between `PB(p)` and `Bin(n, p_bar)`:
/// `(1 - p_bar^n - (1 - p_bar)^n) / ((n + 1) p_bar (1 - p_bar)) * sum (p_i - p_bar)^2`.
///
/// With these exponents the value bounds the CDF distance
/// [`cdf_distance_to_binomial`], not the total-variation distance
/// (`p = (0.1, 0.9)` has total variation 0.32 against a bound of 0.213).
pub fn ehm_distance_bound(params: &PbParams) -> Result<f64> {
    let n = params.len();
    let pb = params.p_bar();
    if !(pb > 0.0 && pb < 1.0) {
        return Err(Error::invalid(format!(
            "distance bound needs 0 < p_bar < 1, got {pb}"
        )));
    }
    let nf = n as f64;
    let coef = (1.0 - pb.powi(n as i32) - (1.0 - pb).powi(n as i32)) / ((nf + 1.0) * pb * (1.0 - pb));
    Ok(coef * spread_about_mean(params.probs()))
}

/// `sum (p_i - p_bar)^2`, exactly zero when all entries are equal.
pub fn spread_about_mean(probs: &[f64]) -> f64 {
    if probs.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    let pb = probs.iter().sum::<f64>() / probs.len() as f64;
    probs.iter().map(|p| (p - pb).powi(2)).sum()
}

/// `max_k |Pr[X <= k] - Pr[Y <= k]|`.
pub fn cdf_distance_to_binomial(params: &PbParams) -> f64 {
    let x = win_distribution(params);
    let y = binomial_pmf(params.len(), params.p_bar());
    let (mut cx, mut cy, mut best) = (0.0f64, 0.0f64, 0.0f64);
    for (a, b) in x.iter().zip(&y) {
        cx += a;
        cy += b;
        best = best.max((cx - cy).abs());
    }
    best
}

#[cfg(test)]
pub(crate) mod oracle {
    /// Distribution of the success count by summing over all `2^n` outcomes.
    pub fn enumerate_distribution(probs: &[f64]) -> Vec<f64> {
        let n = probs.len();
        let mut dist = vec![0.0; n + 1];
        for mask in 0u32..(1u32 << n) {
            let mut w = 1.0;
            for (i, &p) in probs.iter().enumerate() {
                w *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
            }
            dist[mask.count_ones() as usize] += w;
        }
        dist
    }
}
