//! Poisson-Binomial distribution: exact pmf, moments and the Le Cam
//! Poisson-approximation bound.

use crate::error::{Error, Result};

/// Success probabilities of independent, non-identical Bernoulli trials.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliVector(Vec<f64>);

impl BernoulliVector {
    pub fn new(p: impl Into<Vec<f64>>) -> Result<Self> {
        let p = p.into();
        if p.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some((index, &value)) = p.iter().enumerate().find(|(_, &v)| !(0.0..=1.0).contains(&v)) {
            return Err(Error::ProbabilityOutOfRange { index, value });
        }
        Ok(Self(p))
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
}

/// Probability mass over `0..=N` successes.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.0
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let d = n as f64 - m;
                d * d * p
            })
            .sum()
    }

    /// True if the mass has no strict interior valley between two peaks.
    pub fn is_unimodal(&self) -> bool {
        let mut descending = false;
        for w in self.0.windows(2) {
            if w[1] < w[0] {
                descending = true;
            } else if w[1] > w[0] && descending {
                return false;
            }
        }
        true
    }
}

/// Exact pmf by folding one Bernoulli trial at a time into the running
/// distribution. O(N^2).
pub fn pb_pmf(p: &BernoulliVector) -> Pmf {
    let mut pmf = Vec::with_capacity(p.len() + 1);
    pmf.push(1.0);
    for &q in p.probs() {
        pmf.push(0.0);
        for n in (1..pmf.len()).rev() {
            pmf[n] = pmf[n] * (1.0 - q) + pmf[n - 1] * q;
        }
        pmf[0] *= 1.0 - q;
    }
    Pmf(pmf)
}

/// `(sum p_i, sum p_i (1 - p_i))`.
pub fn pb_moments(p: &BernoulliVector) -> (f64, f64) {
    p.probs()
        .iter()
        .fold((0.0, 0.0), |(mu, s2), &q| (mu + q, s2 + q * (1.0 - q)))
}

/// Outcome of comparing a Poisson-Binomial law with its Poisson approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeCamCheck {
    /// `sum_n |P(n) - Poisson(lambda)(n)|` over all `n >= 0`.
    pub tv_distance: f64,
    /// `2 sum p_i^2`.
    pub bound: f64,
    pub holds: bool,
}

/// Poisson tail is summed until its cumulative mass passes this level.
pub const POISSON_TAIL_MASS: f64 = 1.0 - 1e-12;

/// Evaluates both sides of Le Cam's inequality for `p`.
pub fn lecam_check(p: &BernoulliVector) -> LeCamCheck {
    let pmf = pb_pmf(p);
    let lambda: f64 = p.probs().iter().sum();
    let bound = 2.0 * p.probs().iter().map(|q| q * q).sum::<f64>();

    let mut tv = 0.0;
    let mut poisson = (-lambda).exp();
    let mut cumulative = 0.0;
    let mut n = 0usize;
    loop {
        let pb = pmf.probs().get(n).copied().unwrap_or(0.0);
        tv += (pb - poisson).abs();
        cumulative += poisson;
        n += 1;
        if n >= pmf.probs().len() && cumulative > POISSON_TAIL_MASS {
            break;
        }
        poisson *= lambda / n as f64;
    }
    LeCamCheck {
        tv_distance: tv,
        bound,
        holds: tv < bound,
    }
}
