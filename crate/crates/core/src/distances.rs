//! Bin-to-bin histogram distances, centred on the Poisson-Binomial Radius.
//!
//! Every measure here assumes its two inputs live on the probability simplex
//! (L1-normalized). Raw vectors are accepted by the slice-level functions,
//! but the values then fall outside the regime the measures are meant for.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histcore::{validate_pair, FeatureVector};

/// `N - mu` at or below this value is treated as a zero denominator.
pub const PBR_DENOMINATOR_FLOOR: f64 = 1e-12;

/// The closed set of supported distance measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureId {
    Pbr,
    Bd,
    Jd,
    Chi2,
    Hellinger,
    Hi,
    L1,
    L2,
    L1brd,
}

impl MeasureId {
    pub const ALL: [MeasureId; 9] = [
        MeasureId::Pbr,
        MeasureId::Bd,
        MeasureId::Jd,
        MeasureId::Chi2,
        MeasureId::Hellinger,
        MeasureId::Hi,
        MeasureId::L1,
        MeasureId::L2,
        MeasureId::L1brd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureId::Pbr => "pbr",
            MeasureId::Bd => "bd",
            MeasureId::Jd => "jd",
            MeasureId::Chi2 => "chi2",
            MeasureId::Hellinger => "hellinger",
            MeasureId::Hi => "hi",
            MeasureId::L1 => "l1",
            MeasureId::L2 => "l2",
            MeasureId::L1brd => "l1brd",
        }
    }

    /// Evaluates the measure on two slices without validating them.
    ///
    /// Callers must ensure equal length and finite non-negative elements.
    /// PBR returns `NaN`-free results only when `N - mu` is positive, which
    /// always holds for normalized inputs; BD returns `+inf` on disjoint
    /// supports.
    pub fn eval_unchecked(self, x: &[f64], y: &[f64]) -> f64 {
        // Every measure vanishes on identical inputs; rounding in BD's
        // logarithm would otherwise leave a residue of order 1e-16.
        if x == y {
            return 0.0;
        }
        match self {
            MeasureId::Pbr => {
                let (mu, sigma2) = moments_of_difference(x, y);
                sigma2 / (x.len() as f64 - mu)
            }
            MeasureId::Bd => bhattacharyya(x, y),
            MeasureId::Jd => jeffrey(x, y),
            MeasureId::Chi2 => chi_square(x, y),
            MeasureId::Hellinger => hellinger(x, y),
            MeasureId::Hi => intersection(x, y),
            MeasureId::L1 => l1(x, y),
            MeasureId::L2 => l2(x, y),
            MeasureId::L1brd => l1_bin_ratio(x, y),
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown measure '{s}'")))
    }
}

/// Per-bin divergence terms between two feature vectors, with their sum and
/// Poisson-Binomial variance.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceVector {
    pub e: Vec<f64>,
    pub mu: f64,
    pub sigma2: f64,
}

/// `a ln(2a/(a+b)) + b ln(2b/(a+b))`, with `t ln(..) = 0` whenever `t = 0`.
///
/// Written through `ln_1p` of `±(a-b)/(a+b)` so that nearly equal bins do not
/// lose precision to cancellation inside the logarithm.
#[inline]
pub fn divergence_term(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a == 0.0 {
        return b * std::f64::consts::LN_2;
    }
    if b == 0.0 {
        return a * std::f64::consts::LN_2;
    }
    let delta = (a - b) / (a + b);
    (a * delta.ln_1p() + b * (-delta).ln_1p()).max(0.0)
}

/// `(mu, sigma2)` of the difference vector without materializing it.
#[inline]
fn moments_of_difference(x: &[f64], y: &[f64]) -> (f64, f64) {
    x.iter().zip(y).fold((0.0, 0.0), |(mu, s2), (&a, &b)| {
        let e = divergence_term(a, b);
        (mu + e, s2 + e * (1.0 - e))
    })
}

/// Builds the difference vector of `x` and `y`.
pub fn difference_vector(x: &FeatureVector, y: &FeatureVector) -> Result<DifferenceVector> {
    difference_vector_slices(x.values(), y.values())
}

pub fn difference_vector_slices(x: &[f64], y: &[f64]) -> Result<DifferenceVector> {
    validate_pair(x, y)?;
    let e: Vec<f64> = x.iter().zip(y).map(|(&a, &b)| divergence_term(a, b)).collect();
    let (mu, sigma2) = e.iter().fold((0.0, 0.0), |(mu, s2), &t| (mu + t, s2 + t * (1.0 - t)));
    Ok(DifferenceVector { e, mu, sigma2 })
}

/// Poisson-Binomial Radius: `sum e_i (1 - e_i) / (N - sum e_i)`.
pub fn pbr(x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    pbr_slices(x.values(), y.values())
}

pub fn pbr_slices(x: &[f64], y: &[f64]) -> Result<f64> {
    validate_pair(x, y)?;
    let (mu, sigma2) = moments_of_difference(x, y);
    let denom = x.len() as f64 - mu;
    if denom <= PBR_DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator(denom));
    }
    Ok(sigma2 / denom)
}

/// A distance value plus a flag for the one undefined case: Bhattacharyya
/// distance on histograms with disjoint support (`value` is `+inf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub undefined: bool,
}

/// Evaluates `measure` between two feature vectors.
///
/// BD on disjoint supports yields `f64::INFINITY`; use [`evaluate_flagged`]
/// to get an explicit flag instead of testing for infinity.
pub fn evaluate(measure: MeasureId, x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    evaluate_slices(measure, x.values(), y.values())
}

pub fn evaluate_slices(measure: MeasureId, x: &[f64], y: &[f64]) -> Result<f64> {
    match measure {
        MeasureId::Pbr => pbr_slices(x, y),
        other => {
            validate_pair(x, y)?;
            Ok(other.eval_unchecked(x, y))
        }
    }
}

pub fn evaluate_flagged(measure: MeasureId, x: &FeatureVector, y: &FeatureVector) -> Result<Evaluation> {
    let value = evaluate(measure, x, y)?;
    Ok(Evaluation {
        value,
        undefined: value.is_infinite(),
    })
}

fn l1(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

fn l2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn chi_square(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let s = a + b;
            if s == 0.0 {
                0.0
            } else {
                (a - b) * (a - b) / s
            }
        })
        .sum()
}

fn jeffrey(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&a, &b)| divergence_term(a, b)).sum()
}

fn bhattacharyya_coefficient(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&a, &b)| (a * b).sqrt()).sum()
}

fn bhattacharyya(x: &[f64], y: &[f64]) -> f64 {
    let bc = bhattacharyya_coefficient(x, y);
    if bc == 0.0 {
        f64::INFINITY
    } else {
        (-bc.ln()).max(0.0)
    }
}

// sqrt(1 - BC) rewritten as sqrt(0.5 * sum (sqrt a - sqrt b)^2); the two agree
// whenever both inputs sum to one and the latter has no cancellation near 0.
fn hellinger(x: &[f64], y: &[f64]) -> f64 {
    let s: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    (0.5 * s).sqrt()
}

// 1 - sum min(a, b) for equal-area inputs, written as 0.5 * sum |a - b|.
fn intersection(x: &[f64], y: &[f64]) -> f64 {
    0.5 * l1(x, y)
}

/// L1 combined with the bin-ratio dissimilarity, closed form:
/// `sum |a-b| ((a-b)^2 + 2ab(1 - <x,y>)) / (a+b)^2`, empty bins contribute 0.
fn l1_bin_ratio(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let s = a + b;
            if s == 0.0 {
                return 0.0;
            }
            let d = a - b;
            d.abs() * (d * d + 2.0 * a * b * (1.0 - dot)) / (s * s)
        })
        .sum()
}
