//! Two-sample tests, Bonferroni correction, and the pairwise
//! feature-element distribution audit.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use libm::erfc;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest effective sample size for which Wilcoxon p-values are exact.
pub const WILCOXON_EXACT_MAX_N: usize = 12;

/// Significance levels used by the audit when none are given.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.05, 0.005, 0.001];

/// Number of column pairs the audit tests when none is given.
pub const DEFAULT_AUDIT_PAIRS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_effective: usize,
}

fn sorted_finite(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(i) = sample.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// The statistic is the largest gap between the two right-continuous
/// empirical CDFs; the p-value comes from the asymptotic Kolmogorov
/// distribution at `sqrt(nm/(n+m)) * D`.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<TestResult> {
    let xs = sorted_finite(x)?;
    let ys = sorted_finite(y)?;
    let d = ks_statistic_sorted(&xs, &ys);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let ne = n * m / (n + m);
    Ok(TestResult {
        statistic: d,
        p_value: kolmogorov_sf(ne.sqrt() * d),
        n_effective: ne.floor() as usize,
    })
}

fn ks_statistic_sorted(xs: &[f64], ys: &[f64]) -> f64 {
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Survival function of the Kolmogorov distribution,
/// `Q(t) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2)`.
///
/// Below `t = 1.18` the equivalent theta-function series is summed instead,
/// since the alternating series converges slowly there.
pub fn kolmogorov_sf(t: f64) -> f64 {
    const TERM_FLOOR: f64 = 1e-16;
    if t.is_nan() || t <= 0.0 {
        return 1.0;
    }
    if t < 1.18 {
        let w = PI * PI / (8.0 * t * t);
        let mut s = 0.0;
        for k in 1..=100u32 {
            let odd = f64::from(2 * k - 1);
            let term = (-odd * odd * w).exp();
            s += term;
            if term < TERM_FLOOR {
                break;
            }
        }
        (1.0 - (2.0 * PI).sqrt() / t * s).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for k in 1..=100u32 {
            let kf = f64::from(k);
            let term = (-2.0 * kf * kf * t * t).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < TERM_FLOOR {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Wilcoxon signed-rank test with its intermediate quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonOutcome {
    /// `statistic = min(W+, W-)`, two-sided p-value, non-zero pair count.
    pub result: TestResult,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Whether the p-values come from exact enumeration.
    pub exact: bool,
    /// `P(W+ <= observed W+)` under the null.
    pub p_less: f64,
    /// `P(W+ >= observed W+)` under the null.
    pub p_greater: f64,
}

/// Paired Wilcoxon signed-rank test (two-sided).
///
/// Zero differences are dropped; tied `|d|` share their average rank. Up to
/// [`WILCOXON_EXACT_MAX_N`] non-zero pairs the null distribution of `W+` is
/// enumerated exactly, beyond that a tie-corrected normal approximation with
/// continuity correction is used.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<TestResult> {
    wilcoxon_signed_rank_detailed(x, y).map(|o| o.result)
}

pub fn wilcoxon_signed_rank_detailed(x: &[f64], y: &[f64]) -> Result<WilcoxonOutcome> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut diffs = Vec::with_capacity(x.len());
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        let d = a - b;
        if !d.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        if d != 0.0 {
            diffs.push(d);
        }
    }
    if diffs.is_empty() {
        return Err(Error::AllZeroDifferences);
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, tie_sizes) = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let statistic = w_plus.min(w_minus);

    let (p_less, p_greater, p_value, exact) = if n <= WILCOXON_EXACT_MAX_N {
        let (lo, hi) = exact_signed_rank_tails(&ranks, w_plus);
        (lo, hi, (2.0 * lo.min(hi)).min(1.0), true)
    } else {
        let mean = total / 2.0;
        let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let sd = ((n * (n + 1) * (2 * n + 1)) as f64 / 24.0 - tie_term).sqrt();
        // Continuity-corrected normal tails of W+.
        let lo = normal_cdf((w_plus - mean + 0.5) / sd);
        let hi = normal_cdf(-(w_plus - mean - 0.5) / sd);
        let dev = statistic - mean;
        let z = (dev - 0.5 * sign(dev)) / sd;
        (lo.min(1.0), hi.min(1.0), (2.0 * normal_cdf(-z.abs())).min(1.0), false)
    };
    Ok(WilcoxonOutcome {
        result: TestResult {
            statistic,
            p_value,
            n_effective: n,
        },
        w_plus,
        w_minus,
        exact,
        p_less,
        p_greater,
    })
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Standard normal CDF through `erfc`, accurate deep into the lower tail.
fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// 1-based average ranks of `values` and the sizes of tie groups.
fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

/// `(P(W+ <= w), P(W+ >= w))` under random signs, by dynamic programming
/// over doubled (hence integral) ranks.
fn exact_signed_rank_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let outcomes = 2f64.powi(ranks.len() as i32);
    let w = (2.0 * w_plus).round() as usize;
    let lo: f64 = counts[..=w].iter().sum();
    let hi: f64 = counts[w..].iter().sum();
    (lo / outcomes, hi / outcomes)
}

/// Flags `p_i < alpha / m` for `m` tests.
pub fn bonferroni(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let threshold = alpha / p_values.len().max(1) as f64;
    Ok(p_values.iter().map(|&p| p < threshold).collect())
}

/// Which two-sample test the audit runs per column pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Ks,
    Wilcoxon,
}

impl TestKind {
    pub fn run(self, x: &[f64], y: &[f64]) -> Result<TestResult> {
        match self {
            TestKind::Ks => ks_two_sample(x, y),
            TestKind::Wilcoxon => wilcoxon_signed_rank(x, y),
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Ks => "ks",
            TestKind::Wilcoxon => "wilcoxon",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ks" => Ok(TestKind::Ks),
            "wilcoxon" => Ok(TestKind::Wilcoxon),
            other => Err(Error::InvalidParameter(format!("unknown test '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaPercent {
    pub alpha: f64,
    pub percent_significant: f64,
}

/// Outcome of testing many column pairs of a feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub test: TestKind,
    pub num_rows: usize,
    pub num_columns: usize,
    pub num_pairs: usize,
    /// Pairs whose test could not be run (counted as not significant).
    pub num_errors: usize,
    pub alpha_levels: Vec<f64>,
    /// Percent of pairs flagged after Bonferroni over `num_pairs`, one entry
    /// per alpha level in the same order.
    pub percent_significant: Vec<AlphaPercent>,
    /// Median p-value over pairs that were tested, if any.
    pub median_p: Option<f64>,
    pub seed: u64,
}

impl AuditReport {
    /// CSV with header `alpha,percent_significant`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,percent_significant\n");
        for row in &self.percent_significant {
            out.push_str(&format!("{},{}\n", row.alpha, row.percent_significant));
        }
        out
    }
}

/// Draws `num_pairs` unordered column pairs: every pair once in shuffled
/// order until the pool runs out, then uniformly with replacement.
pub fn sample_column_pairs(num_columns: usize, num_pairs: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut pool: Vec<(usize, usize)> = (0..num_columns)
        .flat_map(|i| ((i + 1)..num_columns).map(move |j| (i, j)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = pool.iter().copied().take(num_pairs).collect();
    while pairs.len() < num_pairs && !pool.is_empty() {
        pairs.push(pool[rng.random_range(0..pool.len())]);
    }
    pairs
}

/// Tests whether pairs of feature columns share a distribution.
///
/// `features` is row-major, `M` rows (samples) by `N` columns (feature
/// elements). Each sampled column pair is tested with `test`; flags use
/// Bonferroni with `m = num_pairs`.
pub fn audit_feature_distributions(
    features: &[Vec<f64>],
    num_pairs: usize,
    alphas: &[f64],
    test: TestKind,
    seed: u64,
) -> Result<AuditReport> {
    let m = features.len();
    if m < 8 {
        return Err(Error::InvalidParameter(format!("audit needs at least 8 rows, got {m}")));
    }
    let n = features[0].len();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if let Some(bad) = features.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: bad.len(),
        });
    }
    if num_pairs == 0 {
        return Err(Error::InvalidParameter("num_pairs must be positive".into()));
    }
    for &a in alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must be in (0, 1), got {a}")));
        }
    }
    let columns: Vec<Vec<f64>> = (0..n).map(|j| features.iter().map(|row| row[j]).collect()).collect();
    let pairs = sample_column_pairs(n, num_pairs, seed);
    let outcomes: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| test.run(&columns[i], &columns[j]).ok().map(|r| r.p_value))
        .collect();

    let num_errors = outcomes.iter().filter(|o| o.is_none()).count();
    let mut p_values: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let threshold_count = num_pairs as f64;
    let percent_significant = alphas
        .iter()
        .map(|&alpha| {
            let threshold = alpha / threshold_count;
            let hits = p_values.iter().filter(|&&p| p < threshold).count();
            AlphaPercent {
                alpha,
                percent_significant: 100.0 * hits as f64 / num_pairs as f64,
            }
        })
        .collect();
    p_values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let median_p = median_sorted(&p_values);
    Ok(AuditReport {
        test,
        num_rows: m,
        num_columns: n,
        num_pairs,
        num_errors,
        alpha_levels: alphas.to_vec(),
        percent_significant,
        median_p,
        seed,
    })
}

pub(crate) fn median_sorted(sorted: &[f64]) -> Option<f64> {
    let len = sorted.len();
    match len {
        0 => None,
        _ if len % 2 == 1 => Some(sorted[len / 2]),
        _ => Some(0.5 * (sorted[len / 2 - 1] + sorted[len / 2])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ks_identical_samples() {
        let x = [0.3, 1.2, -0.4, 2.2, 0.0];
        let r = ks_two_sample(&x, &x).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn ks_disjoint_samples() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert_eq!(r.n_effective, 1);
    }

    #[test]
    fn ks_empty_sample() {
        assert_eq!(ks_two_sample(&[], &[1.0]), Err(Error::EmptySample));
        assert_eq!(ks_two_sample(&[1.0], &[]), Err(Error::EmptySample));
    }

    #[test]
    fn ks_handles_ties_across_samples() {
        // F_x jumps to 1 at 1.0 while F_y is 0.5 there.
        let r = ks_two_sample(&[1.0, 1.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.statistic, 0.5);
    }

    #[test]
    fn kolmogorov_series_matches_reference() {
        // scipy.special.kolmogorov
        assert_abs_diff_eq!(kolmogorov_sf(0.5), 0.963_945_243_664_875_1, epsilon = 1e-12);
        assert_abs_diff_eq!(kolmogorov_sf(1.0), 0.269_999_671_677_354_56, epsilon = 1e-12);
        assert_abs_diff_eq!(kolmogorov_sf(2.0), 0.000_670_925_255_779_795_3, epsilon = 1e-15);
        assert_eq!(kolmogorov_sf(0.1), 1.0);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        // Both branches agree at the switch point.
        let below = kolmogorov_sf(1.18 - 1e-12);
        let above = kolmogorov_sf(1.18);
        assert_abs_diff_eq!(below, above, epsilon = 1e-10);
    }

    #[test]
    fn wilcoxon_identical_is_error() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(wilcoxon_signed_rank(&x, &x), Err(Error::AllZeroDifferences));
    }

    #[test]
    fn wilcoxon_all_positive_n5() {
        let x = [2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [1.0, 1.5, 1.0, 0.5, 0.25];
        let o = wilcoxon_signed_rank_detailed(&x, &y).unwrap();
        assert!(o.exact);
        assert_eq!(o.w_minus, 0.0);
        assert_eq!(o.result.statistic, 0.0);
        assert_eq!(o.p_greater, 1.0 / 32.0);
        assert_eq!(o.result.p_value, 1.0 / 16.0);
    }

    #[test]
    fn wilcoxon_unequal_lengths() {
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0, 2.0], &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn wilcoxon_normal_approximation_matches_scipy() {
        // 20 pairs without ties; reference from scipy.stats.wilcoxon with
        // method="approx", correction=True.
        let d: Vec<f64> = (1..=20)
            .map(|k| {
                if [3, 5, 8, 11, 13, 14].contains(&k) {
                    -f64::from(k)
                } else {
                    f64::from(k)
                }
            })
            .collect();
        let zeros = vec![0.0; 20];
        let o = wilcoxon_signed_rank_detailed(&d, &zeros).unwrap();
        assert!(!o.exact);
        assert_eq!(o.result.statistic, 54.0);
        assert_abs_diff_eq!(o.result.p_value, 0.059_389_370_830_247_79, epsilon = 1e-12);
    }

    #[test]
    fn average_ranks_with_ties() {
        let (r, t) = average_ranks(&[3.0, 1.0, 3.0, 2.0, 3.0]);
        assert_eq!(r, vec![4.0, 1.0, 4.0, 2.0, 4.0]);
        assert_eq!(t, vec![3]);
    }

    #[test]
    fn bonferroni_cases() {
        assert_eq!(bonferroni(&[0.049], 0.05).unwrap(), vec![true]);
        assert_eq!(bonferroni(&[0.01, 0.04], 0.05).unwrap(), vec![true, false]);
        assert!(bonferroni(&[0.01], 0.0).is_err());
        assert!(bonferroni(&[0.01], 1.0).is_err());
        assert!(bonferroni(&[], 0.05).unwrap().is_empty());
    }

    #[test]
    fn pair_sampling_exhausts_pool_first() {
        let pairs = sample_column_pairs(5, 25, 3);
        assert_eq!(pairs.len(), 25);
        let mut first: Vec<_> = pairs[..10].to_vec();
        first.sort();
        first.dedup();
        assert_eq!(first.len(), 10);
        assert!(pairs.iter().all(|&(i, j)| i < j && j < 5));
        assert_eq!(pairs, sample_column_pairs(5, 25, 3));
    }

    #[test]
    fn audit_rejects_small_inputs() {
        let rows = vec![vec![1.0, 2.0]; 7];
        assert!(audit_feature_distributions(&rows, 10, &DEFAULT_ALPHAS, TestKind::Ks, 0).is_err());
        let rows = vec![vec![1.0]; 10];
        assert!(audit_feature_distributions(&rows, 10, &DEFAULT_ALPHAS, TestKind::Ks, 0).is_err());
    }

    #[test]
    fn audit_counts_errors_as_not_significant() {
        // Identical columns make every Wilcoxon pair fail.
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64; 3]).collect();
        let r = audit_feature_distributions(&rows, 3, &DEFAULT_ALPHAS, TestKind::Wilcoxon, 1).unwrap();
        assert_eq!(r.num_errors, 3);
        assert!(r.median_p.is_none());
        assert!(r.percent_significant.iter().all(|a| a.percent_significant == 0.0));
        assert!(r.to_csv().starts_with("alpha,percent_significant\n0.05,0\n"));
    }

    #[test]
    fn median_helper() {
        assert_eq!(median_sorted(&[]), None);
        assert_eq!(median_sorted(&[1.0, 2.0, 4.0]), Some(2.0));
        assert_eq!(median_sorted(&[1.0, 2.0, 4.0, 5.0]), Some(3.0));
    }
}
