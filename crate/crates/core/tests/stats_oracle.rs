use pbr_core::stats::{
    audit_feature_distributions, bonferroni, ks_two_sample, wilcoxon_signed_rank, wilcoxon_signed_rank_detailed,
    TestKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

/// Largest ECDF gap, evaluated at every observed value by counting.
fn ks_breakpoint_sup(x: &[f64], y: &[f64]) -> f64 {
    let ecdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    x.iter()
        .chain(y)
        .map(|&t| (ecdf(x, t) - ecdf(y, t)).abs())
        .fold(0.0, f64::max)
}

/// Two-sided p-value from all 2^n sign assignments of the (average) ranks.
fn sign_flip_p(d: &[f64]) -> f64 {
    let d: Vec<f64> = d.iter().copied().filter(|&v| v != 0.0).collect();
    let n = d.len();
    let ranks: Vec<f64> = d
        .iter()
        .map(|&v| {
            let below = d.iter().filter(|&&u| u.abs() < v.abs()).count() as f64;
            let equal = d.iter().filter(|&&u| u.abs() == v.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (2.0 * (le as f64 / total).min(ge as f64 / total)).min(1.0)
}

#[test]
fn ks_statistic_equals_breakpoint_sup() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=12 {
        for m in 1..=12 {
            for _ in 0..5 {
                // coarse values so that ties within and across samples occur
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64 * 0.25).collect();
                let y: Vec<f64> = (0..m).map(|_| rng.random_range(0..8) as f64 * 0.25).collect();
                let got = ks_two_sample(&x, &y).unwrap().statistic;
                assert!((got - ks_breakpoint_sup(&x, &y)).abs() <= 1e-15, "{x:?} {y:?}");
            }
        }
    }
}

#[test]
fn exact_wilcoxon_matches_sign_flip_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for n in 1..=12 {
        for trial in 0..40 {
            // half the trials use a coarse grid to create ties and zeros
            let d: Vec<f64> = (0..n)
                .map(|_| {
                    if trial % 2 == 0 {
                        rng.random_range(-4..=4) as f64 * 0.5
                    } else {
                        rng.random::<f64>() * 2.0 - 0.8
                    }
                })
                .collect();
            if d.iter().all(|&v| v == 0.0) {
                continue;
            }
            let zeros = vec![0.0; n];
            let o = wilcoxon_signed_rank_detailed(&d, &zeros).unwrap();
            assert!(o.exact);
            let want = sign_flip_p(&d);
            assert!(
                (o.result.p_value - want).abs() <= 1e-12,
                "{d:?}: {} vs {want}",
                o.result.p_value
            );
        }
    }
}

#[derive(serde::Deserialize)]
struct PairedCase {
    x: Vec<f64>,
    y: Vec<f64>,
    statistic: f64,
    p_value: f64,
}

#[derive(serde::Deserialize)]
struct PairedFixture {
    cases: Vec<PairedCase>,
}

/// Reference values from an independent implementation (tie-corrected
/// normal approximation with continuity correction, zero differences
/// dropped) on 100 paired accuracies, the first set with a planted 1-point
/// gap and noise of standard deviation 3.
#[test]
fn normal_approximation_matches_reference() {
    let fixture: PairedFixture = serde_json::from_str(include_str!("fixtures/wilcoxon_paired.json")).unwrap();
    for case in &fixture.cases {
        let r = wilcoxon_signed_rank(&case.x, &case.y).unwrap();
        assert_eq!(r.statistic, case.statistic);
        assert!(
            (r.p_value - case.p_value).abs() <= 1e-12,
            "{} vs {}",
            r.p_value,
            case.p_value
        );
    }
    let planted = &fixture.cases[0];
    let gap = wilcoxon_signed_rank(&planted.x, &planted.y).unwrap();
    assert!(gap.p_value < 0.005);
}

#[test]
fn kolmogorov_p_is_a_probability() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let n = rng.random_range(1..40);
        let m = rng.random_range(1..40);
        let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.2).collect();
        let r = ks_two_sample(&x, &y).unwrap();
        assert!((0.0..=1.0).contains(&r.p_value) && (0.0..=1.0).contains(&r.statistic));
    }
}

fn gamma_matrix(rows: usize, shapes: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let dists: Vec<Gamma<f64>> = shapes.iter().map(|&k| Gamma::new(k, 1.0).unwrap()).collect();
    (0..rows)
        .map(|_| dists.iter().map(|d| d.sample(rng)).collect())
        .collect()
}

#[test]
fn audit_null_rarely_flags() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let features = gamma_matrix(500, &[2.0; 50], &mut rng);
    for test in [TestKind::Ks, TestKind::Wilcoxon] {
        let report = audit_feature_distributions(&features, 10_000, &[0.05], test, 5).unwrap();
        let pct = report.percent_significant[0].percent_significant;
        assert!(pct < 0.1, "{test}: {pct}%");
        assert_eq!(report.num_errors, 0);
    }
}

#[test]
fn audit_planted_alternative_detects_cross_group_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let shapes: Vec<f64> = (0..50).map(|j| if j < 25 { 2.0 } else { 4.0 }).collect();
    let features = gamma_matrix(500, &shapes, &mut rng);
    let cross_fraction = 100.0 * 25.0 * 25.0 / (50.0 * 49.0 / 2.0);
    let report = audit_feature_distributions(&features, 10_000, &[0.05, 0.005, 0.001], TestKind::Ks, 6).unwrap();
    let pct = report.percent_significant[0].percent_significant;
    assert!((pct - cross_fraction).abs() <= 5.0, "{pct}% vs {cross_fraction}%");
    let levels: Vec<f64> = report
        .percent_significant
        .iter()
        .map(|a| a.percent_significant)
        .collect();
    assert!(levels.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn bonferroni_controls_familywise_error_on_uniform_nulls() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let trials = 2000;
    let m = 20;
    let mut any_flag = 0;
    for _ in 0..trials {
        let p: Vec<f64> = (0..m).map(|_| rng.random()).collect();
        if bonferroni(&p, 0.05).unwrap().iter().any(|&f| f) {
            any_flag += 1;
        }
    }
    // FWER <= alpha; 1 - (1 - 0.05/20)^20 = 0.0488
    let rate = any_flag as f64 / trials as f64;
    assert!(rate <= 0.05 + 3.0 * (0.05f64 * 0.95 / trials as f64).sqrt(), "{rate}");
}

#[test]
fn wilcoxon_normal_regime_shift_is_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let x: Vec<f64> = (0..200).map(|_| noise.sample(&mut rng)).collect();
    let y: Vec<f64> = x.iter().map(|v| v - 0.5 + 0.5 * noise.sample(&mut rng)).collect();
    let o = wilcoxon_signed_rank_detailed(&x, &y).unwrap();
    assert!(!o.exact);
    assert!(o.result.p_value < 1e-6);
    assert!(o.w_plus > o.w_minus);
}
