use pbr_core::pbd::{lecam_check, pb_moments, pb_pmf, BernoulliVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// P(k successes) by summing over every subset of successful trials.
fn subset_enumeration(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut pmf = vec![0.0; n + 1];
    for mask in 0u32..(1 << n) {
        let mut prob = 1.0;
        for (i, &q) in p.iter().enumerate() {
            prob *= if mask >> i & 1 == 1 { q } else { 1.0 - q };
        }
        pmf[mask.count_ones() as usize] += prob;
    }
    pmf
}

fn random_probs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

#[test]
fn pmf_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=12 {
        for _ in 0..100 {
            let p = random_probs(&mut rng, n);
            let got = pb_pmf(&BernoulliVector::new(p.clone()).unwrap());
            let want = subset_enumeration(&p);
            for (k, (g, w)) in got.probs().iter().zip(&want).enumerate() {
                assert!((g - w).abs() <= 1e-12, "N={n} k={k}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn pmf_moments_match_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [1, 2, 5, 12, 50, 300] {
        for _ in 0..20 {
            let p = BernoulliVector::new(random_probs(&mut rng, n)).unwrap();
            let pmf = pb_pmf(&p);
            let (mu, sigma2) = pb_moments(&p);
            assert!((pmf.mean() - mu).abs() <= 1e-10);
            assert!((pmf.variance() - sigma2).abs() <= 1e-10);
        }
    }
}

#[test]
fn lecam_bound_holds_strictly() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let n = rng.random_range(1..=60);
        let scale = [1.0, 0.3, 0.05][rng.random_range(0..3)];
        let p: Vec<f64> = (0..n).map(|_| scale * rng.random::<f64>()).collect();
        let c = lecam_check(&BernoulliVector::new(p).unwrap());
        assert!(c.holds && c.tv_distance < c.bound, "{c:?}");
    }
}

#[test]
fn pmf_is_unimodal_and_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let n = rng.random_range(1..=400);
        let pmf = pb_pmf(&BernoulliVector::new(random_probs(&mut rng, n)).unwrap());
        assert!((pmf.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(pmf.probs().iter().all(|&x| x >= 0.0));
        assert!(pmf.is_unimodal());
    }
}
