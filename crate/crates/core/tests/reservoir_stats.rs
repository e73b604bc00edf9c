use refineguard_core::checker::Reservoir;

/// Upper critical value of the chi-square distribution, by the
/// Wilson-Hilferty cube approximation. `z` is the standard normal quantile.
fn chi_square_critical(df: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Standard normal quantile at 0.999.
const Z_999: f64 = 3.090_232_306_167_813;

fn retention_statistic(capacity: usize, n: usize, trials: u64) -> f64 {
    let mut counts = vec![0u64; n];
    for trial in 0..trials {
        let mut r = Reservoir::new(capacity, trial);
        for i in 0..n {
            r.offer(i);
        }
        assert_eq!(r.len(), capacity.min(n));
        for &i in r.slots() {
            counts[i] += 1;
        }
    }
    let expected = trials as f64 * capacity as f64 / n as f64;
    counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn wilson_hilferty_matches_tables() {
    // 0.999 quantiles from scipy.stats.chi2.ppf.
    assert!((chi_square_critical(10.0, Z_999) - 29.588).abs() < 0.2);
    assert!((chi_square_critical(99.0, Z_999) - 148.230).abs() < 0.1);
    assert!((chi_square_critical(999.0, Z_999) - 1142.848).abs() < 0.1);
}

#[test]
fn capacity_one_of_a_hundred_is_uniform() {
    let stat = retention_statistic(1, 100, 10_000);
    let crit = chi_square_critical(99.0, Z_999);
    assert!(stat < crit, "chi-square {stat} >= {crit}");
}

#[test]
fn a_biased_sampler_is_rejected() {
    // Keeping the first items is maximally non-uniform; the statistic must see it.
    let trials = 1000u64;
    let (k, n) = (1usize, 100usize);
    let mut counts = vec![0u64; n];
    counts[0] = trials;
    let expected = trials as f64 * k as f64 / n as f64;
    let stat: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    assert!(stat > chi_square_critical(99.0, Z_999));
}
