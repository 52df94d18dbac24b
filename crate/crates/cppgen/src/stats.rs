//! Goodness-of-fit machinery: one- and two-sample Kolmogorov-Smirnov tests
//! and chi-square tests for binned counts, with asymptotic p-values.

use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::{Error, Result};

/// Minimum sample size accepted by the tests; the asymptotic p-values are
/// unreliable below this.
pub const MIN_SAMPLES: usize = 50;

/// Statistic and p-value of a goodness-of-fit test.
#[derive(Debug, Clone, Copy)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = sign * (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-10) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sort_copy(samples: &[f64]) -> Vec<f64> {
    let mut s = samples.to_vec();
    s.sort_unstable_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    s
}

fn require_samples(len: usize) -> Result<()> {
    if len < MIN_SAMPLES {
        return Err(Error::InsufficientSample { required: MIN_SAMPLES, actual: len });
    }
    Ok(())
}

/// One-sample Kolmogorov-Smirnov test against a reference CDF.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<TestResult> {
    require_samples(samples.len())?;
    let sorted = sort_copy(samples);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    let sqrt_n = n.sqrt();
    let p_value = kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    Ok(TestResult { statistic: d, p_value })
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<TestResult> {
    require_samples(a.len())?;
    require_samples(b.len())?;
    let xs = sort_copy(a);
    let ys = sort_copy(b);
    let (n, m) = (xs.len(), ys.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        // advance through all observations tied at the current value before
        // comparing the empirical CDFs
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] == v {
            i += 1;
        }
        while j < m && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let sqrt_ne = ne.sqrt();
    let p_value = kolmogorov_sf((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d);
    Ok(TestResult { statistic: d, p_value })
}

/// Survival function of the chi-square distribution with `dof` degrees of
/// freedom.
pub fn chi_square_sf(stat: f64, dof: f64) -> f64 {
    gamma_ur(dof / 2.0, stat / 2.0)
}

/// Chi-square goodness-of-fit test of observed bin counts against fully
/// specified bin probabilities (no parameters estimated from the data, so
/// `dof = bins - 1`).
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<TestResult> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::Domain("need matching observed/probability bins (>= 2)".into()));
    }
    let total: u64 = observed.iter().sum();
    require_samples(total as usize)?;
    let n = total as f64;
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            return Err(Error::Domain("bin probabilities must be positive".into()));
        }
        let e = n * p;
        stat += (o as f64 - e) * (o as f64 - e) / e;
    }
    let dof = (observed.len() - 1) as f64;
    Ok(TestResult { statistic: stat, p_value: chi_square_sf(stat, dof) })
}

fn poisson_pmf(k: u64, lambda: f64) -> f64 {
    (k as f64 * lambda.ln() - lambda - ln_gamma(k as f64 + 1.0)).exp()
}

/// Chi-square goodness-of-fit of integer counts against a Poisson law with
/// known mean. The upper tail is binned so every expected count is at least 5.
pub fn chi_square_poisson(counts: &[u64], lambda: f64) -> Result<TestResult> {
    require_samples(counts.len())?;
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("Poisson mean must be positive, got {lambda}")));
    }
    let n = counts.len() as f64;

    // cut the support at the first k where the expected tail drops below 5
    let mut cut = 0u64;
    let mut tail = 1.0;
    while n * tail >= 5.0 && cut < 1_000_000 {
        tail -= poisson_pmf(cut, lambda);
        cut += 1;
    }
    let cut = cut.max(2) - 1; // bins 0..cut-1 plus the [cut, inf) tail

    let mut observed = vec![0u64; cut as usize + 1];
    for &c in counts {
        observed[(c.min(cut)) as usize] += 1;
    }
    let mut probs: Vec<f64> = (0..cut).map(|k| poisson_pmf(k, lambda)).collect();
    probs.push((1.0 - probs.iter().sum::<f64>()).max(f64::MIN_POSITIVE));
    chi_square_gof(&observed, &probs)
}

/// Chi-square test of independence on a contingency table (margins estimated
/// from the data, `dof = (r - 1)(c - 1)`).
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<TestResult> {
    let rows = table.len();
    if rows < 2 || table[0].len() < 2 || table.iter().any(|r| r.len() != table[0].len()) {
        return Err(Error::Domain("contingency table must be rectangular, at least 2x2".into()));
    }
    let cols = table[0].len();
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> =
        (0..cols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = row_sums.iter().sum();
    require_samples(total as usize)?;
    let mut stat = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let e = row_sums[i] * col_sums[j] / total;
            if e > 0.0 {
                let o = table[i][j] as f64;
                stat += (o - e) * (o - e) / e;
            }
        }
    }
    let dof = ((rows - 1) * (cols - 1)) as f64;
    Ok(TestResult { statistic: stat, p_value: chi_square_sf(stat, dof) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{exponential, substream};

    #[test]
    fn identical_samples_give_zero_statistic() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = two_sample_ks(&xs, &xs).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn rejects_tiny_samples() {
        let xs = vec![1.0; 10];
        assert!(ks_test(&xs, |x| x).is_err());
        assert!(two_sample_ks(&xs, &xs).is_err());
    }

    #[test]
    fn ks_detects_wrong_distribution() {
        let mut rng = substream(5, 0, 0);
        let xs: Vec<f64> = (0..2000).map(|_| exponential(&mut rng, 1.0)).collect();
        // against the correct CDF
        let ok = ks_test(&xs, |x| 1.0 - (-x).exp()).unwrap();
        assert!(ok.p_value > 0.01, "p = {}", ok.p_value);
        // against a rate-2 CDF
        let bad = ks_test(&xs, |x| 1.0 - (-2.0 * x).exp()).unwrap();
        assert!(bad.p_value < 1e-6, "p = {}", bad.p_value);
    }

    #[test]
    fn p_values_are_uniform_under_the_null() {
        // 200 meta-trials of a correct-null KS test; the p-values themselves
        // must look uniform on (0, 1)
        let ps: Vec<f64> = (0..200)
            .map(|trial| {
                let mut rng = substream(11, 1, trial);
                let xs: Vec<f64> = (0..500).map(|_| exponential(&mut rng, 1.0)).collect();
                ks_test(&xs, |x| 1.0 - (-x).exp()).unwrap().p_value
            })
            .collect();
        let meta = ks_test(&ps, |p| p.clamp(0.0, 1.0)).unwrap();
        assert!(meta.p_value > 0.01, "meta p = {}", meta.p_value);
    }

    #[test]
    fn poisson_self_consistency() {
        let mut rng = substream(17, 2, 0);
        let lambda = 5.0;
        // inversion sampling by summing exponential gaps
        let counts: Vec<u64> = (0..10_000)
            .map(|_| {
                let mut t = 0.0;
                let mut k = 0u64;
                loop {
                    t += exponential(&mut rng, lambda);
                    if t > 1.0 {
                        return k;
                    }
                    k += 1;
                }
            })
            .collect();
        let r = chi_square_poisson(&counts, lambda).unwrap();
        assert!(r.p_value > 0.01, "stat = {}, p = {}", r.statistic, r.p_value);
        let wrong = chi_square_poisson(&counts, 6.0).unwrap();
        assert!(wrong.p_value < 1e-6);
    }

    #[test]
    fn independence_test_on_independent_counts() {
        let mut rng = substream(23, 3, 0);
        let mut table = vec![vec![0u64; 3]; 3];
        for _ in 0..30_000 {
            let i = (crate::rng::open01(&mut rng) * 3.0) as usize;
            let j = (crate::rng::open01(&mut rng) * 3.0) as usize;
            table[i.min(2)][j.min(2)] += 1;
        }
        let r = chi_square_independence(&table).unwrap();
        assert!(r.p_value > 0.01, "p = {}", r.p_value);
    }

    #[test]
    fn kolmogorov_sf_reference_points() {
        // classical table values
        assert!((kolmogorov_sf(1.36) - 0.0505).abs() < 5e-3);
        assert!(kolmogorov_sf(0.0) == 1.0);
        assert!(kolmogorov_sf(3.0) < 1e-7);
    }
}
