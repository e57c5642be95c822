//! Small statistics toolbox: compensated sums, moment estimates, and the
//! Kolmogorov-Smirnov and chi-squared tests used by the conformance
//! suites. Distribution CDFs come from `statrs`; the asymptotic
//! Kolmogorov tail uses the standard series with Stephens' finite-sample
//! correction.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Compensated sum (Kahan with Neumaier's correction, which also
/// survives terms larger than the running sum); keeps reductions
/// deterministic and accurate independent of magnitude spread.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn mean(values: &[f64]) -> f64 {
    kahan_sum(values.iter().copied()) / values.len() as f64
}

/// Unbiased sample variance (n - 1 denominator).
pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    kahan_sum(values.iter().map(|v| (v - m) * (v - m))) / (values.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn stderr_of_mean(values: &[f64]) -> f64 {
    (sample_variance(values) / values.len() as f64).sqrt()
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    // Unit normal is always constructible.
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// One-sample KS statistic sup |F_n - F| against a continuous CDF.
/// Sorts a copy of the sample.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN sample"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1}
/// exp(-2 k^2 lambda^2), evaluated with Stephens' effective lambda
/// lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    kolmogorov_tail(lambda)
}

fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = sign * (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += term;
        sign = -sign;
        if term.abs() < 1e-12 * sum.abs().max(1e-300) {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test against a continuous CDF: (statistic, p-value).
pub fn ks_test<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> (f64, f64) {
    let d = ks_statistic(sample, cdf);
    (d, ks_p_value(d, sample.len()))
}

/// KS test against the standard normal.
pub fn ks_test_standard_normal(sample: &[f64]) -> (f64, f64) {
    ks_test(sample, standard_normal_cdf)
}

/// Two-sample KS test; the p-value uses the effective size
/// n_a n_b / (n_a + n_b).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("non-NaN sample"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("non-NaN sample"));
    let (na, nb) = (sa.len(), sb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let xa = sa[i];
        let xb = sb[j];
        if xa <= xb {
            i += 1;
        }
        if xb <= xa {
            j += 1;
        }
        let diff = (i as f64 / na as f64 - j as f64 / nb as f64).abs();
        d = d.max(diff);
    }
    let ne = (na as f64 * nb as f64) / (na + nb) as f64;
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    (d, kolmogorov_tail(lambda))
}

/// Pearson chi-squared goodness of fit with fully specified bin
/// probabilities: returns (statistic, p-value), dof = bins - 1.
pub fn chi_squared_gof(counts: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(counts.len(), expected.len());
    assert!(counts.len() > 1, "need at least two bins");
    let stat = kahan_sum(counts.iter().zip(expected).map(|(o, e)| {
        let diff = *o as f64 - e;
        diff * diff / e
    }));
    let dof = (counts.len() - 1) as f64;
    // dof >= 1 by the assertion above.
    let dist = ChiSquared::new(dof).unwrap();
    (stat, 1.0 - dist.cdf(stat))
}
