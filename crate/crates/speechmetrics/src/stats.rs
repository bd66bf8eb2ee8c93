//! Descriptive statistics and two-sample significance tests.
//!
//! Group comparisons default to Welch's unequal-variance t-test with
//! Welch–Satterthwaite degrees of freedom; a pooled-variance Student
//! variant is available through [`two_sample_t`] for replication runs.
//! p-values are two-sided.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("need at least {needed} values per sample, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("both samples have zero variance but different means; t is unbounded")]
    DegenerateVariance,
}

/// Which two-sample test to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// Unequal-variance test, Welch–Satterthwaite df. The default.
    Welch,
    /// Pooled-variance Student's test, df = n_a + n_b - 2.
    Student,
}

/// Result of a two-sample location test.
///
/// Standard deviations are sample SDs (n-1 denominator). `p` is the
/// two-sided p-value from the t distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleResult {
    pub mean_a: f64,
    pub mean_b: f64,
    pub sd_a: f64,
    pub sd_b: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Arithmetic mean. Errors on an empty slice.
pub fn mean(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Mean and sample standard deviation (n-1 denominator).
///
/// The SD is `None` for a singleton sample, where it is undefined.
pub fn mean_sd(values: &[f64]) -> Result<(f64, Option<f64>), StatsError> {
    let m = mean(values)?;
    if values.len() < 2 {
        return Ok((m, None));
    }
    Ok((m, Some(sample_variance(values, m).sqrt())))
}

fn sample_variance(values: &[f64], mean: f64) -> f64 {
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    ss / (values.len() - 1) as f64
}

/// Welch's two-sample t-test, two-sided.
///
/// When both samples have zero variance and equal means, returns
/// t = 0, p = 1 with df = n_a + n_b - 2 by convention; zero variance
/// with unequal means is an error (t would be infinite).
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TwoSampleResult, StatsError> {
    two_sample_t(a, b, TestKind::Welch)
}

/// Two-sample t-test with an explicit variant choice.
pub fn two_sample_t(a: &[f64], b: &[f64], kind: TestKind) -> Result<TwoSampleResult, StatsError> {
    let got = a.len().min(b.len());
    if got < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ma = mean(a)?;
    let mb = mean(b)?;
    let va = sample_variance(a, ma);
    let vb = sample_variance(b, mb);

    let (se2, df) = match kind {
        TestKind::Welch => {
            let se2 = va / na + vb / nb;
            let df = if se2 == 0.0 {
                na + nb - 2.0
            } else {
                se2 * se2
                    / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0))
            };
            (se2, df)
        }
        TestKind::Student => {
            let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
            (pooled * (1.0 / na + 1.0 / nb), na + nb - 2.0)
        }
    };

    let (t, p) = if se2 == 0.0 {
        if ma == mb {
            (0.0, 1.0)
        } else {
            return Err(StatsError::DegenerateVariance);
        }
    } else {
        let t = (ma - mb) / se2.sqrt();
        (t, two_sided_p(t, df))
    };

    Ok(TwoSampleResult {
        mean_a: ma,
        mean_b: mb,
        sd_a: va.sqrt(),
        sd_b: vb.sqrt(),
        t,
        df,
        p,
    })
}

/// Two-sided p-value for a t statistic: P(|T| >= |t|) under df degrees
/// of freedom, via the identity p = I_x(df/2, 1/2) with x = df/(df+t^2).
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// CDF of the t distribution with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    let tail = two_sided_p(t, df) / 2.0;
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

// Regularized incomplete beta function I_x(a, b), evaluated by the
// continued fraction of Lentz's method. Accurate to ~1e-10 over the
// (a, b) ranges that arise from t statistics, which is the documented
// tolerance for p-values computed here.
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    // The continued fraction converges fastest for x < (a+1)/(a+b+2);
    // otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + b * (1.0 - x).ln() + a * x.ln()).exp()
            * beta_cf(b, a, 1.0 - x)
            / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

// Lanczos approximation (g = 7, 9 terms), |relative error| < 1e-13 for
// positive arguments.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0);
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_sd_singleton() {
        let (m, sd) = mean_sd(&[5.0]).unwrap();
        assert_eq!(m, 5.0);
        assert!(sd.is_none());
    }

    #[test]
    fn mean_sd_small_sample() {
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((sd.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mean_sd_constant_list() {
        let (m, sd) = mean_sd(&[4.2, 4.2, 4.2]).unwrap();
        assert_eq!(m, 4.2);
        assert_eq!(sd.unwrap(), 0.0);
    }

    #[test]
    fn mean_sd_empty_errors() {
        assert_eq!(mean_sd(&[]), Err(StatsError::EmptySample));
    }

    #[test]
    fn welch_identical_samples() {
        let r = welch_t(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert!((r.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn welch_known_case() {
        // Cross-checked against scipy.stats.ttest_ind(equal_var=False).
        let r = welch_t(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((r.t - (-1.224_744_871_391_589)).abs() < 1e-12);
        assert!((r.df - 4.0).abs() < 1e-12);
        assert!((r.p - 0.287_864_134_726_690_8).abs() < 1e-10);
        assert_eq!(r.mean_a, 2.0);
        assert_eq!(r.mean_b, 3.0);
    }

    #[test]
    fn welch_zero_variance_distinct_means() {
        let err = welch_t(&[1.0, 1.0], &[2.0, 2.0]).unwrap_err();
        assert_eq!(err, StatsError::DegenerateVariance);
    }

    #[test]
    fn welch_undersized_sample() {
        assert!(matches!(
            welch_t(&[1.0], &[2.0, 3.0]),
            Err(StatsError::TooFewValues { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn student_matches_welch_on_balanced_equal_variance() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [2.0, 3.0, 4.0, 5.0];
        let w = two_sample_t(&a, &b, TestKind::Welch).unwrap();
        let s = two_sample_t(&a, &b, TestKind::Student).unwrap();
        assert!((w.t - s.t).abs() < 1e-12);
        assert_eq!(s.df, 6.0);
    }

    #[test]
    fn t_cdf_reference_values() {
        // Frozen from scipy.stats.t.
        let cases = [
            (1.0, 1.0, 0.750_000_000_000_000_2),
            (2.0, 4.0, 0.941_941_738_241_592_2),
            (2.5, 7.3, 0.980_174_882_667_199_8),
            (0.5, 12.0, 0.686_941_261_887_338),
            (3.0, 2.5, 0.963_711_952_225_484_1),
            (10.0, 30.0, 0.999_999_999_977_123_7),
        ];
        for (t, df, want) in cases {
            assert!(
                (t_cdf(t, df) - want).abs() < 1e-10,
                "cdf({t}, {df}) = {} != {want}",
                t_cdf(t, df)
            );
            assert!((t_cdf(-t, df) - (1.0 - want)).abs() < 1e-10);
        }
    }

    #[test]
    fn two_sided_p_at_zero_is_one() {
        assert!((two_sided_p(0.0, 5.0) - 1.0).abs() < 1e-15);
    }
}
