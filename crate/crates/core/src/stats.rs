//! Welch two-sample t-test with normal or Student-t p-values.

use libm::{exp, fabs, lgamma, log, sqrt};

/// Count, mean and unbiased variance of a sample, accumulated with Welford's
/// update.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl SampleSummary {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a f64>) -> Self {
        let mut s = SampleSummary::default();
        for &v in values {
            s.push(v);
        }
        s
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    /// Sample variance with `n - 1` in the denominator; 0 below two values.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    fn squared_standard_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.variance() / self.count as f64
        }
    }
}

/// How the two-sided p-value of a t statistic is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PValueMethod {
    /// Standard normal tail; adequate once both samples hold ~100 values.
    #[default]
    NormalApprox,
    /// Student-t tail with Welch-Satterthwaite degrees of freedom, via the
    /// regularized incomplete beta function.
    StudentT,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelchTest {
    pub t_statistic: f64,
    /// Welch-Satterthwaite degrees of freedom; infinite when undefined.
    pub degrees_of_freedom: f64,
    pub p_value: f64,
}

/// Compares the means of `a` and `b` without assuming equal variances.
///
/// When both standard errors vanish the test degenerates: equal means give
/// `t = 0, p = 1`, different means give `t = ±inf, p = 0`. Samples with fewer
/// than two values contribute zero variance.
pub fn welch_t_test(a: &SampleSummary, b: &SampleSummary, method: PValueMethod) -> WelchTest {
    let (va, vb) = (a.squared_standard_error(), b.squared_standard_error());
    let se2 = va + vb;
    let diff = a.mean - b.mean;
    if se2 == 0.0 {
        let (t, p) = if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(diff), 0.0)
        };
        return WelchTest {
            t_statistic: t,
            degrees_of_freedom: f64::INFINITY,
            p_value: p,
        };
    }
    let t = diff / sqrt(se2);
    let mut denom = 0.0;
    if a.count > 1 {
        denom += va * va / (a.count - 1) as f64;
    }
    if b.count > 1 {
        denom += vb * vb / (b.count - 1) as f64;
    }
    let df = if denom > 0.0 { se2 * se2 / denom } else { f64::INFINITY };
    let p_value = match method {
        PValueMethod::NormalApprox => normal_two_sided_p(t),
        PValueMethod::StudentT => student_t_two_sided_p(t, df),
    };
    WelchTest {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value,
    }
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// `P(|Z| >= |z|)` for a standard normal `Z`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    libm::erfc(fabs(z) / core::f64::consts::SQRT_2).min(1.0)
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if !df.is_finite() {
        return normal_two_sided_p(t);
    }
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5).clamp(0.0, 1.0)
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x.is_nan() || !(0.0..=1.0).contains(&x) || a <= 0.0 || b <= 0.0 {
        return f64::NAN;
    }
    if x == 0.0 || x == 1.0 {
        return x;
    }
    let ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x);
    let front = exp(ln_front);
    // The continued fraction converges fastest below the mean of the beta law.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    const MAX_ITER: usize = 10_000;

    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if fabs(delta - 1.0) < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_matches_two_pass() {
        let xs = [0.2, 0.4, 0.4, 0.9, 0.1];
        let s = SampleSummary::from_values(&xs);
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 4.0;
        assert!((s.mean - mean).abs() < 1e-15);
        assert!((s.variance() - var).abs() < 1e-15);
        assert_eq!(SampleSummary::from_values(&[3.0]).variance(), 0.0);
    }

    #[test]
    fn identical_samples() {
        let s = SampleSummary::from_values(&[0.1, 0.3, 0.5, 0.2]);
        for method in [PValueMethod::NormalApprox, PValueMethod::StudentT] {
            let t = welch_t_test(&s, &s, method);
            assert_eq!(t.t_statistic, 0.0);
            assert_eq!(t.p_value, 1.0);
        }
    }

    #[test]
    fn degenerate_constant_samples() {
        let a = SampleSummary::from_values(&[1.0, 1.0]);
        let b = SampleSummary::from_values(&[2.0, 2.0]);
        let t = welch_t_test(&a, &b, PValueMethod::NormalApprox);
        assert_eq!(t.t_statistic, f64::NEG_INFINITY);
        assert_eq!(t.p_value, 0.0);
    }

    #[test]
    fn normal_tail_values() {
        assert!((normal_two_sided_p(1.959963984540054) - 0.05).abs() < 1e-12);
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x and I_x(a, 1) = x^a
        assert!((regularized_incomplete_beta(0.3, 1.0, 1.0) - 0.3).abs() < 1e-14);
        assert!((regularized_incomplete_beta(0.6, 3.0, 1.0) - 0.216).abs() < 1e-14);
        // Student t with 1 df is Cauchy: P(|T| > 1) = 1/2
        assert!((student_t_two_sided_p(1.0, 1.0) - 0.5).abs() < 1e-13);
        // 2 df: P(|T| > t) = 1 - t / sqrt(2 + t^2)
        let t = 1.7;
        assert!((student_t_two_sided_p(t, 2.0) - (1.0 - t / sqrt(2.0 + t * t))).abs() < 1e-13);
    }
}
