use std::fmt;

use serde::{Deserialize, Serialize};

use super::special::{f_sf, f_upper_quantile, kolmogorov_sf, normal_cdf, student_t_sf};
use super::summary::{mean, sample_variance};
use super::StatConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Df {
    One(f64),
    Pair(f64, f64),
}

impl fmt::Display for Df {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Df::One(d) => write!(f, "{}", trim_float(*d)),
            Df::Pair(a, b) => write!(f, "({}, {})", trim_float(*a), trim_float(*b)),
        }
    }
}

fn trim_float(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

/// Alternative hypothesis, always phrased for the first sample against the
/// second: `Less` means "mean(a) < mean(b)".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    TwoSided,
    Less,
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub df: Df,
    pub p_value: f64,
    pub reject: bool,
    /// Critical value of the statistic at alpha, where one is reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<f64>,
}

impl TestOutcome {
    fn new(statistic: f64, df: Df, p_value: f64, cfg: &StatConfig) -> Self {
        let p_value = if p_value.is_nan() { 1.0 } else { p_value.clamp(0.0, 1.0) };
        TestOutcome {
            statistic,
            df,
            p_value,
            reject: p_value < cfg.alpha,
            critical: None,
        }
    }
}

fn need(xs: &[f64], n: usize, what: &str) -> Result<()> {
    if xs.len() < n {
        return Err(Error::invalid(format!("{what} needs at least {n} values, got {}", xs.len())));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("{what} got a non-finite value")));
    }
    Ok(())
}

/// Kolmogorov distance between the sample's empirical CDF and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    need(samples, 1, "KS statistic")?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

/// One-sample KS test with the asymptotic Kolmogorov p-value.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64, cfg: &StatConfig) -> Result<TestOutcome> {
    need(samples, 5, "KS test")?;
    let d = ks_statistic(samples, cdf)?;
    let n = samples.len() as f64;
    Ok(TestOutcome::new(d, Df::One(n), kolmogorov_sf(n.sqrt() * d), cfg))
}

/// KS against a normal with the sample's own mean and standard deviation.
pub fn ks_normality(samples: &[f64], cfg: &StatConfig) -> Result<TestOutcome> {
    need(samples, 5, "KS normality test")?;
    let m = mean(samples);
    let s = sample_variance(samples).sqrt();
    if !(s > 0.0) {
        return Err(Error::ZeroVariance("KS normality test"));
    }
    ks_one_sample(samples, |x| normal_cdf(x, m, s), cfg)
}

/// Largest gap between the two empirical CDFs.
///
/// # Panics
/// If either sample is empty.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "ks_two_sample needs two non-empty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sided F-test of equal variances, larger variance over smaller.
pub fn f_test_variances(a: &[f64], b: &[f64], cfg: &StatConfig) -> Result<TestOutcome> {
    need(a, 2, "F-test")?;
    need(b, 2, "F-test")?;
    let (va, vb) = (sample_variance(a), sample_variance(b));
    if !(va > 0.0 && vb > 0.0) {
        return Err(Error::ZeroVariance("F-test of variances"));
    }
    let ((big, nb), (small, ns)) = if va >= vb {
        ((va, a.len()), (vb, b.len()))
    } else {
        ((vb, b.len()), (va, a.len()))
    };
    let f = big / small;
    let (d1, d2) = ((nb - 1) as f64, (ns - 1) as f64);
    let p = (2.0 * f_sf(f, d1, d2)).min(1.0);
    Ok(TestOutcome::new(f, Df::Pair(d1, d2), p, cfg))
}

/// One-way ANOVA; reports `F crit` at alpha alongside the p-value.
pub fn anova_oneway<G: AsRef<[f64]>>(groups: &[G], cfg: &StatConfig) -> Result<TestOutcome> {
    if groups.len() < 2 {
        return Err(Error::invalid("ANOVA needs at least two groups"));
    }
    for g in groups {
        need(g.as_ref(), 2, "ANOVA group")?;
    }
    let k = groups.len() as f64;
    let total: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let n = total as f64;
    let grand = groups.iter().flat_map(|g| g.as_ref().iter()).sum::<f64>() / n;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let g = g.as_ref();
        let m = mean(g);
        ss_between += g.len() as f64 * (m - grand) * (m - grand);
        ss_within += g.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    }
    let (d1, d2) = (k - 1.0, n - k);
    let ms_between = ss_between / d1;
    let ms_within = ss_within / d2;
    let (f, p) = if ms_between == 0.0 {
        (0.0, 1.0)
    } else if ms_within == 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = ms_between / ms_within;
        (f, f_sf(f, d1, d2))
    };
    let mut out = TestOutcome::new(f, Df::Pair(d1, d2), p, cfg);
    out.critical = Some(f_upper_quantile(cfg.alpha, d1, d2));
    Ok(out)
}

/// Two-sample t-test, pooled (Student) or unpooled (Welch).
pub fn t_test(a: &[f64], b: &[f64], alt: Alternative, pooled: bool, cfg: &StatConfig) -> Result<TestOutcome> {
    need(a, 2, "t-test")?;
    need(b, 2, "t-test")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a), sample_variance(b));
    let pooled_df = na + nb - 2.0;
    let (se, df) = if pooled {
        let sp = ((na - 1.0) * va + (nb - 1.0) * vb) / pooled_df;
        ((sp * (1.0 / na + 1.0 / nb)).sqrt(), pooled_df)
    } else {
        let (qa, qb) = (va / na, vb / nb);
        let denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
        let df = if denom > 0.0 { (qa + qb).powi(2) / denom } else { pooled_df };
        ((qa + qb).sqrt(), df)
    };
    let diff = ma - mb;
    let t = if diff == 0.0 {
        0.0
    } else if se == 0.0 {
        diff.signum() * f64::INFINITY
    } else {
        diff / se
    };
    let p = match alt {
        Alternative::TwoSided => (2.0 * student_t_sf(t.abs(), df)).min(1.0),
        Alternative::Greater => student_t_sf(t, df),
        Alternative::Less => student_t_sf(-t, df),
    };
    Ok(TestOutcome::new(t, Df::One(df), p, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const G1: [f64; 6] = [4.2, 5.1, 3.9, 4.8, 5.5, 4.4];
    const G2: [f64; 6] = [5.9, 6.3, 5.2, 6.8, 5.7, 6.1];
    const G3: [f64; 6] = [4.9, 5.0, 5.6, 4.7, 5.3, 5.8];
    const A: [f64; 7] = [1.1, 2.3, 1.9, 3.2, 2.8, 2.2, 1.7];
    const B: [f64; 8] = [2.9, 3.8, 3.1, 4.5, 2.7, 3.6, 4.1, 3.3];

    fn cfg() -> StatConfig {
        StatConfig::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ks_hand_fixture() {
        let d = ks_statistic(&[0.25, 0.5, 0.75], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(close(d, 0.25, 1e-15), "{d}");
    }

    #[test]
    fn ks_quantile_placement() {
        for n in [5usize, 10, 37, 200] {
            let xs: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
            let d = ks_statistic(&xs, |x| x).unwrap();
            assert!(d <= 1.0 / (n + 1) as f64 + 1e-15);
        }
    }

    #[test]
    fn ks_preconditions() {
        assert!(ks_one_sample(&[0.1, 0.2, 0.3, 0.4], |x| x, &cfg()).is_err());
        assert!(matches!(ks_normality(&[2.0; 10], &cfg()), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn ks_two_sample_fixtures() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 3.0]), 0.5);
        assert_eq!(ks_two_sample(&A, &A), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0, 5.0]), 1.0);
    }

    #[test]
    fn normality_of_normal_draws() {
        // Box-Muller over MT; at most 5 of 100 trials may reject
        let mut rejections = 0;
        for seed in 0..100u32 {
            let mut mt = crate::source::Mt19937::new(seed + 1);
            let xs: Vec<f64> = (0..5_000)
                .flat_map(|_| {
                    let u1 = 1.0 - mt.next_f64();
                    let u2 = mt.next_f64();
                    let r = (-2.0 * u1.ln()).sqrt();
                    let th = 2.0 * std::f64::consts::PI * u2;
                    [r * th.cos(), r * th.sin()]
                })
                .collect();
            if ks_normality(&xs, &cfg()).unwrap().reject {
                rejections += 1;
            }
        }
        assert!(rejections <= 5, "{rejections}");
    }

    #[test]
    fn f_test_fixtures() {
        let shifted: Vec<f64> = A.iter().map(|x| x + 10.0).collect();
        let same = f_test_variances(&A, &shifted, &cfg()).unwrap();
        assert!(close(same.statistic, 1.0, 1e-12));
        assert!(close(same.p_value, 1.0, 1e-9));
        assert!(!same.reject);

        // variances exactly 4 and 1 at n = 30
        let base: Vec<f64> = (0..30).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s1 = sample_variance(&base);
        let unit: Vec<f64> = base.iter().map(|x| x / s1.sqrt()).collect();
        let wide: Vec<f64> = unit.iter().map(|x| 2.0 * x).collect();
        let out = f_test_variances(&unit, &wide, &cfg()).unwrap();
        assert!(close(out.statistic, 4.0, 1e-12));
        assert_eq!(out.df, Df::Pair(29.0, 29.0));
        assert!(close(out.p_value, 0.00035994976250327355, 1e-10));
        assert!(out.reject);

        assert!(f_test_variances(&[1.0], &A, &cfg()).is_err());
        assert!(matches!(f_test_variances(&[1.0, 1.0], &A, &cfg()), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn anova_fixtures() {
        let out = anova_oneway(&[&G1[..], &G2[..], &G3[..]], &cfg()).unwrap();
        assert!(close(out.statistic, 9.933947157726188, 1e-9));
        assert!(close(out.p_value, 0.0017885106708823248, 1e-10));
        assert!(close(out.critical.unwrap(), 2.6951729315889423, 1e-8));
        assert!(out.reject);

        let same = anova_oneway(&[&A[..], &A[..]], &cfg()).unwrap();
        assert_eq!((same.statistic, same.p_value, same.reject), (0.0, 1.0, false));
        let flat = anova_oneway(&[vec![3.0; 4], vec![3.0; 5]], &cfg()).unwrap();
        assert_eq!(flat.statistic, 0.0);
        assert!(anova_oneway(&[&A[..]], &cfg()).is_err());
    }

    #[test]
    fn t_test_fixtures() {
        let pooled = t_test(&A, &B, Alternative::TwoSided, true, &cfg()).unwrap();
        assert!(close(pooled.statistic, -3.9202192430242677, 1e-10));
        assert!(close(pooled.p_value, 0.001757673441459525, 1e-10));
        assert_eq!(pooled.df, Df::One(13.0));

        let welch = t_test(&A, &B, Alternative::TwoSided, false, &cfg()).unwrap();
        assert!(close(welch.statistic, -3.885978555289435, 1e-10));
        assert!(close(welch.p_value, 0.00211718186936023, 1e-10));
        let Df::One(df) = welch.df else { panic!() };
        assert!(close(df, 12.147203242536849, 1e-9));

        let less = t_test(&A, &B, Alternative::Less, false, &cfg()).unwrap();
        assert!(close(less.p_value, 0.001058590934680115, 1e-10));
        let greater = t_test(&A, &B, Alternative::Greater, false, &cfg()).unwrap();
        assert!(close(greater.p_value, 1.0 - less.p_value, 1e-12));
    }

    #[test]
    fn t_test_degenerate() {
        let same = t_test(&A, &A, Alternative::TwoSided, true, &cfg()).unwrap();
        assert_eq!((same.statistic, same.p_value), (0.0, 1.0));
        let flat = t_test(&[2.0; 3], &[2.0; 4], Alternative::TwoSided, false, &cfg()).unwrap();
        assert_eq!((flat.statistic, flat.p_value, flat.reject), (0.0, 1.0, false));
        assert!(t_test(&[1.0], &A, Alternative::TwoSided, true, &cfg()).is_err());
    }

    #[test]
    fn t_reference_table() {
        // a fixture whose pooled statistic is exactly 2 on 10 degrees of freedom
        let a = [-1.0, 1.0, -1.0, 1.0, -1.0, 1.0];
        let shift = 2.0 * (sample_variance(&a) * (2.0 / 6.0)).sqrt();
        let b: Vec<f64> = a.iter().map(|x| x - shift).collect();
        let two = t_test(&a, &b, Alternative::TwoSided, true, &cfg()).unwrap();
        assert!(close(two.statistic, 2.0, 1e-12));
        assert!(close(two.p_value, 0.0734, 1e-3));
        let one = t_test(&a, &b, Alternative::Greater, true, &cfg()).unwrap();
        assert!(close(one.p_value, 0.0367, 1e-3));
    }

    fn group() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-50.0f64..50.0, 2..25)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn anova_equals_t_squared(a in group(), b in group()) {
            prop_assume!(sample_variance(&a) + sample_variance(&b) > 1e-6);
            let t = t_test(&a, &b, Alternative::TwoSided, true, &cfg()).unwrap();
            let f = anova_oneway(&[&a[..], &b[..]], &cfg()).unwrap();
            prop_assert!((f.statistic - t.statistic * t.statistic).abs() <= 1e-9 * f.statistic.max(1.0));
            prop_assert!((f.p_value - t.p_value).abs() <= 1e-9);
        }

        #[test]
        fn welch_df_collapses(a in group()) {
            prop_assume!(sample_variance(&a) > 1e-6);
            let b: Vec<f64> = a.iter().map(|x| 3.0 - x).collect();
            let w = t_test(&a, &b, Alternative::TwoSided, false, &cfg()).unwrap();
            let Df::One(df) = w.df else { unreachable!() };
            prop_assert!((df - (2 * a.len() - 2) as f64).abs() <= 1e-9);
        }

        #[test]
        fn two_sided_is_twice_smaller_tail(a in group(), b in group()) {
            let two = t_test(&a, &b, Alternative::TwoSided, false, &cfg()).unwrap();
            let lo = t_test(&a, &b, Alternative::Less, false, &cfg()).unwrap();
            let hi = t_test(&a, &b, Alternative::Greater, false, &cfg()).unwrap();
            for p in [two.p_value, lo.p_value, hi.p_value] {
                prop_assert!((0.0..=1.0).contains(&p));
            }
            prop_assert!((two.p_value - (2.0 * lo.p_value.min(hi.p_value)).min(1.0)).abs() <= 1e-12);
        }

        #[test]
        fn ks_two_sample_symmetric_and_invariant(a in group(), b in group()) {
            let d = ks_two_sample(&a, &b);
            prop_assert_eq!(d, ks_two_sample(&b, &a));
            let g = |x: &f64| (x / 20.0).exp() * 3.0 - 7.0;
            let ta: Vec<f64> = a.iter().map(g).collect();
            let tb: Vec<f64> = b.iter().map(g).collect();
            prop_assert_eq!(d, ks_two_sample(&ta, &tb));
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
