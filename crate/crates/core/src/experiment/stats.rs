//! Two-sample significance tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p_value: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

fn two_sided(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Two-sided Welch (unequal-variance) t-test.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Argument(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    let diff = mean(a) - mean(b);
    let se2 = va + vb;
    if se2 == 0.0 {
        return Ok(constant_samples(diff, na + nb - 2.0));
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TTest {
        t,
        df,
        p_value: two_sided(t, df),
    })
}

/// Two-sided paired t-test on `a[i] − b[i]`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Argument("paired samples differ in length".into()));
    }
    if a.len() < 2 {
        return Err(Error::Argument("paired t-test needs at least 2 pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let se2 = variance(&d) / n;
    if se2 == 0.0 {
        return Ok(constant_samples(mean(&d), n - 1.0));
    }
    let t = mean(&d) / se2.sqrt();
    Ok(TTest {
        t,
        df: n - 1.0,
        p_value: two_sided(t, n - 1.0),
    })
}

fn constant_samples(diff: f64, df: f64) -> TTest {
    if diff == 0.0 {
        TTest { t: 0.0, df, p_value: 1.0 }
    } else {
        TTest {
            t: diff.signum() * f64::MAX,
            df,
            p_value: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use rand_distr::{Distribution, Normal};

    // Reference values from an independent statistics package.
    const A: [f64; 5] = [19.8, 20.4, 19.6, 17.8, 18.5];
    const B: [f64; 5] = [28.2, 26.6, 20.1, 23.3, 25.2];

    #[test]
    fn welch_reference_pair() {
        let r = welch_t_test(&A, &B).unwrap();
        assert!((r.t - -3.6964528760284314).abs() < 1e-9);
        assert!((r.df - 4.887740471968372).abs() < 1e-9);
        assert!((r.p_value - 0.014634203639538781).abs() < 1e-6);

        let r = welch_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.5, 5.0, 7.5, 9.0]).unwrap();
        assert!((r.t - -1.8454109465679578).abs() < 1e-9);
        assert!((r.p_value - 0.11130762069520855).abs() < 1e-6);
    }

    #[test]
    fn hand_computed_statistic() {
        // means 19.22 / 24.68, variances 0.992 / 9.553
        let va = A.iter().map(|x| (x - 19.22f64).powi(2)).sum::<f64>() / 4.0;
        let vb = B.iter().map(|x| (x - 24.68f64).powi(2)).sum::<f64>() / 4.0;
        let t = (19.22 - 24.68) / (va / 5.0 + vb / 5.0f64).sqrt();
        assert!((welch_t_test(&A, &B).unwrap().t - t).abs() < 1e-9);
    }

    #[test]
    fn student_t_cdf_table() {
        for (x, df, cdf) in [
            (1.0, 3.0, 0.8044988905221148),
            (2.0, 5.5, 0.9516228048844075),
            (-1.5, 10.0, 0.08225366322272008),
            (3.0, 4.2, 0.9812337698015668),
        ] {
            let d = StudentsT::new(0.0, 1.0, df).unwrap();
            assert!((d.cdf(x) - cdf).abs() < 1e-6, "{x} {df}");
        }
    }

    #[test]
    fn paired_reference() {
        let r = paired_t_test(&A, &B).unwrap();
        assert!((r.t - -4.1079346834263).abs() < 1e-9);
        assert!((r.p_value - 0.014757018887377321).abs() < 1e-6);
    }

    #[test]
    fn identical_and_constant_samples() {
        let r = welch_t_test(&A, &A).unwrap();
        assert_eq!((r.t, r.p_value), (0.0, 1.0));
        assert_eq!(welch_t_test(&[2.0, 2.0], &[2.0, 2.0]).unwrap().p_value, 1.0);
        assert_eq!(welch_t_test(&[2.0, 2.0], &[3.0, 3.0]).unwrap().p_value, 0.0);
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn separated_normals() {
        let mut rng = rng_from(8);
        let a: Vec<f64> = Normal::new(0.0, 1.0).unwrap().sample_iter(&mut rng).take(50).collect();
        let b: Vec<f64> = Normal::new(5.0, 1.0).unwrap().sample_iter(&mut rng).take(50).collect();
        assert!(welch_t_test(&a, &b).unwrap().p_value < 1e-10);
    }
}
