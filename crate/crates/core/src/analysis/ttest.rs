//! Two-sided two-sample Student's t-test with pooled variance.
//!
//! With `s_p² = ((n_a-1)s_a² + (n_b-1)s_b²) / (n_a+n_b-2)` and
//! `t = (m_a - m_b) / (s_p √(1/n_a + 1/n_b))`, the p-value is
//! `I_{ν/(ν+t²)}(ν/2, 1/2)` for `ν = n_a + n_b - 2`. When both samples
//! have zero spread the statistic is undefined; such pairs get `p = 1` if
//! the means agree and `p = 0` otherwise.

use super::AnalysisError;
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Two-sided tail probability `P(|T| ≥ |t|)` for `ν` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    math::incomplete_beta(df / (df + t * t), df / 2.0, 0.5).clamp(0.0, 1.0)
}

pub fn pairwise_ttest(a: &[f64], b: &[f64]) -> Result<TTest, AnalysisError> {
    let got = a.len().min(b.len());
    if got < 2 {
        return Err(AnalysisError::TooFewSamples { need: 2, got });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (math::mean(a), math::mean(b));
    let ss = |xs: &[f64], m: f64| xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    let df = na + nb - 2.0;
    let pooled = (ss(a, ma) + ss(b, mb)) / df;
    let diff = ma - mb;
    if !(pooled > 0.0) {
        return Ok(if diff == 0.0 {
            TTest { t: 0.0, df, p: 1.0 }
        } else {
            TTest { t: f64::INFINITY.copysign(diff), df, p: 0.0 }
        });
    }
    let t = diff / math::sqrt(pooled * (1.0 / na + 1.0 / nb));
    Ok(TTest { t, df, p: student_t_sf(t, df) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let r = pairwise_ttest(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn constant_unequal_samples() {
        let r = pairwise_ttest(&[0.0; 4], &[1.0; 4]).unwrap();
        assert_eq!(r.p, 0.0);
        assert_eq!(pairwise_ttest(&[3.0; 3], &[3.0; 5]).unwrap().p, 1.0);
    }

    #[test]
    fn known_value() {
        // reference: scipy.stats.ttest_ind
        let r = pairwise_ttest(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.5]).unwrap();
        assert_eq!(r.df, 4.0);
        assert!((r.t + 1.257_237_114_187_424_1).abs() < 1e-12);
        assert!((r.p - 0.277_069_167_347_592_3).abs() < 1e-10, "{}", r.p);
    }

    #[test]
    fn symmetric() {
        let a = [0.3, 1.9, 2.2, 0.7];
        let b = [1.1, 2.5, 3.0];
        assert_eq!(pairwise_ttest(&a, &b).unwrap().p, pairwise_ttest(&b, &a).unwrap().p);
    }

    #[test]
    fn too_few() {
        assert!(pairwise_ttest(&[1.0], &[2.0, 3.0]).is_err());
    }
}
