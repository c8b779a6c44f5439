//! Sum / sum-of-squares accumulators and the Welch t statistic.
//!
//! Carrying sum_sq next to sum and count is what lets the miner produce
//! t-values in the same pass that counts matches.

use crate::scalar::Scalar;

/// Moment accumulator over the non-missing outcomes of one subgroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats<S> {
    pub count: usize,
    pub sum: S,
    pub sum_sq: S,
}

impl<S: Scalar> Default for SampleStats<S> {
    fn default() -> Self {
        SampleStats {
            count: 0,
            sum: S::zero(),
            sum_sq: S::zero(),
        }
    }
}

impl<S: Scalar> SampleStats<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: S) {
        self.count += 1;
        self.sum = self.sum + v;
        self.sum_sq = self.sum_sq + v * v;
    }

    pub fn from_values<I: IntoIterator<Item = S>>(values: I) -> Self {
        let mut s = Self::new();
        for v in values {
            s.push(v);
        }
        s
    }

    pub fn mean(&self) -> Option<S> {
        (self.count > 0).then(|| self.sum / S::from_count(self.count))
    }

    /// Unbiased sample variance, clamped at zero against cancellation.
    pub fn variance(&self) -> Option<S> {
        if self.count < 2 {
            return None;
        }
        let n = S::from_count(self.count);
        let v = (self.sum_sq - self.sum * self.sum / n) / (n - S::one());
        Some(v.max(S::zero()))
    }

    /// Accumulator of the complement: `self` minus a contained subgroup.
    pub fn minus(&self, sub: &SampleStats<S>) -> SampleStats<S> {
        debug_assert!(sub.count <= self.count);
        SampleStats {
            count: self.count - sub.count,
            sum: self.sum - sub.sum,
            sum_sq: self.sum_sq - sub.sum_sq,
        }
    }
}

/// Welch's t between a subgroup and a baseline sample, from accumulators:
/// t = |mean_I − mean_g| / sqrt(v_I/n_I + v_g/n_g), reported non-negative.
///
/// `None` when either side has fewer than two points, or when both variances
/// vanish with equal means (0/0, no information). Zero pooled variance with
/// distinct means yields +∞.
pub fn welch_t<S: Scalar>(sub: &SampleStats<S>, base: &SampleStats<S>) -> Option<S> {
    let (v_sub, v_base) = (sub.variance()?, base.variance()?);
    let d = (sub.mean()? - base.mean()?).abs();
    let pooled = v_sub / S::from_count(sub.count) + v_base / S::from_count(base.count);
    if pooled > S::zero() {
        Some(d / pooled.sqrt())
    } else if d > S::zero() {
        Some(S::infinity())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(values: &[f64]) -> SampleStats<f64> {
        SampleStats::from_values(values.iter().copied())
    }

    #[test]
    fn mean_and_variance_match_definitions() {
        let s = stats(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean(), Some(2.5));
        let v = s.variance().unwrap();
        assert!((v - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(stats(&[]).mean(), None);
        assert_eq!(stats(&[7.0]).variance(), None);
    }

    #[test]
    fn welch_t_of_a_two_point_sample_against_its_superset() {
        // {1,2} (mean 1.5, var 0.5) vs {1,2,3,4} (mean 2.5, var 5/3):
        // t = 1 / sqrt(0.5/2 + (5/3)/4) = sqrt(1.5).
        let t = welch_t(&stats(&[1.0, 2.0]), &stats(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert!((t - 1.5f64.sqrt()).abs() < 1e-12, "{t}");
    }

    #[test]
    fn equal_means_give_t_zero() {
        // {0,1} vs {0,0,1,1}: divergence 0, nonzero variances.
        let t = welch_t(&stats(&[0.0, 1.0]), &stats(&[0.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn degenerate_variances() {
        // Both sides constant and equal: undefined.
        assert_eq!(welch_t(&stats(&[2.0, 2.0]), &stats(&[2.0, 2.0, 2.0])), None);
        // Both sides constant but apart: +∞ sentinel.
        let t = welch_t(&stats(&[1.0, 1.0]), &stats(&[2.0, 2.0])).unwrap();
        assert!(t.is_infinite());
        // Too small a sample: undefined.
        assert_eq!(welch_t(&stats(&[1.0]), &stats(&[1.0, 2.0])), None);
    }

    #[test]
    fn minus_recovers_the_complement() {
        let whole = stats(&[1.0, 2.0, 3.0, 4.0]);
        let sub = stats(&[2.0, 4.0]);
        let rest = whole.minus(&sub);
        assert_eq!(rest.count, 2);
        assert_eq!(rest.mean(), Some(2.0));
        let direct = stats(&[1.0, 3.0]);
        assert!((rest.sum_sq - direct.sum_sq).abs() < 1e-12);
    }
}
