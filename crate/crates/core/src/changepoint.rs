//! Mean-shift changepoint detection.
//!
//! Exact penalized segmentation by PELT with the within-segment sum of squared
//! deviations as cost, plus a best-single-split mode.

use std::ops::Range;

use serde::Serialize;

use crate::timeseries::{mean, sample_variance, ReturnSeries};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangepointResult<T> {
    /// Indices where a new segment begins, strictly increasing in `(0, n)`.
    pub changepoints: Vec<usize>,
    pub segment_means: Vec<T>,
    pub penalty: T,
    /// Total SSE plus penalty times the number of changepoints.
    pub cost: T,
    pub n: usize,
}

impl<T: Scalar> ChangepointResult<T> {
    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut bounds = vec![0];
        bounds.extend(&self.changepoints);
        bounds.push(self.n);
        bounds.windows(2).map(|w| w[0]..w[1]).collect()
    }
}

/// Prefix sums of the globally centered series, for O(1) segment costs.
struct SegmentCost<T> {
    s1: Vec<T>,
    s2: Vec<T>,
}

impl<T: Scalar> SegmentCost<T> {
    fn new(values: &[T]) -> Self {
        let m = mean(values);
        let mut s1 = Vec::with_capacity(values.len() + 1);
        let mut s2 = Vec::with_capacity(values.len() + 1);
        let (mut a, mut b) = (T::zero(), T::zero());
        s1.push(a);
        s2.push(b);
        for &v in values {
            let c = v - m;
            a += c;
            b += c * c;
            s1.push(a);
            s2.push(b);
        }
        Self { s1, s2 }
    }

    /// SSE of `values[s..t]` around its own mean.
    #[inline]
    fn cost(&self, s: usize, t: usize) -> T {
        let len = T::from_usize_lossy(t - s);
        let sum = self.s1[t] - self.s1[s];
        (self.s2[t] - self.s2[s] - sum * sum / len).max(T::zero())
    }
}

fn finish<T: Scalar>(values: &[T], changepoints: Vec<usize>, penalty: T, cost: T) -> ChangepointResult<T> {
    let mut result = ChangepointResult {
        changepoints,
        segment_means: Vec::new(),
        penalty,
        cost,
        n: values.len(),
    };
    result.segment_means = result.segments().into_iter().map(|r| mean(&values[r])).collect();
    result
}

fn check_input<T: Scalar>(values: &[T]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::InsufficientObservations {
            needed: 2,
            got: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// Minimizes `Σ SSE(segment) + penalty · #changepoints` exactly.
pub fn pelt<T: Scalar>(values: &[T], penalty: T) -> Result<ChangepointResult<T>> {
    check_input(values)?;
    if !(penalty > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "penalty must be positive, got {penalty}"
        )));
    }
    let n = values.len();
    let cost = SegmentCost::new(values);
    let mut f = vec![T::zero(); n + 1];
    let mut last = vec![0usize; n + 1];
    f[0] = -penalty;
    let mut candidates = vec![0usize];
    let mut scratch = Vec::new();
    for t in 1..=n {
        let mut best = T::infinity();
        let mut arg = 0;
        for &s in &candidates {
            let v = f[s] + cost.cost(s, t) + penalty;
            // Ties go to the latest start, as in the exhaustive recursion.
            if v <= best {
                best = v;
                arg = s;
            }
        }
        f[t] = best;
        last[t] = arg;
        scratch.clear();
        scratch.extend(
            candidates
                .iter()
                .copied()
                .filter(|&s| f[s] + cost.cost(s, t) <= f[t]),
        );
        scratch.push(t);
        std::mem::swap(&mut candidates, &mut scratch);
    }
    let mut cps = Vec::new();
    let mut t = n;
    while t > 0 {
        t = last[t];
        if t > 0 {
            cps.push(t);
        }
    }
    cps.reverse();
    Ok(finish(values, cps, penalty, f[n]))
}

pub fn pelt_mean_shift<T: Scalar>(s: &ReturnSeries<T>, penalty: T) -> Result<ChangepointResult<T>> {
    pelt(s.values(), penalty)
}

/// The single split minimizing total SSE. The reported cost includes one
/// penalty so it is comparable with [`pelt`].
pub fn best_single_split<T: Scalar>(values: &[T], penalty: T) -> Result<ChangepointResult<T>> {
    check_input(values)?;
    let n = values.len();
    let cost = SegmentCost::new(values);
    let (k, sse) =
        (1..n)
            .map(|k| (k, cost.cost(0, k) + cost.cost(k, n)))
            .fold(
                (1, T::infinity()),
                |acc, cur| if cur.1 < acc.1 { cur } else { acc },
            );
    Ok(finish(values, vec![k], penalty, sse + penalty))
}

/// `2 σ̂² ln n`, floored at `√ε` so a constant series still gets a positive penalty.
pub fn default_penalty<T: Scalar>(values: &[T]) -> T {
    let n = T::from_usize_lossy(values.len().max(2));
    let v = sample_variance(values);
    let p = T::lit(2.0) * v * n.ln();
    if p.is_finite() {
        p.max(T::epsilon().sqrt())
    } else {
        T::epsilon().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    #[test]
    fn noiseless_step() {
        let v: Vec<f64> = (0..100).map(|i| if i < 50 { 0.0 } else { 5.0 }).collect();
        let r = pelt(&v, 1.0).unwrap();
        assert_eq!(r.changepoints, vec![50]);
        assert_eq!(r.segment_means, vec![0.0, 5.0]);
        assert_eq!(r.segments(), vec![0..50, 50..100]);
        assert_eq!(best_single_split(&v, 1.0).unwrap().changepoints, vec![50]);
    }

    #[test]
    fn constant_series_has_no_changepoints() {
        for p in [1e-6, 1.0, 100.0] {
            assert!(pelt(&[2.0; 40], p).unwrap().changepoints.is_empty());
        }
        assert!(default_penalty(&[2.0; 40]) > 0.0);
    }

    #[test]
    fn noisy_step_with_default_penalty() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let v: Vec<f64> = (0..200)
            .map(|i| if i < 100 { 0.0 } else { 3.0 } + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let p = default_penalty(&v);
        let r = pelt(&v, p).unwrap();
        let (cps, cost) = oracle::optimal_partitioning(&v, p);
        assert_eq!(r.changepoints, cps);
        assert!((r.cost - cost).abs() < 1e-8 * cost.abs().max(1.0));
        assert_eq!(r.changepoints.len(), 1);
        assert!(r.changepoints[0].abs_diff(100) <= 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(pelt(&[1.0, 2.0], 0.0).is_err());
        assert!(pelt(&[1.0], 1.0).is_err());
    }

    fn noisy_levels() -> impl Strategy<Value = Vec<f64>> {
        (
            prop::collection::vec((-3.0f64..3.0, 1usize..60), 1..6),
            any::<u64>(),
        )
            .prop_map(|(levels, seed)| {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                levels
                    .into_iter()
                    .flat_map(|(m, len)| std::iter::repeat_n(m, len))
                    .map(|m| m + 0.5 * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
    }

    proptest! {
        #[test]
        fn pelt_equals_exhaustive_search(v in noisy_levels(), penalty in 0.1f64..20.0) {
            prop_assume!(v.len() >= 2);
            let r = pelt(&v, penalty).unwrap();
            let (cps, cost) = oracle::optimal_partitioning(&v, penalty);
            prop_assert_eq!(&r.changepoints, &cps);
            prop_assert!((r.cost - cost).abs() < 1e-8 * cost.abs().max(1.0));
        }

        #[test]
        fn higher_penalty_never_adds_changepoints(v in noisy_levels(), p in 0.1f64..10.0, extra in 0.0f64..10.0) {
            prop_assume!(v.len() >= 2);
            prop_assert!(pelt(&v, p + extra).unwrap().changepoints.len() <= pelt(&v, p).unwrap().changepoints.len());
        }

        #[test]
        fn translation_invariant(v in noisy_levels(), c in -50.0f64..50.0, p in 0.5f64..10.0) {
            prop_assume!(v.len() >= 2);
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            prop_assert_eq!(pelt(&v, p).unwrap().changepoints, pelt(&shifted, p).unwrap().changepoints);
        }
    }
}
