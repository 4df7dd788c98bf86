//! Shannon entropy in bits, with the convention `0 log 0 = 0`.

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-9;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `x log2 x`, zero at zero.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Entropy of a normalized weight list without validation.
pub fn entropy_of(weights: &[f64]) -> f64 {
    0.0 - compensated_sum(weights.iter().map(|&x| xlog2x(x)))
}

/// Entropy of `{v / total}` for unnormalized `values` summing to `total`:
/// `log2(total) - Σ v log2 v / total`.
pub fn entropy_scaled(values: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let s = compensated_sum(values.iter().map(|&v| xlog2x(v)));
    (total.log2() - s / total).max(0.0)
}

/// Entropy `h(S)` of a multiset of weights summing to one.
pub fn entropy_multiset(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("entropy of an empty multiset".into()));
    }
    if let Some(bad) = values.iter().find(|&&x| x < 0.0 || x.is_nan()) {
        return Err(Error::InvalidParameter(format!("negative weight {bad}")));
    }
    let total = compensated_sum(values.iter().copied());
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
    }
    let normalized: Vec<f64> = values.iter().map(|x| x / total).collect();
    Ok(entropy_of(&normalized))
}

/// `h(x) = -x log2 x - (1-x) log2 (1-x)`; no range check.
#[inline]
pub fn h2(x: f64) -> f64 {
    -xlog2x(x) - xlog2x(1.0 - x)
}

/// Binary entropy with range validation.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::InvalidParameter(format!("binary entropy of {x}")));
    }
    Ok(h2(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn multiset_examples() {
        assert_eq!(entropy_multiset(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy_multiset(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        // -0.82 log2 0.82 - 0.18 log2 0.18
        assert_abs_diff_eq!(entropy_multiset(&[0.82, 0.18]).unwrap(), 0.680077, epsilon = 1e-6);
        assert!(entropy_multiset(&[1.2, -0.2]).is_err());
        assert!(entropy_multiset(&[0.5, 0.4]).is_err());
        assert!(entropy_multiset(&[]).is_err());
    }

    #[test]
    fn binary_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(binary_entropy(0.05).unwrap(), 0.286397, epsilon = 1e-6);
        assert_abs_diff_eq!(binary_entropy(0.11).unwrap(), 0.499916, epsilon = 1e-6);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn scaled_matches_normalized() {
        let v = [0.81, 0.01];
        assert_abs_diff_eq!(
            entropy_scaled(&v, 0.82),
            entropy_multiset(&[0.81 / 0.82, 0.01 / 0.82]).unwrap(),
            epsilon = 1e-14
        );
        assert_eq!(entropy_scaled(&[0.0, 0.0], 0.0), 0.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert_abs_diff_eq!(s.value(), 1e-16, epsilon = 1e-30);
    }

    proptest! {
        #[test]
        fn binary_entropy_is_symmetric(x in 0.0f64..=1.0) {
            prop_assert!((h2(x) - h2(1.0 - x)).abs() < 1e-12);
            prop_assert!(h2(x) <= 1.0 + 1e-15);
        }

        #[test]
        fn entropy_bounded_by_log_count(raw in prop::collection::vec(0.0f64..1.0, 1..20)) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let h = entropy_multiset(&w).unwrap();
            prop_assert!(h >= 0.0 && h <= (w.len() as f64).log2() + 1e-12);
        }
    }
}
