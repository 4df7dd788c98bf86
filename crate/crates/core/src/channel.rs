//! Per-qubit Bell-diagonal error models.
//!
//! `p_ab` is the probability of bit error `a` and phase error `b` on one pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-9;
const CLAMP_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonal {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

/// Phase-error probability conditioned on the bit-error branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPhase {
    pub delta_p0: f64,
    pub delta_p1: f64,
}

/// Valid range of the BB84 free parameter `q11` for the given marginals.
pub fn q11_interval(delta_b: f64, delta_p: f64) -> (f64, f64) {
    ((delta_b + delta_p - 1.0).max(0.0), delta_b.min(delta_p))
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::InvalidParameter(format!("{name} = {x} is not in [0, 1]")));
    }
    Ok(())
}

impl BellDiagonal {
    /// BB84 channel with bit/phase error rates and free parameter `q11`.
    pub fn from_bb84(delta_b: f64, delta_p: f64, q11: f64) -> Result<Self> {
        check_probability("delta_b", delta_b)?;
        check_probability("delta_p", delta_p)?;
        let (lo, hi) = q11_interval(delta_b, delta_p);
        if !(lo..=hi).contains(&q11) {
            return Err(Error::InvalidParameter(format!(
                "q11 = {q11} outside the valid interval [{lo}, {hi}]"
            )));
        }
        let clamp = |x: f64| if (-CLAMP_TOL..0.0).contains(&x) { 0.0 } else { x };
        Ok(Self {
            p00: clamp(1.0 - delta_b - delta_p + q11),
            p01: clamp(delta_p - q11),
            p10: clamp(delta_b - q11),
            p11: q11,
        })
    }

    /// Symmetric BB84 channel `δ_b = δ_p = q`.
    pub fn bb84(q: f64, q11: f64) -> Result<Self> {
        Self::from_bb84(q, q, q11)
    }

    /// Six-state channel `(1 - 3q/2, q/2, q/2, q/2)`.
    pub fn six_state(q: f64) -> Result<Self> {
        if !(0.0..=2.0 / 3.0).contains(&q) || q.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "six-state error rate {q} is not in [0, 2/3]"
            )));
        }
        let h = q / 2.0;
        Ok(Self {
            p00: (1.0 - 3.0 * h).max(0.0),
            p01: h,
            p10: h,
            p11: h,
        })
    }

    /// Direct construction; entries are renormalized when the sum is within
    /// `1e-9` of one.
    pub fn from_probs(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        let probs = [p00, p01, p10, p11];
        if probs.iter().any(|&p| p < 0.0 || p.is_nan()) {
            return Err(Error::InvalidParameter(format!(
                "negative Bell-diagonal entry in {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if sum == 0.0 {
            return Err(Error::InvalidParameter("Bell-diagonal entries sum to zero".into()));
        }
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "Bell-diagonal entries sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            p00: p00 / sum,
            p01: p01 / sum,
            p10: p10 / sum,
            p11: p11 / sum,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            p00: 1.0,
            p01: 0.0,
            p10: 0.0,
            p11: 0.0,
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            p00: 0.25,
            p01: 0.25,
            p10: 0.25,
            p11: 0.25,
        }
    }

    pub fn delta_b(&self) -> f64 {
        self.p10 + self.p11
    }

    pub fn delta_p(&self) -> f64 {
        self.p01 + self.p11
    }

    /// `p[bit][phase]`.
    pub fn table(&self) -> [[f64; 2]; 2] {
        [[self.p00, self.p01], [self.p10, self.p11]]
    }

    pub fn probs(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    /// Conditional phase-error rates; an empty bit branch gives 0.
    pub fn conditional_phase(&self) -> ConditionalPhase {
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        ConditionalPhase {
            delta_p0: ratio(self.p01, self.p00 + self.p01),
            delta_p1: ratio(self.p11, self.p10 + self.p11),
        }
    }
}
