//! Zero-syndrome rate of repetition codes in closed form, and threshold
//! searches over code families.
//!
//! For the `[n 1 n]` code with bit error rate `q` and conditional phase
//! error rates `δ_{p0}`, `δ_{p1}`, the net gain of the all-agree syndrome is
//!
//! `R^0 = w_0 g(c_0) + w_1 g(c_1) - h(w_1)`
//!
//! with `w_1 = q^n / ((1-q)^n + q^n)`, `c_b = (1 - 2δ_{pb})^n` and
//! `g(c) = 1 - h((1+c)/2)`. This equals `n r^0` of the no-pad formula before
//! the clamp. Everything is evaluated from logarithms so that `n` in the
//! thousands neither underflows nor loses the sign.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::BellDiagonal;
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::optimizer::rate_at;
use crate::protocol::{ChannelSpec, Protocol, Q11};
use crate::rates::Formula;

pub const CLOSED_FORM_MAX_N: usize = 10_000;
pub const GENERIC_MAX_N: usize = 14;
const SCAN_STEP: f64 = 0.005;

fn softplus(y: f64) -> f64 {
    y.max(0.0) + (-y.abs()).exp().ln_1p()
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln g(c)` from `ln |c|`; `g(c) = [(1+c) ln(1+c) + (1-c) ln(1-c)] / (2 ln 2)`.
fn ln_g(ln_abs_c: f64) -> f64 {
    if ln_abs_c == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let c = ln_abs_c.exp();
    if c < 1e-4 {
        let c2 = c * c;
        // (1+c)ln(1+c) + (1-c)ln(1-c) = c^2 (1 + c^2/6 + c^4/15 + ...)
        2.0 * ln_abs_c - (2.0 * LN_2).ln() + (c2 / 6.0 + c2 * c2 / 15.0).ln_1p()
    } else {
        let minus = if c < 1.0 { (1.0 - c) * (-c).ln_1p() } else { 0.0 };
        (((1.0 + c) * c.ln_1p() + minus) / (2.0 * LN_2)).ln()
    }
}

/// `ln h(w)` in bits, from `ln w` with `w <= 1/2`.
fn ln_h(ln_w: f64) -> f64 {
    if ln_w == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let w = ln_w.exp();
    let bracket = if w < 1e-300 {
        1.0 - ln_w
    } else {
        -ln_w - (1.0 - w) * (-w).ln_1p() / w
    };
    ln_w + bracket.ln() - LN_2.ln()
}

/// The two sides of `R^0 = gain - loss`, in natural logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct R0Terms {
    pub n: usize,
    pub ln_gain: f64,
    pub ln_loss: f64,
}

impl R0Terms {
    pub fn value(&self) -> f64 {
        self.ln_gain.exp() - self.ln_loss.exp()
    }

    pub fn is_positive(&self) -> bool {
        self.ln_gain > self.ln_loss
    }
}

/// Closed-form terms of `R^0` for `[n 1 n]` on `channel`.
pub fn repetition_r0_terms(n: usize, channel: &BellDiagonal) -> Result<R0Terms> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("repetition length {n} is below 2")));
    }
    let q = channel.delta_b();
    let cp = channel.conditional_phase();
    let nf = n as f64;
    let ln_abs_c = |d: f64| nf * (1.0 - 2.0 * d).abs().ln();
    let (ln_w0, ln_w1) = if q == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else if q == 1.0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        let t = nf * (q.ln() - (-q).ln_1p());
        (-softplus(t), -softplus(-t))
    };
    let ln_gain = log_add_exp(ln_w0 + ln_g(ln_abs_c(cp.delta_p0)), ln_w1 + ln_g(ln_abs_c(cp.delta_p1)));
    let ln_loss = ln_h(ln_w0.min(ln_w1));
    Ok(R0Terms { n, ln_gain, ln_loss })
}

/// Net bits `R^0` of the all-agree syndrome for `[n 1 n]`.
pub fn repetition_r0_closed_form(n: usize, channel: &BellDiagonal) -> Result<f64> {
    Ok(repetition_r0_terms(n, channel)?.value())
}

/// Smallest `n <= max_n` with `R^0 > 0`, if any.
pub fn first_positive_n(channel: &BellDiagonal, max_n: usize) -> Result<Option<R0Terms>> {
    for n in 2..=max_n {
        let t = repetition_r0_terms(n, channel)?;
        if t.is_positive() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Root `x = 1/4` of `(1-2x)^2 = x`.
pub fn bb84_root_x() -> f64 {
    (5.0 - 3.0) / 8.0
}

/// Root `x = (3 - √5)/2` of `(1-x)^2 = x`.
pub fn six_state_root_x() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

/// Limit threshold of repetition codes for BB84: `q = x/(1+x) = 0.2`.
pub fn analytic_threshold_bb84() -> f64 {
    let x = bb84_root_x();
    x / (1.0 + x)
}

/// Limit threshold for the six-state protocol: `(3-√5)/(5-√5)`.
pub fn analytic_threshold_six_state() -> f64 {
    let s = 5f64.sqrt();
    (3.0 - s) / (5.0 - s)
}

pub fn analytic_threshold(protocol: Protocol) -> f64 {
    match protocol {
        Protocol::Bb84 => analytic_threshold_bb84(),
        Protocol::SixState => analytic_threshold_six_state(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "rep")]
    Repetition,
    #[serde(rename = "spc")]
    SingleParity,
    #[serde(rename = "full")]
    Full,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Repetition => "rep",
            Family::SingleParity => "spc",
            Family::Full => "full",
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            Family::Full => 1,
            _ => 2,
        }
    }

    pub fn code(self, n: usize) -> Result<LinearCode> {
        match self {
            Family::Repetition => LinearCode::repetition(n),
            Family::SingleParity => LinearCode::single_parity(n),
            Family::Full => LinearCode::full(n),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rep" | "repetition" => Ok(Family::Repetition),
            "spc" | "single-parity" => Ok(Family::SingleParity),
            "full" => Ok(Family::Full),
            _ => Err(Error::InvalidParameter(format!(
                "unknown code family '{s}' (expected rep, spc or full)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub q: f64,
    pub n: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdQuery {
    pub protocol: Protocol,
    pub formula: Formula,
    pub family: Family,
    pub max_n: usize,
    pub resolution: f64,
    pub closed_form: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub protocol: Protocol,
    pub formula: Formula,
    pub family: Family,
    pub max_n: usize,
    pub closed_form: bool,
    pub threshold_q: f64,
    pub resolution: f64,
    pub witness: Option<Witness>,
    /// Analytic large-`n` limit, reported for closed-form repetition searches.
    pub analytic_limit: Option<f64>,
    /// Scan points that were positive above a non-positive one.
    pub monotonicity_violations: Vec<f64>,
}

impl ThresholdQuery {
    fn validate(&self) -> Result<()> {
        if self.resolution < 1e-5 || self.resolution.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "resolution {} is below 1e-5",
                self.resolution
            )));
        }
        if self.closed_form {
            if self.family != Family::Repetition || self.formula != Formula::NoOtp {
                return Err(Error::InvalidParameter(
                    "the closed form covers the rep family with the no-otp formula only".into(),
                ));
            }
            if self.max_n > CLOSED_FORM_MAX_N {
                return Err(Error::SizeLimit {
                    what: "max_n",
                    value: self.max_n,
                    limit: CLOSED_FORM_MAX_N,
                });
            }
        } else if self.max_n > GENERIC_MAX_N {
            return Err(Error::SizeLimit {
                what: "max_n",
                value: self.max_n,
                limit: GENERIC_MAX_N,
            });
        }
        if self.max_n < self.family.min_n() {
            return Err(Error::InvalidParameter(format!(
                "max_n {} is below the smallest {} code",
                self.max_n, self.family
            )));
        }
        if self.formula.is_noise() {
            return Err(Error::InvalidParameter("noise formulas have their own search".into()));
        }
        Ok(())
    }

    /// Best positive `(n, rate)` at `q`, or `None` when no code is positive.
    fn witness_at(&self, q: f64) -> Result<Option<Witness>> {
        if self.closed_form {
            let ch = match self.protocol {
                Protocol::Bb84 => BellDiagonal::bb84(q, 0.0)?,
                Protocol::SixState => BellDiagonal::six_state(q)?,
            };
            return Ok(first_positive_n(&ch, self.max_n)?.map(|t| Witness {
                q,
                n: t.n,
                rate: t.value(),
            }));
        }
        let spec = ChannelSpec::from_protocol(self.protocol, q)?;
        for n in self.family.min_n()..=self.max_n {
            let rate = rate_at(&self.family.code(n)?, &spec, self.formula, Q11::Minimize)?.total_rate_raw;
            if rate > 0.0 {
                return Ok(Some(Witness { q, n, rate }));
            }
        }
        Ok(None)
    }
}

/// Largest `q` (to `resolution`) at which some family member up to `max_n`
/// has a positive rate. A coarse scan brackets the boundary and a bisection
/// refines it.
pub fn numeric_threshold(query: &ThresholdQuery) -> Result<ThresholdResult> {
    query.validate()?;
    let q_max = query.protocol.max_qber();
    let steps = (q_max / SCAN_STEP).floor() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * SCAN_STEP).collect();
    let scan = Exec::default()
        .map_slice(&grid, |&q| query.witness_at(q))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let first_bad = scan.iter().position(|w| w.is_none());
    let violations: Vec<f64> = match first_bad {
        Some(b) => (b..grid.len())
            .filter(|&i| scan[i].is_some())
            .map(|i| grid[i])
            .collect(),
        None => Vec::new(),
    };
    let analytic_limit = (query.closed_form).then(|| analytic_threshold(query.protocol));
    let base = ThresholdResult {
        protocol: query.protocol,
        formula: query.formula,
        family: query.family,
        max_n: query.max_n,
        closed_form: query.closed_form,
        threshold_q: 0.0,
        resolution: query.resolution,
        witness: None,
        analytic_limit,
        monotonicity_violations: violations,
    };
    let (mut lo, mut hi, mut witness) = match first_bad {
        Some(0) => return Ok(base),
        Some(b) => (grid[b - 1], grid[b], scan[b - 1]),
        None => {
            let last = grid.len() - 1;
            return Ok(ThresholdResult {
                threshold_q: grid[last],
                witness: scan[last],
                ..base
            });
        }
    };
    while hi - lo > query.resolution {
        let mid = 0.5 * (lo + hi);
        match query.witness_at(mid)? {
            Some(w) => {
                lo = mid;
                witness = Some(w);
            }
            None => hi = mid,
        }
    }
    Ok(ThresholdResult {
        threshold_q: lo,
        witness,
        ..base
    })
}
