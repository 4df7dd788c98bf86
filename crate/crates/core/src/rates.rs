//! Asymptotic key-rate formulas evaluated on a [`SyndromeDistribution`].
//!
//! Every formula follows the same shape: a per-syndrome consumption `R^j`
//! (bit-error part `I_b^j` plus averaged phase-error part), a clamped
//! per-syndrome rate `r^j = max{1 - R^j/n, 0}`, and a global overhead
//! subtracted after weighting by `q^j`.
//!
//! A note on the phase savings without the pad: with `R^j = h_j` and
//! `R̃^j = h_j^{ps} + (n - k)`, the difference `R^j + (n-k) - R̃^j` is the
//! conditional entropy of the phase pattern given `(i, j')`, weighted by
//! `q^{jj'}_i / q^j`. Weighting by `q^{jj'}_i / q^j_i` instead does not
//! satisfy the identity in general.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::BellDiagonal;
use crate::distribution::{SyndromeDistribution, SyndromeRecord};
use crate::entropy::{compensated_sum, h2};
use crate::error::{Error, Result};
use crate::gf2::{standard_form, BitVector, StandardForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    #[serde(rename = "otp")]
    Otp,
    #[serde(rename = "otp-hash")]
    OtpHash,
    #[serde(rename = "no-otp")]
    NoOtp,
    #[serde(rename = "inplace")]
    InPlace,
    #[serde(rename = "parity-otp")]
    ParityOtp,
    #[serde(rename = "noise-otp")]
    NoiseOtp,
    #[serde(rename = "noise-no-otp")]
    NoiseNoOtp,
}

impl Formula {
    /// The formulas that need no extra parameter.
    pub const PLAIN: [Formula; 5] = [
        Formula::Otp,
        Formula::OtpHash,
        Formula::NoOtp,
        Formula::InPlace,
        Formula::ParityOtp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Formula::Otp => "otp",
            Formula::OtpHash => "otp-hash",
            Formula::NoOtp => "no-otp",
            Formula::InPlace => "inplace",
            Formula::ParityOtp => "parity-otp",
            Formula::NoiseOtp => "noise-otp",
            Formula::NoiseNoOtp => "noise-no-otp",
        }
    }

    pub fn is_noise(self) -> bool {
        matches!(self, Formula::NoiseOtp | Formula::NoiseNoOtp)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Formula::Otp,
            Formula::OtpHash,
            Formula::NoOtp,
            Formula::InPlace,
            Formula::ParityOtp,
            Formula::NoiseOtp,
            Formula::NoiseNoOtp,
        ];
        all.into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown formula '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Consumption {
    #[serde(rename = "I_b_j")]
    pub bit: f64,
    #[serde(rename = "avg_I_p")]
    pub avg_phase: f64,
    #[serde(rename = "R_j")]
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeEntry {
    pub syndrome: BitVector,
    pub q_j: f64,
    pub r_j: f64,
    pub kept: bool,
    pub consumption: Consumption,
    /// Both candidate rates of the parity-check formula before the clamp.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub q11: Option<f64>,
    pub noise_p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    pub formula: Formula,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub channel: BellDiagonal,
    pub entries: Vec<SyndromeEntry>,
    pub overhead: f64,
    pub total_rate_raw: f64,
    pub total_rate: f64,
    pub params: RateParams,
}

impl KeyRateReport {
    pub(crate) fn assemble(
        formula: Formula,
        dist: &SyndromeDistribution,
        entries: Vec<SyndromeEntry>,
        overhead: f64,
    ) -> Self {
        let raw = compensated_sum(entries.iter().map(|e| e.q_j * e.r_j)) - overhead;
        Self {
            formula,
            code: dist.code().label().to_string(),
            n: dist.n(),
            k: dist.k(),
            channel: *dist.channel(),
            entries,
            overhead,
            total_rate_raw: raw,
            total_rate: raw.max(0.0),
            params: RateParams::default(),
        }
    }

    pub fn with_q11(mut self, q11: f64) -> Self {
        self.params.q11 = Some(q11);
        self
    }

    /// Recomputes `Σ q^j r^j - overhead` from the entries.
    pub fn recompute_raw(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.q_j * e.r_j)) - self.overhead
    }

    pub fn kept_count(&self) -> usize {
        self.entries.iter().filter(|e| e.kept).count()
    }
}

pub(crate) fn entry(record: &SyndromeRecord, n: usize, bit: f64, avg_phase: f64) -> SyndromeEntry {
    let total = bit + avg_phase;
    let r = (1.0 - total / n as f64).max(0.0);
    SyndromeEntry {
        syndrome: record.syndrome.clone(),
        q_j: record.q,
        r_j: r,
        kept: r > 0.0,
        consumption: Consumption { bit, avg_phase, total },
        branches: None,
    }
}

fn weighted<F: Fn(usize) -> f64>(record: &SyndromeRecord, f: F) -> f64 {
    if record.q <= 0.0 {
        return 0.0;
    }
    compensated_sum(
        record
            .pattern_probs
            .iter()
            .enumerate()
            .map(|(i, &qi)| if qi > 0.0 { qi / record.q * f(i) } else { 0.0 }),
    )
}

fn pad_entries(dist: &SyndromeDistribution) -> Vec<SyndromeEntry> {
    let n = dist.n();
    dist.records()
        .iter()
        .map(|r| {
            let bit = r.bit_pattern_entropy();
            // chain rule keeps bit + avg equal to h_j up to rounding
            let avg = (r.joint_entropy_full - bit).max(0.0);
            entry(r, n, bit, avg)
        })
        .collect()
}

/// Two-way post-processing with the one-time pad on the syndrome.
pub fn rate_otp(dist: &SyndromeDistribution) -> KeyRateReport {
    let overhead = (dist.n() - dist.k()) as f64 / dist.n() as f64;
    KeyRateReport::assemble(Formula::Otp, dist, pad_entries(dist), overhead)
}

/// One-time pad on the compressed syndrome: overhead `h({q^j})/n`.
pub fn rate_otp_hash(dist: &SyndromeDistribution) -> KeyRateReport {
    let overhead = dist.syndrome_entropy() / dist.n() as f64;
    KeyRateReport::assemble(Formula::OtpHash, dist, pad_entries(dist), overhead)
}

fn no_pad_entries(dist: &SyndromeDistribution) -> Vec<SyndromeEntry> {
    let n = dist.n();
    let redundancy = (n - dist.k()) as f64;
    dist.records()
        .iter()
        .map(|r| {
            let bit = r.bit_pattern_entropy();
            let avg = (r.joint_entropy_phase_syndrome - bit).max(0.0) + redundancy;
            entry(r, n, bit, avg)
        })
        .collect()
}

/// Syndrome announced in the clear; the phase pattern is uniformized within
/// each phase syndrome, so `r^j = max{k/n - h_j^{ps}/n, 0}`.
pub fn rate_no_otp(dist: &SyndromeDistribution) -> KeyRateReport {
    KeyRateReport::assemble(Formula::NoOtp, dist, no_pad_entries(dist), 0.0)
}

fn canonical(dist: &SyndromeDistribution) -> Result<StandardForm> {
    let h = dist.code().parity_check();
    let sf = standard_form(h);
    if sf.rank != h.rows() {
        return Err(Error::RankDeficient {
            rank: sf.rank,
            rows: h.rows(),
        });
    }
    Ok(sf)
}

/// Hashing in place on a code brought to `[A | I]`. The key rate coincides
/// with [`rate_no_otp`]; the canonical form must exist.
pub fn rate_inplace(dist: &SyndromeDistribution) -> Result<KeyRateReport> {
    canonical(dist)?;
    Ok(KeyRateReport::assemble(
        Formula::InPlace,
        dist,
        no_pad_entries(dist),
        0.0,
    ))
}

/// Parity-check reconciliation with the pad: each syndrome takes the better
/// of the hashed-syndrome branch and the announce-the-identity-bits branch.
pub fn rate_parity_otp(dist: &SyndromeDistribution) -> Result<KeyRateReport> {
    let sf = canonical(dist)?;
    let n = dist.n();
    let nf = n as f64;
    let r = (n - dist.k()) as f64;
    let cp = dist.channel().conditional_phase();
    let (h0, h1) = (h2(cp.delta_p0), h2(cp.delta_p1));
    let ident = sf.identity_columns();
    let mut entries = pad_entries(dist);
    for (e, rec) in entries.iter_mut().zip(dist.records()) {
        let announce = weighted(rec, |i| {
            let l = ident.iter().filter(|&&c| rec.patterns[i].get(c)).count() as f64;
            ((r - l) / nf) * h0 + (l / nf) * h1
        });
        let first = 1.0 - rec.joint_entropy_full / nf;
        let second = r / nf - announce;
        e.r_j = first.max(second).max(0.0);
        e.kept = e.r_j > 0.0;
        e.branches = Some([first, second]);
    }
    let overhead = dist.syndrome_entropy() / nf;
    Ok(KeyRateReport::assemble(Formula::ParityOtp, dist, entries, overhead))
}

/// Evaluates one of the plain formulas.
pub fn evaluate(dist: &SyndromeDistribution, formula: Formula) -> Result<KeyRateReport> {
    match formula {
        Formula::Otp => Ok(rate_otp(dist)),
        Formula::OtpHash => Ok(rate_otp_hash(dist)),
        Formula::NoOtp => Ok(rate_no_otp(dist)),
        Formula::InPlace => rate_inplace(dist),
        Formula::ParityOtp => rate_parity_otp(dist),
        Formula::NoiseOtp | Formula::NoiseNoOtp => Err(Error::InvalidParameter(format!(
            "formula {formula} needs a noise parameter"
        ))),
    }
}
