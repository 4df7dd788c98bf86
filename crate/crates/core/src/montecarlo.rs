//! Seeded sampling checks: empirical syndrome frequencies against the exact
//! distribution, and error identification by random linear hashing.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`). Work is split into
//! fixed-size shards; shard `s` uses `seed_from_u64(seed)` with stream `s`,
//! so results do not depend on the number of worker threads. A uniform
//! double is `(next_u64 >> 11) * 2^-53`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::BellDiagonal;
use crate::codes::{partition, LinearCode};
use crate::distribution::SyndromeDistribution;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2::BitVector;

pub const SAMPLE_SHARD: usize = 1 << 16;
pub const TRIAL_SHARD: usize = 1 << 14;
pub const MAX_PATTERN_LEN: usize = 64;
/// `|T|` may be at most this multiple of `2^k`.
pub const ERROR_SET_FACTOR: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    #[serde(serialize_with = "label")]
    pub code: LinearCode,
    pub channel: BellDiagonal,
}

fn label<S: serde::Serializer>(code: &LinearCode, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(code.label())
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index below `len` by multiply-shift.
#[inline]
fn index_below(rng: &mut ChaCha8Rng, len: usize) -> usize {
    ((rng.next_u64() as u128 * len as u128) >> 64) as usize
}

struct PairSampler {
    n: usize,
    cut: [f64; 3],
}

impl PairSampler {
    fn new(n: usize, ch: &BellDiagonal) -> Self {
        Self {
            n,
            cut: [ch.p00, ch.p00 + ch.p01, ch.p00 + ch.p01 + ch.p10],
        }
    }

    /// One `(bit, phase)` pattern pair, qubit 0 in the most significant bit.
    fn draw(&self, rng: &mut ChaCha8Rng) -> (u64, u64) {
        let (mut b, mut p) = (0u64, 0u64);
        for _ in 0..self.n {
            let u = uniform(rng);
            let (eb, ep) = if u < self.cut[0] {
                (0, 0)
            } else if u < self.cut[1] {
                (0, 1)
            } else if u < self.cut[2] {
                (1, 0)
            } else {
                (1, 1)
            };
            b = (b << 1) | eb;
            p = (p << 1) | ep;
        }
        (b, p)
    }
}

fn check_config(cfg: &McConfig) -> Result<()> {
    if cfg.samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    if cfg.code.n() > MAX_PATTERN_LEN {
        return Err(Error::SizeLimit {
            what: "n",
            value: cfg.code.n(),
            limit: MAX_PATTERN_LEN,
        });
    }
    Ok(())
}

fn shards(total: usize, size: usize) -> Vec<(usize, usize)> {
    (0..total.div_ceil(size))
        .map(|s| (s, size.min(total - s * size)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub bit: BitVector,
    pub phase: BitVector,
}

/// `cfg.samples` i.i.d. error-pattern pairs in sample order.
pub fn sample_error_patterns(cfg: &McConfig) -> Result<Vec<ErrorSample>> {
    sample_error_patterns_with(cfg, Exec::default())
}

pub fn sample_error_patterns_with(cfg: &McConfig, exec: Exec) -> Result<Vec<ErrorSample>> {
    check_config(cfg)?;
    let n = cfg.code.n();
    let sampler = PairSampler::new(n, &cfg.channel);
    let chunks = exec.map_slice(&shards(cfg.samples, SAMPLE_SHARD), |&(s, len)| {
        let mut rng = shard_rng(cfg.seed, s);
        (0..len).map(|_| sampler.draw(&mut rng)).collect::<Vec<_>>()
    });
    Ok(chunks
        .into_iter()
        .flatten()
        .map(|(b, p)| ErrorSample {
            bit: BitVector::from_pattern(b, n),
            phase: BitVector::from_pattern(p, n),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeStat {
    pub syndrome: BitVector,
    pub count: u64,
    pub empirical: f64,
    pub analytic: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeStats {
    pub seed: u64,
    pub samples: usize,
    /// Empirical bit and phase error rates per qubit.
    pub delta_b: f64,
    pub delta_p: f64,
    pub syndromes: Vec<SyndromeStat>,
}

impl SyndromeStats {
    pub fn max_abs_z(&self) -> f64 {
        self.syndromes.iter().map(|s| s.z.abs()).fold(0.0, f64::max)
    }
}

fn z_score(empirical: f64, analytic: f64, samples: usize) -> f64 {
    let var = analytic * (1.0 - analytic) / samples as f64;
    if var > 0.0 {
        (empirical - analytic) / var.sqrt()
    } else if empirical == analytic {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Bit-syndrome frequencies with z-scores against `dist`.
pub fn empirical_syndrome_stats(cfg: &McConfig, dist: &SyndromeDistribution) -> Result<SyndromeStats> {
    empirical_syndrome_stats_with(cfg, dist, Exec::default())
}

pub fn empirical_syndrome_stats_with(cfg: &McConfig, dist: &SyndromeDistribution, exec: Exec) -> Result<SyndromeStats> {
    check_config(cfg)?;
    if dist.code().parity_check() != cfg.code.parity_check() || dist.n() != cfg.code.n() {
        return Err(Error::InvalidParameter(
            "distribution was computed for a different code".into(),
        ));
    }
    if dist.channel() != &cfg.channel {
        return Err(Error::InvalidParameter(
            "distribution was computed for a different channel".into(),
        ));
    }
    let n = cfg.code.n();
    let part = partition(cfg.code.parity_check());
    let count = part.cosets.len();
    let sampler = PairSampler::new(n, &cfg.channel);
    let per_shard = exec.map_slice(&shards(cfg.samples, SAMPLE_SHARD), |&(s, len)| {
        let mut rng = shard_rng(cfg.seed, s);
        let mut hist = vec![0u64; count];
        let (mut bits, mut phases) = (0u64, 0u64);
        for _ in 0..len {
            let (b, p) = sampler.draw(&mut rng);
            hist[part.syndrome_of[b as usize] as usize] += 1;
            bits += b.count_ones() as u64;
            phases += p.count_ones() as u64;
        }
        (hist, bits, phases)
    });
    let mut hist = vec![0u64; count];
    let (mut bits, mut phases) = (0u64, 0u64);
    for (h, b, p) in per_shard {
        for (acc, x) in hist.iter_mut().zip(h) {
            *acc += x;
        }
        bits += b;
        phases += p;
    }
    let total = cfg.samples as f64;
    let syndromes = dist
        .records()
        .iter()
        .zip(hist)
        .map(|(r, c)| {
            let empirical = c as f64 / total;
            SyndromeStat {
                syndrome: r.syndrome.clone(),
                count: c,
                empirical,
                analytic: r.q,
                z: z_score(empirical, r.q, cfg.samples),
            }
        })
        .collect();
    Ok(SyndromeStats {
        seed: cfg.seed,
        samples: cfg.samples,
        delta_b: bits as f64 / (total * n as f64),
        delta_p: phases as f64 / (total * n as f64),
        syndromes,
    })
}

/// The set `T` of candidate error patterns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorSet {
    WeightAtMost(usize),
    Explicit(Vec<BitVector>),
}

impl ErrorSet {
    fn materialize(&self, n: usize) -> Result<Vec<u64>> {
        let mut out = match self {
            ErrorSet::WeightAtMost(w) => {
                if n > 24 {
                    let size: u128 = (0..=(*w).min(n)).map(|i| binomial(n, i)).sum();
                    if size > (1u128 << 24) {
                        return Err(Error::SizeLimit {
                            what: "error set size",
                            value: usize::try_from(size).unwrap_or(usize::MAX),
                            limit: 1 << 24,
                        });
                    }
                }
                weight_patterns(n, *w)
            }
            ErrorSet::Explicit(list) => {
                let mut v = Vec::with_capacity(list.len());
                for e in list {
                    if e.len() != n {
                        return Err(Error::Dimension(format!(
                            "error pattern of length {} for n = {n}",
                            e.len()
                        )));
                    }
                    v.push(e.to_pattern());
                }
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        out.shrink_to_fit();
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `n`-bit patterns of weight at most `w`, by weight then value.
fn weight_patterns(n: usize, w: usize) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut frontier = vec![0u64];
    for _ in 0..w.min(n) {
        let mut next = Vec::new();
        for &e in &frontier {
            let low = if e == 0 { n } else { e.trailing_zeros() as usize };
            for b in 0..low {
                next.push(e | (1u64 << b));
            }
        }
        next.sort_unstable();
        out.extend_from_slice(&next);
        frontier = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HashLabResult {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub error_set_size: usize,
    pub trials: usize,
    pub failures: u64,
    pub empirical_failure: f64,
    /// `|T| / 2^k`.
    pub bound: f64,
    /// Four-sigma sampling allowance `4 √(bound / trials)`.
    pub slack: f64,
}

impl HashLabResult {
    pub fn within_bound(&self) -> bool {
        self.empirical_failure <= self.bound + self.slack
    }
}

/// Hashes a random element of `T` with a fresh uniformly random `k × n`
/// matrix per trial and counts trials where another element of `T` shares
/// its hash value.
pub fn hash_identification_experiment(
    n: usize,
    k: usize,
    error_set: &ErrorSet,
    trials: usize,
    seed: u64,
) -> Result<HashLabResult> {
    hash_identification_experiment_with(n, k, error_set, trials, seed, Exec::default())
}

pub fn hash_identification_experiment_with(
    n: usize,
    k: usize,
    error_set: &ErrorSet,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<HashLabResult> {
    if n == 0 || n > MAX_PATTERN_LEN {
        return Err(Error::InvalidParameter(format!("n = {n} is not in 1..=64")));
    }
    if k == 0 || k > 63 {
        return Err(Error::InvalidParameter(format!("k = {k} is not in 1..=63")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let set = error_set.materialize(n)?;
    if set.is_empty() {
        return Err(Error::InvalidParameter("empty error set".into()));
    }
    let cap = (1u128 << k) * ERROR_SET_FACTOR as u128;
    if set.len() as u128 > cap {
        return Err(Error::SizeLimit {
            what: "error set size",
            value: set.len(),
            limit: usize::try_from(cap).unwrap_or(usize::MAX),
        });
    }
    let col_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let per_shard = exec.map_slice(&shards(trials, TRIAL_SHARD), |&(s, len)| {
        let mut rng = shard_rng(seed, s);
        let mut rows = vec![0u64; k];
        let mut failures = 0u64;
        for _ in 0..len {
            for r in rows.iter_mut() {
                *r = rng.next_u64() & col_mask;
            }
            let truth = set[index_below(&mut rng, set.len())];
            let hash = |e: u64| {
                rows.iter()
                    .fold(0u64, |h, r| (h << 1) | ((r & e).count_ones() & 1) as u64)
            };
            let target = hash(truth);
            if set.iter().any(|&e| e != truth && hash(e) == target) {
                failures += 1;
            }
        }
        failures
    });
    let failures: u64 = per_shard.into_iter().sum();
    let bound = set.len() as f64 / (k as f64).exp2();
    Ok(HashLabResult {
        n,
        k,
        seed,
        error_set_size: set.len(),
        trials,
        failures,
        empirical_failure: failures as f64 / trials as f64,
        bound,
        slack: 4.0 * (bound / trials as f64).sqrt(),
    })
}
