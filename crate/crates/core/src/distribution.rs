//! Exact enumeration of the syndrome probability hierarchy.
//!
//! For every bit-error syndrome `j` and every bit pattern `i` in its coset
//! the enumerator records `q^j_i` and the joint probabilities `q^{jj'}_i`
//! with each phase syndrome `j'`. The full joint `q^{jj'}_{ii'}` over phase
//! patterns is never stored; its entropy is streamed per bit pattern.

use serde::Serialize;

use crate::channel::BellDiagonal;
use crate::codes::{check_table_size, partition, LinearCode, Partition, TABLE_LIMIT};
use crate::entropy::{compensated_sum, entropy_scaled, xlog2x, CompensatedSum};
use crate::error::Result;
use crate::exec::Exec;
use crate::gf2::BitVector;

#[derive(Clone, Debug, Serialize)]
pub struct SyndromeRecord {
    pub syndrome: BitVector,
    /// `q^j`.
    pub q: f64,
    /// Coset patterns `e^j_i`, minimum weight first.
    pub patterns: Vec<BitVector>,
    /// `q^j_i`, aligned with `patterns`.
    pub pattern_probs: Vec<f64>,
    /// `q^{jj'}_i` row-major: entry `i * 2^k + j'`.
    pub phase_syndrome_probs: Vec<f64>,
    /// Entropy of the phase pattern given bit pattern `i`, in bits.
    pub pattern_phase_entropy: Vec<f64>,
    /// `h({q^{jj'}_{ii'} / q^j})` over `(i, j', i')`.
    pub joint_entropy_full: f64,
    /// `h({q^{jj'}_i / q^j})` over `(i, j')`.
    pub joint_entropy_phase_syndrome: f64,
}

impl SyndromeRecord {
    pub fn phase_syndrome_count(&self) -> usize {
        self.phase_syndrome_probs.len() / self.pattern_probs.len()
    }

    /// `q^{jj'}_i` for fixed `i`, over `j'`.
    pub fn phase_row(&self, i: usize) -> &[f64] {
        let w = self.phase_syndrome_count();
        &self.phase_syndrome_probs[i * w..(i + 1) * w]
    }

    /// `q^j_i / q^j`.
    pub fn pattern_weights(&self) -> Vec<f64> {
        if self.q <= 0.0 {
            return vec![0.0; self.pattern_probs.len()];
        }
        self.pattern_probs.iter().map(|x| x / self.q).collect()
    }

    /// `I_b^j = h({q^j_i / q^j})`.
    pub fn bit_pattern_entropy(&self) -> f64 {
        entropy_scaled(&self.pattern_probs, self.q)
    }

    /// `h({q^{jj'}_i / q^j_i})_{j'}`.
    pub fn phase_syndrome_entropy(&self, i: usize) -> f64 {
        entropy_scaled(self.phase_row(i), self.pattern_probs[i])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SyndromeDistribution {
    #[serde(serialize_with = "serialize_code_label")]
    code: LinearCode,
    channel: BellDiagonal,
    /// Phase syndromes `s^{j'}` (length `k`) in index order.
    phase_syndromes: Vec<BitVector>,
    records: Vec<SyndromeRecord>,
    #[serde(skip)]
    bit_partition: Partition,
}

fn serialize_code_label<S: serde::Serializer>(code: &LinearCode, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(code.label())
}

struct PatternStats {
    marginal: f64,
    cells: Vec<f64>,
    sum_xlogx: f64,
}

/// Enumerates the hierarchy for `code` under the i.i.d. channel.
pub fn syndrome_distribution(code: &LinearCode, channel: &BellDiagonal) -> Result<SyndromeDistribution> {
    syndrome_distribution_with(code, channel, Exec::default())
}

pub fn syndrome_distribution_with(
    code: &LinearCode,
    channel: &BellDiagonal,
    exec: Exec,
) -> Result<SyndromeDistribution> {
    check_table_size(code.n(), TABLE_LIMIT)?;
    let n = code.n();
    let gt = code.generator().transpose();
    let bit_part = partition(code.parity_check());
    let phase_part = partition(&gt);
    let phase_count = phase_part.cosets.len();
    let table = channel.table();

    let stats = exec.map_range(1usize << n, |eb| {
        let eb = eb as u64;
        let mut probs = Vec::with_capacity(1 << n);
        probs.push(1.0f64);
        let mut marginal = 1.0f64;
        for m in 0..n {
            let row = table[((eb >> (n - 1 - m)) & 1) as usize];
            marginal *= row[0] + row[1];
            let len = probs.len();
            probs.resize(2 * len, 0.0);
            // expand in place from the top so (x << 1) | b never overwrites unread x
            for x in (0..len).rev() {
                let v = probs[x];
                probs[2 * x] = v * row[0];
                probs[2 * x + 1] = v * row[1];
            }
        }
        let mut cells = vec![CompensatedSum::default(); phase_count];
        let mut slog = CompensatedSum::default();
        for (ep, &v) in probs.iter().enumerate() {
            cells[phase_part.syndrome_of[ep] as usize].add(v);
            slog.add(xlog2x(v));
        }
        PatternStats {
            marginal,
            cells: cells.iter().map(CompensatedSum::value).collect(),
            sum_xlogx: slog.value(),
        }
    });

    let records = bit_part
        .cosets
        .iter()
        .enumerate()
        .map(|(j, coset)| {
            let pattern_probs: Vec<f64> = coset.iter().map(|&e| stats[e as usize].marginal).collect();
            let q = compensated_sum(pattern_probs.iter().copied());
            let mut phase_syndrome_probs = Vec::with_capacity(coset.len() * phase_count);
            for &e in coset {
                phase_syndrome_probs.extend_from_slice(&stats[e as usize].cells);
            }
            let pattern_phase_entropy = coset
                .iter()
                .map(|&e| {
                    let s = &stats[e as usize];
                    if s.marginal > 0.0 {
                        (s.marginal.log2() - s.sum_xlogx / s.marginal).max(0.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            let joint_entropy_full = if q > 0.0 {
                let s = compensated_sum(coset.iter().map(|&e| stats[e as usize].sum_xlogx));
                (q.log2() - s / q).max(0.0)
            } else {
                0.0
            };
            let joint_entropy_phase_syndrome = entropy_scaled(&phase_syndrome_probs, q);
            SyndromeRecord {
                syndrome: bit_part.syndrome_vector(code.parity_check(), j),
                q,
                patterns: coset.iter().map(|&e| BitVector::from_pattern(e, n)).collect(),
                pattern_probs,
                phase_syndrome_probs,
                pattern_phase_entropy,
                joint_entropy_full,
                joint_entropy_phase_syndrome,
            }
        })
        .collect();

    Ok(SyndromeDistribution {
        code: code.clone(),
        channel: *channel,
        phase_syndromes: (0..phase_count).map(|j| phase_part.syndrome_vector(&gt, j)).collect(),
        records,
        bit_partition: bit_part,
    })
}

impl SyndromeDistribution {
    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn channel(&self) -> &BellDiagonal {
        &self.channel
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn k(&self) -> usize {
        self.code.k()
    }

    pub fn records(&self) -> &[SyndromeRecord] {
        &self.records
    }

    pub fn phase_syndromes(&self) -> &[BitVector] {
        &self.phase_syndromes
    }

    /// `{q^j}` in syndrome order.
    pub fn syndrome_probs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.q).collect()
    }

    /// `h({q^j})`.
    pub fn syndrome_entropy(&self) -> f64 {
        crate::entropy::entropy_of(&self.syndrome_probs())
    }

    pub(crate) fn bit_partition(&self) -> &Partition {
        &self.bit_partition
    }
}
