//! Structured noise added by Alice before error correction.
//!
//! Alice flips her key by a random codeword `G f`, each message bit of `f`
//! set independently with probability `p`. The bit syndrome is unchanged
//! (`H G = 0`), so the bit-pattern mass is convolved within each coset:
//! `q̃(e) = Σ_f p^{|f|} (1-p)^{k-|f|} q(e ⊕ G f)`.
//!
//! The phase register affected by the noise has `k` qubits, one per message
//! bit of `f`: phase syndrome `s^{j'}` maps to the product state
//! `Z^{s^{j'}} |ψ⟩^{⊗k}` with `|ψ⟩ = √(1-p)|0⟩ + √p|1⟩`. Two such states
//! overlap by `(1-2p)^{d(s, s')}`, so the entropy of the mixture is the
//! Shannon entropy of the spectrum of the weighted Gram matrix.

use serde::{Deserialize, Serialize};

use crate::distribution::{SyndromeDistribution, SyndromeRecord};
use crate::eigen::{symmetric_eigenvalues, SymmetricMatrix};
use crate::entropy::{compensated_sum, entropy_of, entropy_scaled};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2::{hamming_distance, BitVector};
use crate::rates::{entry, Formula, KeyRateReport};

pub const MAX_K: usize = 9;
pub const MAX_N: usize = 12;
const GRID_POINTS: usize = 101;
const P_RESOLUTION: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseVariant {
    Otp,
    NoOtp,
}

impl NoiseVariant {
    pub fn formula(self) -> Formula {
        match self {
            NoiseVariant::Otp => Formula::NoiseOtp,
            NoiseVariant::NoOtp => Formula::NoiseNoOtp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternNoise {
    pub mixed_prob: f64,
    pub sigma_entropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseAnalysis {
    pub p: f64,
    pub variant: NoiseVariant,
    /// Indexed like the distribution records and their coset patterns.
    pub patterns: Vec<Vec<PatternNoise>>,
    pub report: KeyRateReport,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "noise probability {p} is not in [0, 0.5]"
        )));
    }
    Ok(())
}

fn codeword_masks(dist: &SyndromeDistribution) -> Vec<(u64, u32)> {
    let code = dist.code();
    let k = code.k();
    let cols: Vec<u64> = (0..k).map(|c| code.generator().column(c).to_pattern()).collect();
    (0..1u64 << k)
        .map(|f| {
            let word = (0..k)
                .filter(|&b| (f >> (k - 1 - b)) & 1 == 1)
                .fold(0u64, |acc, b| acc ^ cols[b]);
            (word, f.count_ones())
        })
        .collect()
}

fn mix_record(
    dist: &SyndromeDistribution,
    j: usize,
    record: &SyndromeRecord,
    words: &[(u64, u32)],
    p: f64,
) -> Vec<f64> {
    let k = dist.k() as i32;
    let part = dist.bit_partition();
    let coset = &part.cosets[j];
    coset
        .iter()
        .map(|&e| {
            compensated_sum(words.iter().map(|&(c, w)| {
                let pf = p.powi(w as i32) * (1.0 - p).powi(k - w as i32);
                pf * record.pattern_probs[part.position_of[(e ^ c) as usize] as usize]
            }))
        })
        .collect()
}

/// Coset-mixed bit-pattern probabilities `q̃^j_i`, shaped like the records.
pub fn mixed_bit_distribution(dist: &SyndromeDistribution, p: f64) -> Result<Vec<Vec<f64>>> {
    check_p(p)?;
    let words = codeword_masks(dist);
    Ok(dist
        .records()
        .iter()
        .enumerate()
        .map(|(j, r)| mix_record(dist, j, r, &words, p))
        .collect())
}

/// Von Neumann entropy of `Σ w_{j'} |ψ^{j'}⟩⟨ψ^{j'}|` in bits.
pub fn sigma_entropy(weights: &[f64], syndromes: &[BitVector], p: f64) -> Result<f64> {
    check_p(p)?;
    if weights.len() != syndromes.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} syndromes",
            weights.len(),
            syndromes.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0 || w.is_nan()) {
        return Err(Error::InvalidParameter("negative mixture weight".into()));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let live: Vec<usize> = (0..weights.len()).filter(|&a| weights[a] > 0.0).collect();
    if live.len() <= 1 {
        return Ok(0.0);
    }
    let overlap = 1.0 - 2.0 * p;
    let gram = SymmetricMatrix::from_fn(live.len(), |a, b| {
        let (x, y) = (live[a], live[b]);
        let d = hamming_distance(&syndromes[x], &syndromes[y]) as i32;
        (weights[x] * weights[y]).sqrt() * overlap.powi(d)
    });
    let spectrum: Vec<f64> = symmetric_eigenvalues(&gram)?.into_iter().map(|v| v.max(0.0)).collect();
    let total: f64 = spectrum.iter().sum();
    Ok(entropy_of(&spectrum.iter().map(|v| v / total).collect::<Vec<_>>()))
}

fn check_size(dist: &SyndromeDistribution) -> Result<()> {
    if dist.k() > MAX_K {
        return Err(Error::SizeLimit {
            what: "k",
            value: dist.k(),
            limit: MAX_K,
        });
    }
    if dist.n() > MAX_N {
        return Err(Error::SizeLimit {
            what: "n",
            value: dist.n(),
            limit: MAX_N,
        });
    }
    Ok(())
}

/// Key rate after adding structured noise with probability `p`.
pub fn rate_adding_noise(dist: &SyndromeDistribution, p: f64, variant: NoiseVariant) -> Result<NoiseAnalysis> {
    check_p(p)?;
    check_size(dist)?;
    let n = dist.n();
    let redundancy = (n - dist.k()) as f64;
    let words = codeword_masks(dist);
    let per_syndrome = Exec::default().map_range(dist.records().len(), |j| -> Result<_> {
        let rec = &dist.records()[j];
        let mixed = mix_record(dist, j, rec, &words, p);
        let mut patterns = Vec::with_capacity(mixed.len());
        let mut terms = Vec::with_capacity(mixed.len());
        for (i, &m) in mixed.iter().enumerate() {
            let qi = rec.pattern_probs[i];
            let sigma = if qi > 0.0 {
                let w: Vec<f64> = rec.phase_row(i).iter().map(|x| x / qi).collect();
                sigma_entropy(&w, dist.phase_syndromes(), p)?
            } else {
                0.0
            };
            if qi > 0.0 && rec.q > 0.0 {
                let base = match variant {
                    NoiseVariant::Otp => rec.pattern_phase_entropy[i],
                    NoiseVariant::NoOtp => rec.phase_syndrome_entropy(i),
                };
                terms.push(qi / rec.q * (base - sigma));
            }
            patterns.push(PatternNoise {
                mixed_prob: m,
                sigma_entropy: sigma,
            });
        }
        let bit = entropy_scaled(&mixed, rec.q);
        let mut avg = compensated_sum(terms);
        if variant == NoiseVariant::NoOtp {
            avg += redundancy;
        }
        Ok((patterns, entry(rec, n, bit, avg)))
    });
    let mut patterns = Vec::with_capacity(per_syndrome.len());
    let mut entries = Vec::with_capacity(per_syndrome.len());
    for item in per_syndrome {
        let (pat, e) = item?;
        patterns.push(pat);
        entries.push(e);
    }
    let overhead = match variant {
        NoiseVariant::Otp => redundancy / n as f64,
        NoiseVariant::NoOtp => 0.0,
    };
    let mut report = KeyRateReport::assemble(variant.formula(), dist, entries, overhead);
    report.params.noise_p = Some(p);
    Ok(NoiseAnalysis {
        p,
        variant,
        patterns,
        report,
    })
}

/// Maximizes a function of `p ∈ [0, 0.5]` by a 101-point grid followed by a
/// golden-section refinement around the best grid point.
pub(crate) fn maximize_over_p<F>(f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| 0.5 * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let values = Exec::default()
        .map_slice(&grid, |&p| f(p))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let (mut best_i, mut best_v) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v > best_v {
            best_i = i;
            best_v = v;
        }
    }
    let step = grid[1] - grid[0];
    let lo = (grid[best_i] - step).max(0.0);
    let hi = (grid[best_i] + step).min(0.5);
    let (p, v) = crate::optimizer::golden_section_max(&f, lo, hi, P_RESOLUTION)?;
    if v > best_v {
        Ok((p, v))
    } else {
        Ok((grid[best_i], best_v))
    }
}

/// Best noise probability for a fixed channel, scored by the raw total.
pub fn optimize_noise(dist: &SyndromeDistribution, variant: NoiseVariant) -> Result<(f64, NoiseAnalysis)> {
    check_size(dist)?;
    let (p, _) = maximize_over_p(|p| Ok(rate_adding_noise(dist, p, variant)?.report.total_rate_raw))?;
    Ok((p, rate_adding_noise(dist, p, variant)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::BellDiagonal;
    use crate::codes::LinearCode;
    use crate::distribution::syndrome_distribution;
    use crate::rates::{rate_no_otp, rate_otp};
    use approx::assert_abs_diff_eq;

    fn six(q: f64) -> BellDiagonal {
        BellDiagonal::six_state(q).unwrap()
    }

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn mixing_examples() {
        let d = syndrome_distribution(&LinearCode::repetition(2).unwrap(), &six(0.1)).unwrap();
        let zero = mixed_bit_distribution(&d, 0.0).unwrap();
        for (m, r) in zero.iter().zip(d.records()) {
            assert_eq!(m, &r.pattern_probs);
        }
        let half = mixed_bit_distribution(&d, 0.5).unwrap();
        assert_abs_diff_eq!(half[0][0], 0.41, epsilon = 1e-15);
        assert_abs_diff_eq!(half[0][1], 0.41, epsilon = 1e-15);

        let d3 = syndrome_distribution(&LinearCode::repetition(3).unwrap(), &six(0.1)).unwrap();
        let m = mixed_bit_distribution(&d3, 0.1).unwrap();
        assert_abs_diff_eq!(m[0][0], 0.9 * 0.9f64.powi(3) + 0.1 * 0.1f64.powi(3), epsilon = 1e-12);
        for (row, r) in m.iter().zip(d3.records()) {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), r.q, epsilon = 1e-12);
        }
    }

    #[test]
    fn sigma_limits() {
        let s = [bv("0"), bv("1")];
        assert_eq!(sigma_entropy(&[0.9, 0.1], &s, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            sigma_entropy(&[0.9, 0.1], &s, 0.5).unwrap(),
            crate::entropy::h2(0.1),
            epsilon = 1e-12
        );
        let lambda = 0.5 + (0.16f64 + 0.0576).sqrt();
        assert_abs_diff_eq!(
            sigma_entropy(&[0.9, 0.1], &s, 0.1).unwrap(),
            crate::entropy::h2(lambda),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(sigma_entropy(&[0.9, 0.1], &s, 0.1).unwrap(), 0.2118, epsilon = 2e-3);
        assert!(sigma_entropy(&[1.0], &s, 0.1).is_err());
        assert!(sigma_entropy(&[0.5, 0.5], &s, 0.6).is_err());
    }

    #[test]
    fn zero_noise_reproduces_plain_formulas() {
        let ch = BellDiagonal::bb84(0.08, 0.01).unwrap();
        for code in [
            LinearCode::hamming743(),
            LinearCode::repetition(3).unwrap(),
            LinearCode::full(2).unwrap(),
        ] {
            let d = syndrome_distribution(&code, &ch).unwrap();
            let a = rate_adding_noise(&d, 0.0, NoiseVariant::NoOtp).unwrap();
            assert!((a.report.total_rate_raw - rate_no_otp(&d).total_rate_raw).abs() < 1e-12);
            let b = rate_adding_noise(&d, 0.0, NoiseVariant::Otp).unwrap();
            assert!((b.report.total_rate_raw - rate_otp(&d).total_rate_raw).abs() < 1e-12);
            assert!(a.patterns.iter().flatten().all(|x| x.sigma_entropy == 0.0));
        }
    }

    #[test]
    fn full_code_six_state_threshold_moves() {
        let d = syndrome_distribution(&LinearCode::full(1).unwrap(), &six(0.14)).unwrap();
        assert!(rate_no_otp(&d).total_rate_raw <= 0.0);
        let (p, a) = optimize_noise(&d, NoiseVariant::NoOtp).unwrap();
        assert!(p > 0.0);
        assert!(a.report.total_rate > 0.0, "{}", a.report.total_rate);
    }

    #[test]
    fn noiseless_prefers_no_noise() {
        let d = syndrome_distribution(&LinearCode::repetition(2).unwrap(), &BellDiagonal::noiseless()).unwrap();
        let (p, a) = optimize_noise(&d, NoiseVariant::NoOtp).unwrap();
        assert_eq!(p, 0.0);
        assert_abs_diff_eq!(a.report.total_rate, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn size_guard() {
        let d = syndrome_distribution(&LinearCode::single_parity(11).unwrap(), &six(0.1)).unwrap();
        assert!(rate_adding_noise(&d, 0.1, NoiseVariant::NoOtp).is_err());
    }
}
