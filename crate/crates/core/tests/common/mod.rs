//! Brute-force reference: enumerates every joint (bit, phase) error pattern
//! with explicit matrix-vector products and plain hash maps.

#![allow(dead_code)]

use std::collections::BTreeMap;

use adkey::channel::BellDiagonal;
use adkey::codes::LinearCode;
use adkey::gf2::{mat_vec_mul, BitVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct OracleSyndrome {
    pub q: f64,
    /// bit pattern -> probability
    pub bit: BTreeMap<String, f64>,
    /// (bit pattern, phase syndrome) -> probability
    pub bit_phase_syndrome: BTreeMap<(String, String), f64>,
    /// (bit pattern, phase syndrome) -> list of joint probabilities over phase patterns
    pub cells: BTreeMap<(String, String), Vec<f64>>,
}

pub struct Oracle {
    pub n: usize,
    pub k: usize,
    pub syndromes: BTreeMap<String, OracleSyndrome>,
}

fn h(values: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let x = v / total;
            -x * x.log2()
        })
        .sum()
}

fn bits(x: usize, n: usize) -> BitVector {
    BitVector::from_bits(&(0..n).map(|i| (x >> i) & 1 == 1).collect::<Vec<_>>())
}

impl Oracle {
    pub fn new(code: &LinearCode, ch: &BellDiagonal) -> Self {
        let n = code.n();
        let gt = code.generator().transpose();
        let table = ch.table();
        let mut syndromes: BTreeMap<String, OracleSyndrome> = BTreeMap::new();
        for xb in 0..(1usize << n) {
            let eb = bits(xb, n);
            let sb = mat_vec_mul(code.parity_check(), &eb).unwrap().to_string();
            for xp in 0..(1usize << n) {
                let ep = bits(xp, n);
                let sp = mat_vec_mul(&gt, &ep).unwrap().to_string();
                let mut prob = 1.0;
                for m in 0..n {
                    prob *= table[eb.get(m) as usize][ep.get(m) as usize];
                }
                let entry = syndromes.entry(sb.clone()).or_insert_with(|| OracleSyndrome {
                    q: 0.0,
                    bit: BTreeMap::new(),
                    bit_phase_syndrome: BTreeMap::new(),
                    cells: BTreeMap::new(),
                });
                entry.q += prob;
                *entry.bit.entry(eb.to_string()).or_insert(0.0) += prob;
                *entry
                    .bit_phase_syndrome
                    .entry((eb.to_string(), sp.clone()))
                    .or_insert(0.0) += prob;
                entry.cells.entry((eb.to_string(), sp)).or_default().push(prob);
            }
        }
        Oracle {
            n,
            k: code.k(),
            syndromes,
        }
    }

    pub fn h_full(&self, s: &str) -> f64 {
        let e = &self.syndromes[s];
        let all: Vec<f64> = e.cells.values().flatten().copied().collect();
        h(&all, e.q)
    }

    pub fn h_phase_syndrome(&self, s: &str) -> f64 {
        let e = &self.syndromes[s];
        let v: Vec<f64> = e.bit_phase_syndrome.values().copied().collect();
        h(&v, e.q)
    }

    pub fn h_bit(&self, s: &str) -> f64 {
        let e = &self.syndromes[s];
        let v: Vec<f64> = e.bit.values().copied().collect();
        h(&v, e.q)
    }

    /// Σ_{i,j'} (q^{jj'}_i / q^j) h(phase pattern | i, j').
    pub fn savings(&self, s: &str) -> f64 {
        let e = &self.syndromes[s];
        if e.q <= 0.0 {
            return 0.0;
        }
        e.cells
            .values()
            .map(|cell| {
                let t: f64 = cell.iter().sum();
                t / e.q * h(cell, t)
            })
            .sum()
    }

    pub fn syndrome_entropy(&self) -> f64 {
        let v: Vec<f64> = self.syndromes.values().map(|e| e.q).collect();
        h(&v, 1.0)
    }

    fn sum_rates<F: Fn(&str) -> f64>(&self, r: F) -> f64 {
        self.syndromes.iter().map(|(s, e)| e.q * r(s).max(0.0)).sum()
    }

    pub fn otp(&self) -> f64 {
        let n = self.n as f64;
        self.sum_rates(|s| 1.0 - self.h_full(s) / n) - (self.n - self.k) as f64 / n
    }

    pub fn otp_hash(&self) -> f64 {
        let n = self.n as f64;
        self.sum_rates(|s| 1.0 - self.h_full(s) / n) - self.syndrome_entropy() / n
    }

    pub fn no_otp(&self) -> f64 {
        let n = self.n as f64;
        self.sum_rates(|s| self.k as f64 / n - self.h_phase_syndrome(s) / n)
    }
}

/// Deterministic source of random test instances.
pub struct Instances(ChaCha8Rng);

impl Instances {
    pub fn new(seed: u64) -> Self {
        Instances(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, m: usize) -> usize {
        (self.0.next_u64() % m as u64) as usize
    }

    /// A channel with p00 in [0.5, 1).
    pub fn channel(&mut self) -> BellDiagonal {
        let noise = 0.5 * self.uniform();
        let w: Vec<f64> = (0..3).map(|_| self.uniform() + 1e-3).collect();
        let t: f64 = w.iter().sum();
        BellDiagonal::from_probs(1.0 - noise, noise * w[0] / t, noise * w[1] / t, noise * w[2] / t).unwrap()
    }

    /// A random full-rank code with `n <= max_n`.
    pub fn code(&mut self, max_n: usize) -> LinearCode {
        loop {
            let n = 2 + self.below(max_n - 1);
            let r = 1 + self.below(n - 1);
            let rows: Vec<String> = (0..r)
                .map(|_| {
                    (0..n)
                        .map(|_| if self.0.next_u64() & 1 == 1 { '1' } else { '0' })
                        .collect()
                })
                .collect();
            let h = adkey::gf2::BitMatrix::parse_rows(&rows).unwrap();
            if let Ok(code) = LinearCode::from_parity_matrix(h, None) {
                return code;
            }
        }
    }
}
