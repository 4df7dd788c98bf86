mod common;

use adkey::asymptotics::repetition_r0_closed_form;
use adkey::channel::BellDiagonal;
use adkey::codes::LinearCode;
use adkey::distribution::syndrome_distribution;
use adkey::eigen::{symmetric_eigenvalues, SymmetricMatrix};
use adkey::entropy::entropy_scaled;
use adkey::gf2::{hamming_distance, BitMatrix};
use adkey::noise::{rate_adding_noise, sigma_entropy, NoiseVariant};
use adkey::rates::{rate_inplace, rate_no_otp, rate_otp, rate_otp_hash, rate_parity_otp};
use common::{Instances, Oracle};

#[test]
fn distribution_and_rate_invariants_on_random_pairs() {
    let mut rng = Instances::new(2024);
    for _ in 0..30 {
        let code = rng.code(8);
        let ch = rng.channel();
        let d = syndrome_distribution(&code, &ch).unwrap();
        let o = Oracle::new(&code, &ch);
        let total: f64 = d.records().iter().map(|r| r.q).sum();
        assert!((total - 1.0).abs() <= 1e-10);
        for r in d.records() {
            let s = r.syndrome.to_string();
            assert!((r.pattern_probs.iter().sum::<f64>() - r.q).abs() <= 1e-10);
            for i in 0..r.patterns.len() {
                assert!((r.phase_row(i).iter().sum::<f64>() - r.pattern_probs[i]).abs() <= 1e-10);
            }
            // chain rule with an independently computed conditional term
            let cond: f64 = (0..r.patterns.len())
                .map(|i| {
                    let key = r.patterns[i].to_string();
                    let cells: Vec<f64> = o.syndromes[&s]
                        .cells
                        .iter()
                        .filter(|((b, _), _)| *b == key)
                        .flat_map(|(_, v)| v.iter().copied())
                        .collect();
                    if r.q > 0.0 {
                        r.pattern_probs[i] / r.q * entropy_scaled(&cells, r.pattern_probs[i])
                    } else {
                        0.0
                    }
                })
                .sum();
            assert!((r.joint_entropy_full - (r.bit_pattern_entropy() + cond)).abs() <= 1e-9);
            assert!(r.joint_entropy_full >= r.joint_entropy_phase_syndrome - 1e-12);
            let savings = r.joint_entropy_full - r.joint_entropy_phase_syndrome;
            assert!(
                (savings - o.savings(&s)).abs() <= 1e-9,
                "{savings} vs {}",
                o.savings(&s)
            );
        }
        let otp = rate_otp(&d);
        let hash = rate_otp_hash(&d);
        let no = rate_no_otp(&d);
        assert!(no.total_rate >= otp.total_rate - 1e-12);
        assert!(hash.total_rate >= otp.total_rate - 1e-12);
        assert!(rate_parity_otp(&d).unwrap().total_rate >= hash.total_rate - 1e-12);
        assert!((rate_inplace(&d).unwrap().total_rate - no.total_rate).abs() <= 1e-12);
        assert!(no.total_rate <= code.k() as f64 / code.n() as f64 + 1e-12);
        assert!(hash.total_rate <= 1.0 + 1e-12);
        assert!((no.total_rate_raw - o.no_otp()).abs() <= 1e-10);
    }
}

#[test]
fn permutation_leaves_syndrome_multiset() {
    let mut rng = Instances::new(9);
    for _ in 0..10 {
        let code = rng.code(7);
        let ch = rng.channel();
        let n = code.n();
        let perm: Vec<usize> = (0..n).rev().collect();
        let h: BitMatrix = code.parity_check().permute_columns(&perm);
        let permuted = LinearCode::from_parity_matrix(h, None).unwrap();
        let mut a = syndrome_distribution(&code, &ch).unwrap().syndrome_probs();
        let mut b = syndrome_distribution(&permuted, &ch).unwrap().syndrome_probs();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn rates_degrade_with_error_rate() {
    for n in 2..=5 {
        let code = LinearCode::repetition(n).unwrap();
        let mut prev = [f64::INFINITY; 3];
        for i in 0..=30 {
            let ch = BellDiagonal::six_state(0.01 * i as f64).unwrap();
            let d = syndrome_distribution(&code, &ch).unwrap();
            let now = [
                rate_otp(&d).total_rate,
                rate_otp_hash(&d).total_rate,
                rate_no_otp(&d).total_rate,
            ];
            for (p, c) in prev.iter().zip(&now) {
                assert!(*c <= p + 1e-12, "rep:{n} at q = {}", 0.01 * i as f64);
            }
            prev = now;
        }
    }
}

#[test]
fn closed_form_equals_pipeline_on_random_channels() {
    let mut rng = Instances::new(77);
    for _ in 0..20 {
        let ch = rng.channel();
        for n in 2..=10 {
            let d = syndrome_distribution(&LinearCode::repetition(n).unwrap(), &ch).unwrap();
            let pipeline = 1.0 - d.records()[0].joint_entropy_phase_syndrome;
            let closed = repetition_r0_closed_form(n, &ch).unwrap();
            assert!((pipeline - closed).abs() <= 1e-10, "n = {n}: {pipeline} vs {closed}");
            let r0 = rate_no_otp(&d).entries[0].r_j;
            if closed > 0.0 {
                assert!((n as f64 * r0 - closed).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn closed_form_non_increasing_in_q() {
    for n in [2, 5, 20, 200] {
        let mut prev = f64::INFINITY;
        for i in 0..=60 {
            let ch = BellDiagonal::bb84(0.005 * i as f64, 0.0).unwrap();
            let v = repetition_r0_closed_form(n, &ch).unwrap();
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }
}

#[test]
fn noise_invariants() {
    let mut rng = Instances::new(5);
    for _ in 0..8 {
        let code = rng.code(6);
        let ch = rng.channel();
        let d = syndrome_distribution(&code, &ch).unwrap();
        for variant in [NoiseVariant::Otp, NoiseVariant::NoOtp] {
            let zero = rate_adding_noise(&d, 0.0, variant).unwrap();
            let plain = match variant {
                NoiseVariant::Otp => rate_otp(&d),
                NoiseVariant::NoOtp => rate_no_otp(&d),
            };
            assert!((zero.report.total_rate_raw - plain.total_rate_raw).abs() <= 1e-12);
        }
        for p in [0.05, 0.2, 0.5] {
            let with = rate_adding_noise(&d, p, NoiseVariant::Otp).unwrap();
            let without = rate_adding_noise(&d, p, NoiseVariant::NoOtp).unwrap();
            assert!(without.report.total_rate >= with.report.total_rate - 1e-12);
            for (rec, pats) in d.records().iter().zip(&without.patterns) {
                let mixed: f64 = pats.iter().map(|x| x.mixed_prob).sum();
                assert!((mixed - rec.q).abs() <= 1e-10);
                for (i, x) in pats.iter().enumerate() {
                    if rec.pattern_probs[i] > 0.0 {
                        assert!(x.sigma_entropy >= -1e-12);
                        assert!(x.sigma_entropy <= rec.phase_syndrome_entropy(i) + 1e-9);
                    }
                }
            }
        }
        // savings cancel the phase term entirely at p = 1/2
        let half = rate_adding_noise(&d, 0.5, NoiseVariant::NoOtp).unwrap();
        for e in &half.report.entries {
            assert!((e.consumption.avg_phase - (code.n() - code.k()) as f64).abs() <= 1e-9);
        }
    }
}

#[test]
fn gram_spectra_are_states() {
    let mut rng = Instances::new(11);
    for k in 1..=5 {
        let syndromes: Vec<_> = (0..1u64 << k)
            .map(|x| adkey::gf2::BitVector::from_pattern(x, k))
            .collect();
        let raw: Vec<f64> = (0..syndromes.len()).map(|_| rng.uniform()).collect();
        let t: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / t).collect();
        let mut prev = 0.0;
        for i in 0..=10 {
            let p = 0.05 * i as f64;
            let gram = SymmetricMatrix::from_fn(w.len(), |a, b| {
                (w[a] * w[b]).sqrt() * (1.0 - 2.0 * p).powi(hamming_distance(&syndromes[a], &syndromes[b]) as i32)
            });
            let ev = symmetric_eigenvalues(&gram).unwrap();
            assert!(ev.iter().all(|&x| x >= -1e-10));
            assert!((ev.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            let s = sigma_entropy(&w, &syndromes, p).unwrap();
            assert!(s >= prev - 1e-9, "k = {k}, p = {p}");
            prev = s;
        }
    }
}
