use adkey::asymptotics::{first_positive_n, numeric_threshold, Family, ThresholdQuery};
use adkey::channel::BellDiagonal;
use adkey::codes::LinearCode;
use adkey::noise::NoiseVariant;
use adkey::optimizer::{crossover, noise_rate_at, NoiseP};
use adkey::protocol::{ChannelSpec, Protocol, Q11};
use adkey::rates::Formula;

fn query(protocol: Protocol, family: Family, max_n: usize, closed_form: bool) -> ThresholdQuery {
    ThresholdQuery {
        protocol,
        formula: Formula::NoOtp,
        family,
        max_n,
        resolution: 1e-5,
        closed_form,
    }
}

#[test]
fn one_way_thresholds() {
    let bb = numeric_threshold(&query(Protocol::Bb84, Family::Full, 1, false)).unwrap();
    assert!((bb.threshold_q - 0.110).abs() <= 1e-3, "{}", bb.threshold_q);
    let six = numeric_threshold(&query(Protocol::SixState, Family::Full, 1, false)).unwrap();
    assert!((six.threshold_q - 0.127).abs() <= 1e-3, "{}", six.threshold_q);
    assert!(bb.witness.unwrap().rate > 0.0);
}

#[test]
fn closed_form_thresholds() {
    let bb = numeric_threshold(&query(Protocol::Bb84, Family::Repetition, 2000, true)).unwrap();
    assert!((bb.threshold_q - 0.2).abs() <= 1e-3, "{}", bb.threshold_q);
    let six = numeric_threshold(&query(Protocol::SixState, Family::Repetition, 2000, true)).unwrap();
    assert!((six.threshold_q - 0.276393).abs() <= 1e-3, "{}", six.threshold_q);
    assert!(bb.monotonicity_violations.is_empty());
}

#[test]
fn closed_form_witness_scan() {
    let t = first_positive_n(&BellDiagonal::bb84(0.19, 0.0).unwrap(), 64).unwrap();
    assert!(t.is_some());
    assert!(first_positive_n(&BellDiagonal::bb84(0.21, 0.0).unwrap(), 1024)
        .unwrap()
        .is_none());
}

#[test]
fn repetition_crossovers() {
    let rep = |n| LinearCode::repetition(n).unwrap();
    let cases = [
        (Protocol::Bb84, 3, 0.151),
        (Protocol::Bb84, 4, 0.161),
        (Protocol::Bb84, 5, 0.167),
        (Protocol::SixState, 3, 0.197),
        (Protocol::SixState, 4, 0.213),
        (Protocol::SixState, 5, 0.224),
    ];
    for (p, n, expected) in cases {
        let q = crossover(
            &rep(n),
            &rep(n + 1),
            p,
            Formula::NoOtp,
            (expected - 0.02, expected + 0.02),
        )
        .unwrap()
        .unwrap();
        assert!((q - expected).abs() <= 2e-3, "{p} {n}: {q}");
    }
}

#[test]
fn noise_thresholds() {
    let full = LinearCode::full(1).unwrap();
    let rate = |p: Protocol, q: f64| {
        let spec = ChannelSpec::from_protocol(p, q).unwrap();
        noise_rate_at(&full, &spec, NoiseVariant::NoOtp, Q11::Minimize, NoiseP::Optimize)
            .unwrap()
            .total_rate
    };
    assert!(rate(Protocol::Bb84, 0.123) > 0.0);
    assert!(rate(Protocol::Bb84, 0.126) <= 1e-12);
    assert!(rate(Protocol::SixState, 0.140) > 0.0);
    assert!(rate(Protocol::SixState, 0.143) <= 1e-12);
}
