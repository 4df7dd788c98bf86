//! Scalar searches: the BB84 free parameter, best code per error rate, and
//! crossovers between codes.

use serde::{Deserialize, Serialize};

use crate::channel::BellDiagonal;
use crate::codes::LinearCode;
use crate::distribution::syndrome_distribution;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::noise::{maximize_over_p, rate_adding_noise, NoiseVariant};
use crate::protocol::{ChannelSpec, Protocol, Q11};
use crate::rates::{evaluate, Formula, KeyRateReport};

pub const Q11_GRID_POINTS: usize = 201;
pub const Q11_RESOLUTION: f64 = 1e-6;
pub const CROSSOVER_RESOLUTION: f64 = 1e-5;
const TIE_TOL: f64 = 1e-12;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
pub fn golden_section_max<F>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Golden-section search for the minimum.
pub fn golden_section_min<F>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (x, v) = golden_section_max(&|x| f(x).map(|v| -v), lo, hi, tol)?;
    Ok((x, -v))
}

/// Coarse summary of the grid stage, kept for auditing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridTrace {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
    pub grid_best_x: f64,
    pub grid_best: f64,
    pub grid_worst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationOutcome {
    pub objective: String,
    pub q11: Option<f64>,
    pub noise_p: Option<f64>,
    pub value: f64,
    pub trace: Option<GridTrace>,
}

/// Minimizes `f(channel)` over the BB84 free parameter: a 201-point grid,
/// then golden-section refinement around the best grid point.
pub fn minimize_q11_by<F>(delta_b: f64, delta_p: f64, f: F) -> Result<(f64, f64, Option<GridTrace>)>
where
    F: Fn(&BellDiagonal) -> Result<f64> + Sync + Send,
{
    let spec = ChannelSpec::Bb84 { delta_b, delta_p };
    let (lo, hi) = spec.q11_interval().unwrap_or((0.0, 0.0));
    let eval = |q11: f64| f(&spec.channel(q11.clamp(lo, hi))?);
    if hi - lo <= 0.0 {
        return Ok((lo, eval(lo)?, None));
    }
    let step = (hi - lo) / (Q11_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..Q11_GRID_POINTS)
        .map(|i| {
            if i + 1 == Q11_GRID_POINTS {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect();
    let values = Exec::default()
        .map_slice(&grid, |&x| eval(x))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (x, v) = golden_section_min(&eval, a, b, Q11_RESOLUTION)?;
    let trace = GridTrace {
        points: Q11_GRID_POINTS,
        lo,
        hi,
        grid_best_x: grid[best],
        grid_best: values[best],
        grid_worst: worst,
    };
    if v < values[best] {
        Ok((x.clamp(lo, hi), v, Some(trace)))
    } else {
        Ok((grid[best], values[best], Some(trace)))
    }
}

fn report_for(code: &LinearCode, channel: &BellDiagonal, formula: Formula) -> Result<KeyRateReport> {
    evaluate(&syndrome_distribution(code, channel)?, formula)
}

/// Minimum of the raw total rate over `q11` for a plain formula.
pub fn minimize_over_q11(
    code: &LinearCode,
    delta_b: f64,
    delta_p: f64,
    formula: Formula,
) -> Result<OptimizationOutcome> {
    let (q11, value, trace) =
        minimize_q11_by(delta_b, delta_p, |ch| Ok(report_for(code, ch, formula)?.total_rate_raw))?;
    Ok(OptimizationOutcome {
        objective: format!("{formula} {} bb84", code.label()),
        q11: Some(q11),
        noise_p: None,
        value,
        trace,
    })
}

/// Key-rate report for a protocol at QBER `q`, minimizing over `q11` for
/// BB84 when asked to.
pub fn rate_at(code: &LinearCode, spec: &ChannelSpec, formula: Formula, q11: Q11) -> Result<KeyRateReport> {
    if formula.is_noise() {
        return Err(Error::InvalidParameter(format!(
            "formula {formula} needs a noise parameter"
        )));
    }
    match (spec, q11) {
        (ChannelSpec::Bb84 { delta_b, delta_p }, Q11::Minimize) => {
            let out = minimize_over_q11(code, *delta_b, *delta_p, formula)?;
            let q = out.q11.unwrap_or(0.0);
            Ok(report_for(code, &spec.channel(q)?, formula)?.with_q11(q))
        }
        (ChannelSpec::Bb84 { .. }, Q11::Fixed(q)) => Ok(report_for(code, &spec.channel(q)?, formula)?.with_q11(q)),
        _ => report_for(code, &spec.channel(0.0)?, formula),
    }
}

/// Noise probability choice for the adding-noise formulas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseP {
    #[default]
    Optimize,
    Fixed(f64),
}

/// Adding-noise rate; BB84 takes the worst `q11` for every `p` and the best
/// `p` overall.
pub fn noise_rate_at(
    code: &LinearCode,
    spec: &ChannelSpec,
    variant: NoiseVariant,
    q11: Q11,
    noise_p: NoiseP,
) -> Result<KeyRateReport> {
    let at = |ch: &BellDiagonal, p: f64| -> Result<KeyRateReport> {
        Ok(rate_adding_noise(&syndrome_distribution(code, ch)?, p, variant)?.report)
    };
    let value_at_p = |p: f64| -> Result<(f64, f64)> {
        match (spec, q11) {
            (ChannelSpec::Bb84 { delta_b, delta_p }, Q11::Minimize) => {
                let (q, v, _) = minimize_q11_by(*delta_b, *delta_p, |ch| Ok(at(ch, p)?.total_rate_raw))?;
                Ok((q, v))
            }
            (_, Q11::Fixed(q)) if spec.has_free_parameter() => Ok((q, at(&spec.channel(q)?, p)?.total_rate_raw)),
            _ => Ok((0.0, at(&spec.channel(0.0)?, p)?.total_rate_raw)),
        }
    };
    let p = match noise_p {
        NoiseP::Fixed(p) => p,
        NoiseP::Optimize => maximize_over_p(|p| Ok(value_at_p(p)?.1))?.0,
    };
    let (q, _) = value_at_p(p)?;
    let report = at(&spec.channel(q)?, p)?;
    Ok(if spec.has_free_parameter() {
        report.with_q11(q)
    } else {
        report
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestCode {
    pub qber: f64,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    pub report: KeyRateReport,
}

/// Candidate with the highest raw total rate; ties go to smaller `n`, then
/// larger `k`.
pub fn best_code(q: f64, protocol: Protocol, candidates: &[LinearCode], formula: Formula) -> Result<BestCode> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate codes".into()));
    }
    let spec = ChannelSpec::from_protocol(protocol, q)?;
    let mut best: Option<(usize, KeyRateReport)> = None;
    for (i, code) in candidates.iter().enumerate() {
        let rep = rate_at(code, &spec, formula, Q11::Minimize)?;
        let better = match &best {
            None => true,
            Some((bi, b)) => {
                let d = rep.total_rate_raw - b.total_rate_raw;
                let bc = &candidates[*bi];
                d > TIE_TOL
                    || (d.abs() <= TIE_TOL
                        && (code.n(), std::cmp::Reverse(code.k())) < (bc.n(), std::cmp::Reverse(bc.k())))
            }
        };
        if better {
            best = Some((i, rep));
        }
    }
    let (i, report) = best.expect("nonempty candidates");
    Ok(BestCode {
        qber: q,
        code: candidates[i].label().to_string(),
        n: candidates[i].n(),
        k: candidates[i].k(),
        rate: report.total_rate_raw,
        report,
    })
}

/// Bisection for the point where `f` leaves the strict sign it has at `lo`;
/// exact zeros count as having left. `None` when `f(hi)` keeps that sign.
pub fn bisect_sign_change<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let fa = f(lo)?;
    if fa == 0.0 {
        return Ok(Some(lo));
    }
    let keeps = |v: f64| (v > 0.0) == (fa > 0.0) && v != 0.0;
    if keeps(f(hi)?) {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if keeps(f(m)?) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// QBER where `rate(a) - rate(b)` changes sign, to `1e-5`.
pub fn crossover(
    a: &LinearCode,
    b: &LinearCode,
    protocol: Protocol,
    formula: Formula,
    bracket: (f64, f64),
) -> Result<Option<f64>> {
    let diff = |q: f64| -> Result<f64> {
        let spec = ChannelSpec::from_protocol(protocol, q)?;
        let ra = rate_at(a, &spec, formula, Q11::Minimize)?.total_rate_raw;
        let rb = rate_at(b, &spec, formula, Q11::Minimize)?.total_rate_raw;
        Ok(ra - rb)
    };
    bisect_sign_change(diff, bracket.0, bracket.1, CROSSOVER_RESOLUTION)
}

/// The repetition and single-parity families `rep:2..=max`, `spc:2..=max`.
pub fn standard_candidates(max: usize) -> Result<Vec<LinearCode>> {
    let mut out = Vec::new();
    for n in 2..=max {
        out.push(LinearCode::repetition(n)?);
    }
    for m in 2..=max {
        out.push(LinearCode::single_parity(m)?);
    }
    Ok(out)
}
