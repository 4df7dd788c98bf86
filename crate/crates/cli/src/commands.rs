use adkey::asymptotics::{numeric_threshold, ThresholdQuery, ThresholdResult};
use adkey::channel::BellDiagonal;
use adkey::codes::LinearCode;
use adkey::distribution::syndrome_distribution;
use adkey::gf2::BitVector;
use adkey::montecarlo::{
    empirical_syndrome_stats, hash_identification_experiment, ErrorSet, HashLabResult, McConfig, SyndromeStats,
};
use adkey::noise::NoiseVariant;
use adkey::optimizer::{best_code, crossover, noise_rate_at, rate_at, standard_candidates, NoiseP};
use adkey::protocol::{ChannelSpec, Protocol, Q11};
use adkey::rates::{Formula, KeyRateReport};
use adkey::Exec;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::format::{num, opt, pairs, table};
use crate::CliError;

/// A finished result in all three output forms.
pub struct Rendered {
    pub text: String,
    pub csv: Vec<Vec<String>>,
    pub csv_header: Vec<&'static str>,
    pub json: Value,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Expands `rep:2..8` style ranges and resolves every selector.
pub fn resolve_codes(selectors: &[String]) -> Result<Vec<LinearCode>, CliError> {
    let mut out = Vec::new();
    for sel in selectors {
        let range = sel
            .split_once(':')
            .filter(|(kind, _)| matches!(*kind, "rep" | "spc" | "full"))
            .and_then(|(kind, arg)| arg.split_once("..").map(|(a, b)| (kind, a, b)));
        match range {
            Some((kind, a, b)) => {
                let parse = |s: &str| {
                    s.trim_start_matches('=')
                        .parse::<usize>()
                        .map_err(|_| invalid(format!("bad code range {sel:?}")))
                };
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(invalid(format!("empty code range {sel:?}")));
                }
                for n in a..=b {
                    out.push(LinearCode::from_selector(&format!("{kind}:{n}"))?);
                }
            }
            None => out.push(LinearCode::from_selector(sel)?),
        }
    }
    if out.is_empty() {
        return Err(invalid("no codes given"));
    }
    Ok(out)
}

pub fn channel_spec(a: &ChannelArgs) -> Result<ChannelSpec, CliError> {
    if let Some(p) = &a.probs {
        if p.len() != 4 {
            return Err(invalid(format!(
                "--probs takes 4 values p00,p01,p10,p11, got {}",
                p.len()
            )));
        }
        return Ok(ChannelSpec::Explicit {
            channel: BellDiagonal::from_probs(p[0], p[1], p[2], p[3])?,
        });
    }
    if let (Some(delta_b), Some(delta_p)) = (a.delta_b, a.delta_p) {
        if a.protocol == Some(Protocol::SixState) {
            return Err(invalid("--delta-b/--delta-p describe a bb84 channel"));
        }
        let spec = ChannelSpec::Bb84 { delta_b, delta_p };
        let (lo, _) = spec.q11_interval().unwrap_or((0.0, 0.0));
        spec.channel(lo)?;
        return Ok(spec);
    }
    let protocol = a
        .protocol
        .ok_or_else(|| invalid("--protocol is required unless --probs or --delta-b/--delta-p is given"))?;
    let qber = a.qber.ok_or_else(|| invalid("--qber is required"))?;
    Ok(ChannelSpec::from_protocol(protocol, qber)?)
}

fn variant(formula: Formula) -> Option<NoiseVariant> {
    match formula {
        Formula::NoiseOtp => Some(NoiseVariant::Otp),
        Formula::NoiseNoOtp => Some(NoiseVariant::NoOtp),
        _ => None,
    }
}

/// One report, dispatching noise formulas to the adding-noise optimizer.
pub fn report(
    code: &LinearCode,
    spec: &ChannelSpec,
    formula: Formula,
    q11: Q11,
    noise_p: NoiseP,
) -> adkey::Result<KeyRateReport> {
    match variant(formula) {
        Some(v) => noise_rate_at(code, spec, v, q11, noise_p),
        None => rate_at(code, spec, formula, q11),
    }
}

fn reports(
    codes: &[LinearCode],
    spec: &ChannelSpec,
    formulas: &[Formula],
    q11: Q11,
    noise_p: NoiseP,
) -> Result<Vec<KeyRateReport>, CliError> {
    let jobs: Vec<(usize, Formula)> = (0..codes.len())
        .flat_map(|c| formulas.iter().map(move |&f| (c, f)))
        .collect();
    Exec::default()
        .map_slice(&jobs, |&(c, f)| report(&codes[c], spec, f, q11, noise_p))
        .into_iter()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

pub const SWEEP_HEADER: [&str; 7] = ["qber", "code", "formula", "q11", "noise_p", "key_rate", "key_rate_raw"];

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub qber: f64,
    pub code: String,
    pub formula: Formula,
    pub q11: Option<f64>,
    pub noise_p: Option<f64>,
    pub key_rate: f64,
    pub key_rate_raw: f64,
}

impl SweepRow {
    fn new(qber: f64, r: &KeyRateReport) -> Self {
        SweepRow {
            qber,
            code: r.code.clone(),
            formula: r.formula,
            q11: r.params.q11,
            noise_p: r.params.noise_p,
            key_rate: r.total_rate,
            key_rate_raw: r.total_rate_raw,
        }
    }

    fn cells(&self, sig: u8) -> Vec<String> {
        vec![
            num(self.qber, sig),
            self.code.clone(),
            self.formula.to_string(),
            opt(self.q11, sig),
            opt(self.noise_p, sig),
            num(self.key_rate, sig),
            num(self.key_rate_raw, sig),
        ]
    }
}

fn describe_channel(spec: &ChannelSpec, sig: u8) -> String {
    match *spec {
        ChannelSpec::SixState { qber } => format!("six-state qber {}", num(qber, sig)),
        ChannelSpec::Bb84 { delta_b, delta_p } if delta_b == delta_p => format!("bb84 qber {}", num(delta_b, sig)),
        ChannelSpec::Bb84 { delta_b, delta_p } => {
            format!("bb84 delta_b {} delta_p {}", num(delta_b, sig), num(delta_p, sig))
        }
        ChannelSpec::Explicit { channel } => {
            let p = channel.probs();
            format!(
                "explicit p00 {} p01 {} p10 {} p11 {}",
                num(p[0], sig),
                num(p[1], sig),
                num(p[2], sig),
                num(p[3], sig)
            )
        }
    }
}

/// Syndromes of codes without checks are empty; print a dash instead.
fn syndrome_cell(s: &BitVector) -> String {
    if s.is_empty() {
        "-".into()
    } else {
        s.to_string()
    }
}

fn report_text(spec: &ChannelSpec, r: &KeyRateReport, bracket: &str, sig: u8) -> String {
    let mut head = format!("{} {}  {}  {}", r.code, bracket, r.formula, describe_channel(spec, sig));
    if let Some(q) = r.params.q11 {
        head.push_str(&format!("  q11 {}", num(q, sig)));
    }
    if let Some(p) = r.params.noise_p {
        head.push_str(&format!("  noise_p {}", num(p, sig)));
    }
    let parity = r.entries.iter().any(|e| e.branches.is_some());
    let mut header = vec!["syndrome", "q_j", "I_b_j", "avg_I_p", "R_j", "r_j"];
    if parity {
        header.extend(["branch_a", "branch_b"]);
    }
    header.push("status");
    let rows: Vec<Vec<String>> = r
        .entries
        .iter()
        .map(|e| {
            let mut row = vec![
                syndrome_cell(&e.syndrome),
                num(e.q_j, sig),
                num(e.consumption.bit, sig),
                num(e.consumption.avg_phase, sig),
                num(e.consumption.total, sig),
                num(e.r_j, sig),
            ];
            if parity {
                let [a, b] = e.branches.unwrap_or([f64::NAN; 2]);
                row.extend([num(a, sig), num(b, sig)]);
            }
            row.push(if e.kept { "kept" } else { "discarded" }.to_string());
            row
        })
        .collect();
    let mut out = head + "\n" + &table(&header, &rows);
    out.push_str(&pairs(&[
        ("overhead", num(r.overhead, sig)),
        ("total_rate_raw", num(r.total_rate_raw, sig)),
        ("total_rate", num(r.total_rate, sig)),
    ]));
    out
}

fn render_reports(
    spec: &ChannelSpec,
    codes: &[LinearCode],
    reports: Vec<KeyRateReport>,
    sig: u8,
) -> Result<Rendered, CliError> {
    let bracket = |r: &KeyRateReport| {
        codes
            .iter()
            .find(|c| c.label() == r.code)
            .map(|c| c.bracket_name())
            .unwrap_or_else(|| format!("[{} {}]", r.n, r.k))
    };
    let text = reports
        .iter()
        .map(|r| report_text(spec, r, &bracket(r), sig))
        .collect::<Vec<_>>()
        .join("\n");
    let csv = reports
        .iter()
        .map(|r| SweepRow::new(spec.qber(), r).cells(sig))
        .collect();
    Ok(Rendered {
        text,
        csv,
        csv_header: SWEEP_HEADER.to_vec(),
        json: serde_json::to_value(&reports).map_err(CliError::internal)?,
    })
}

pub fn keyrate(a: &KeyrateArgs) -> Result<Rendered, CliError> {
    let spec = channel_spec(&a.channel)?;
    let codes = resolve_codes(&a.codes)?;
    let reports = reports(&codes, &spec, &a.formulas, a.channel.q11, a.noise_p)?;
    render_reports(&spec, &codes, reports, a.output.precision)
}

pub fn noise(a: &NoiseArgs) -> Result<Rendered, CliError> {
    if let Some(f) = a.formulas.iter().find(|f| !f.is_noise()) {
        return Err(invalid(format!(
            "formula {f} is not a noise formula (use noise-otp or noise-no-otp)"
        )));
    }
    let spec = channel_spec(&a.channel)?;
    let codes = resolve_codes(&a.codes)?;
    let reports = reports(&codes, &spec, &a.formulas, a.channel.q11, a.noise_p)?;
    render_reports(&spec, &codes, reports, a.output.precision)
}

/// `from, from + step, ..., to` with the endpoint included when it lies on
/// the grid; values are rounded to 1e-12 to keep decimal grids clean.
pub fn sweep_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if step.is_nan() || step <= 0.0 || !from.is_finite() || !to.is_finite() || to < from {
        return Err(invalid(format!("bad sweep from {from} to {to} step {step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(invalid(format!("sweep of {count} points exceeds the limit of 100000")));
    }
    Ok((0..count)
        .map(|i| ((from + step * i as f64) * 1e12).round() / 1e12)
        .collect())
}

pub fn scan(a: &ScanArgs) -> Result<Rendered, CliError> {
    let protocol = a.protocol.ok_or_else(|| invalid("--protocol is required"))?;
    let codes = resolve_codes(&a.codes)?;
    let grid = sweep_grid(a.from, a.to, a.step)?;
    let specs = grid
        .iter()
        .map(|&q| ChannelSpec::from_protocol(protocol, q))
        .collect::<adkey::Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, Formula)> = (0..grid.len())
        .flat_map(|qi| (0..codes.len()).flat_map(move |c| a.formulas.iter().map(move |&f| (qi, c, f))))
        .collect();
    let rows = Exec::default()
        .map_slice(&jobs, |&(qi, c, f)| {
            report(&codes[c], &specs[qi], f, a.q11, a.noise_p).map(|r| SweepRow::new(grid[qi], &r))
        })
        .into_iter()
        .collect::<adkey::Result<Vec<_>>>()?;
    let sig = a.output.precision;
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.cells(sig)).collect();
    Ok(Rendered {
        text: format!("{protocol} sweep, {} points\n", grid.len()) + &table(&SWEEP_HEADER, &cells),
        csv: cells,
        csv_header: SWEEP_HEADER.to_vec(),
        json: serde_json::to_value(&rows).map_err(CliError::internal)?,
    })
}

pub fn threshold(a: &ThresholdArgs) -> Result<Rendered, CliError> {
    let protocol = a.protocol.ok_or_else(|| invalid("--protocol is required"))?;
    let query = ThresholdQuery {
        protocol,
        formula: a.formula,
        family: a.family,
        max_n: a.max_n.unwrap_or(if a.closed_form { 2000 } else { 8 }),
        resolution: a.resolution,
        closed_form: a.closed_form,
    };
    let res: ThresholdResult = numeric_threshold(&query)?;
    let sig = a.output.precision;
    let mut items = Vec::new();
    match res.analytic_limit {
        Some(limit) => {
            items.push(("threshold", format!("{}  (n -> infinity)", num(limit, sig))));
            items.push((
                "finite_n",
                format!("{}  (n <= {})", num(res.threshold_q, sig), res.max_n),
            ));
        }
        None => items.push((
            "threshold",
            format!("{}  (n <= {})", num(res.threshold_q, sig), res.max_n),
        )),
    }
    items.push(("protocol", protocol.to_string()));
    items.push(("family", res.family.to_string()));
    items.push(("formula", res.formula.to_string()));
    items.push(("resolution", num(res.resolution, sig)));
    if let Some(w) = res.witness {
        items.push((
            "witness",
            format!("q {}  n {}  rate {}", num(w.q, sig), w.n, num(w.rate, sig)),
        ));
    }
    let violations = if res.monotonicity_violations.is_empty() {
        "none".to_string()
    } else {
        res.monotonicity_violations
            .iter()
            .map(|&q| num(q, sig))
            .collect::<Vec<_>>()
            .join(" ")
    };
    items.push(("monotonicity_violations", violations));
    let w = res.witness;
    let csv = vec![vec![
        protocol.to_string(),
        res.family.to_string(),
        res.formula.to_string(),
        res.max_n.to_string(),
        res.closed_form.to_string(),
        num(res.threshold_q, sig),
        opt(res.analytic_limit, sig),
        opt(w.map(|w| w.q), sig),
        w.map(|w| w.n.to_string()).unwrap_or_default(),
        opt(w.map(|w| w.rate), sig),
    ]];
    Ok(Rendered {
        text: pairs(&items),
        csv,
        csv_header: vec![
            "protocol",
            "family",
            "formula",
            "max_n",
            "closed_form",
            "threshold_q",
            "analytic_limit",
            "witness_q",
            "witness_n",
            "witness_rate",
        ],
        json: serde_json::to_value(&res).map_err(CliError::internal)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimalRow {
    pub qber: f64,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub key_rate_raw: f64,
}

/// A maximal run of grid points sharing the best code, with the refined
/// crossover to the next run.
#[derive(Clone, Debug, Serialize)]
pub struct OptimalRange {
    pub code: String,
    pub from: f64,
    pub to: f64,
    pub crossover_to_next: Option<f64>,
}

pub fn optimal_codes(a: &OptimalCodesArgs) -> Result<Rendered, CliError> {
    let protocol = a.protocol.ok_or_else(|| invalid("--protocol is required"))?;
    if a.formula.is_noise() {
        return Err(invalid("use the noise subcommand for noise formulas"));
    }
    let candidates = if a.codes.is_empty() {
        if a.max_n < 2 {
            return Err(invalid("--max-n must be at least 2"));
        }
        standard_candidates(a.max_n)?
    } else {
        resolve_codes(&a.codes)?
    };
    let grid = sweep_grid(a.from, a.to, a.step)?;
    let best = Exec::default()
        .map_slice(&grid, |&q| best_code(q, protocol, &candidates, a.formula))
        .into_iter()
        .collect::<adkey::Result<Vec<_>>>()?;
    let rows: Vec<OptimalRow> = best
        .iter()
        .map(|b| OptimalRow {
            qber: b.qber,
            code: b.code.clone(),
            n: b.n,
            k: b.k,
            key_rate_raw: b.rate,
        })
        .collect();

    // Runs of the best code over the positive part of the sweep.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if r.key_rate_raw <= 0.0 {
            continue;
        }
        match runs.last_mut() {
            Some((_, end)) if *end + 1 == i && rows[*end].code == r.code => *end = i,
            _ => runs.push((i, i)),
        }
    }
    let by_label = |label: &str| candidates.iter().find(|c| c.label() == label);
    let mut ranges = Vec::new();
    for (idx, &(s, e)) in runs.iter().enumerate() {
        let next = runs.get(idx + 1).filter(|&&(ns, _)| ns == e + 1);
        let cross = match next {
            Some(&(ns, _)) => match (by_label(&rows[e].code), by_label(&rows[ns].code)) {
                (Some(x), Some(y)) => crossover(x, y, protocol, a.formula, (rows[e].qber, rows[ns].qber))?,
                _ => None,
            },
            None => None,
        };
        ranges.push(OptimalRange {
            code: rows[s].code.clone(),
            from: rows[s].qber,
            to: rows[e].qber,
            crossover_to_next: cross,
        });
    }

    let sig = a.output.precision;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.qber, sig),
                r.code.clone(),
                r.n.to_string(),
                r.k.to_string(),
                num(r.key_rate_raw, sig),
            ]
        })
        .collect();
    let range_cells: Vec<Vec<String>> = ranges
        .iter()
        .map(|r| {
            vec![
                r.code.clone(),
                num(r.from, sig),
                num(r.to, sig),
                opt(r.crossover_to_next, sig),
            ]
        })
        .collect();
    let text = format!("{protocol} {} best codes\n", a.formula)
        + &table(&["code", "from", "to", "crossover"], &range_cells)
        + "\n"
        + &table(&["qber", "code", "n", "k", "key_rate_raw"], &cells);
    Ok(Rendered {
        text,
        csv: cells,
        csv_header: vec!["qber", "code", "n", "k", "key_rate_raw"],
        json: json!({ "rows": rows, "ranges": ranges }),
    })
}

#[derive(Serialize)]
struct SimulateResult<'a> {
    code: &'a str,
    channel: BellDiagonal,
    stats: &'a SyndromeStats,
}

pub fn simulate(a: &SimulateArgs) -> Result<Rendered, CliError> {
    let spec = channel_spec(&a.channel)?;
    let q11 = match (spec, a.channel.q11) {
        (ChannelSpec::Bb84 { .. }, Q11::Fixed(v)) => v,
        (ChannelSpec::Bb84 { delta_b, delta_p }, Q11::Minimize) => {
            let (lo, hi) = spec.q11_interval().unwrap_or((0.0, 0.0));
            (delta_b * delta_p).clamp(lo, hi)
        }
        _ => 0.0,
    };
    let channel = spec.channel(q11)?;
    let code = LinearCode::from_selector(&a.code)?;
    let dist = syndrome_distribution(&code, &channel)?;
    let cfg = McConfig {
        seed: a.output.seed,
        samples: a.samples,
        code: code.clone(),
        channel,
    };
    let stats = empirical_syndrome_stats(&cfg, &dist)?;
    let sig = a.output.precision;
    let cells: Vec<Vec<String>> = stats
        .syndromes
        .iter()
        .map(|s| {
            vec![
                syndrome_cell(&s.syndrome),
                s.count.to_string(),
                num(s.empirical, sig),
                num(s.analytic, sig),
                num(s.z, sig),
            ]
        })
        .collect();
    let header = ["syndrome", "count", "empirical", "analytic", "z"];
    let text = format!(
        "{} {}  seed {}  samples {}\n",
        code.label(),
        code.bracket_name(),
        stats.seed,
        stats.samples
    ) + &table(&header, &cells)
        + &pairs(&[
            ("max_abs_z", num(stats.max_abs_z(), sig)),
            ("delta_b", num(stats.delta_b, sig)),
            ("delta_p", num(stats.delta_p, sig)),
        ]);
    Ok(Rendered {
        text,
        csv: cells,
        csv_header: header.to_vec(),
        json: serde_json::to_value(SimulateResult {
            code: code.label(),
            channel,
            stats: &stats,
        })
        .map_err(CliError::internal)?,
    })
}

pub fn hash_lab(a: &HashLabArgs) -> Result<Rendered, CliError> {
    let set = match &a.patterns {
        Some(list) => ErrorSet::Explicit(
            list.iter()
                .map(|s| s.parse::<BitVector>())
                .collect::<adkey::Result<Vec<_>>>()?,
        ),
        None => ErrorSet::WeightAtMost(a.max_weight),
    };
    let res: HashLabResult = hash_identification_experiment(a.n, a.k, &set, a.trials, a.output.seed)?;
    let sig = a.output.precision;
    let row = vec![
        res.n.to_string(),
        res.k.to_string(),
        res.seed.to_string(),
        res.error_set_size.to_string(),
        res.trials.to_string(),
        res.failures.to_string(),
        num(res.empirical_failure, sig),
        num(res.bound, sig),
        res.within_bound().to_string(),
    ];
    let header = vec![
        "n",
        "k",
        "seed",
        "error_set_size",
        "trials",
        "failures",
        "empirical_failure",
        "bound",
        "within_bound",
    ];
    let text = pairs(&header.iter().copied().zip(row.iter().cloned()).collect::<Vec<_>>());
    Ok(Rendered {
        text,
        csv: vec![row],
        csv_header: header,
        json: serde_json::to_value(&res).map_err(CliError::internal)?,
    })
}
