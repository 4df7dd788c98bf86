use std::path::PathBuf;

use adkey::asymptotics::Family;
use adkey::optimizer::NoiseP;
use adkey::protocol::{Protocol, Q11};
use adkey::rates::Formula;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "adkey", version)]
#[command(about = "Asymptotic key rates for QKD advantage distillation with linear codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Key rate of one or more codes and formulas for a single channel
    Keyrate(KeyrateArgs),
    /// Key rates over a QBER sweep, one row per (qber, code, formula)
    Scan(ScanArgs),
    /// Largest QBER with a positive key rate for a code family
    Threshold(ThresholdArgs),
    /// Best code per QBER among repetition and single-parity codes
    OptimalCodes(OptimalCodesArgs),
    /// Key rate with structured noise added before error correction
    Noise(NoiseArgs),
    /// Monte Carlo syndrome frequencies against the exact distribution
    Simulate(SimulateArgs),
    /// Error identification by random linear hashing
    HashLab(HashLabArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report to this path instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Significant digits for printed numbers
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,

    /// Seed for every random draw
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: adkey::Error| e.to_string())
}

fn parse_formula(s: &str) -> Result<Formula, String> {
    s.parse().map_err(|e: adkey::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: adkey::Error| e.to_string())
}

fn parse_q11(s: &str) -> Result<Q11, String> {
    s.parse().map_err(|e: adkey::Error| e.to_string())
}

fn parse_noise_p(s: &str) -> Result<NoiseP, String> {
    if s == "auto" {
        return Ok(NoiseP::Optimize);
    }
    s.parse::<f64>()
        .map(NoiseP::Fixed)
        .map_err(|_| format!("noise-p must be 'auto' or a number, got '{s}'"))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChannelArgs {
    /// bb84 or six-state
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: Option<Protocol>,

    /// Quantum bit error rate
    #[arg(long)]
    pub qber: Option<f64>,

    /// BB84 bit error rate (with --delta-p, overrides --qber)
    #[arg(long, requires = "delta_p")]
    pub delta_b: Option<f64>,

    /// BB84 phase error rate
    #[arg(long, requires = "delta_b")]
    pub delta_p: Option<f64>,

    /// Explicit Bell-diagonal channel p00,p01,p10,p11
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["protocol", "qber", "delta_b"])]
    pub probs: Option<Vec<f64>>,

    /// BB84 free parameter: auto (minimize the rate) or a value
    #[arg(long, default_value = "auto", value_parser = parse_q11)]
    pub q11: Q11,
}

#[derive(Args, Debug, Serialize)]
pub struct KeyrateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,

    /// Code selectors: rep:N, spc:M, full:N, hamming743, file:PATH, or ranges like rep:2..8
    #[arg(long = "code", required = true, num_args = 1.., value_delimiter = ',')]
    pub codes: Vec<String>,

    /// otp, otp-hash, no-otp, inplace, parity-otp, noise-otp, noise-no-otp
    #[arg(long = "formula", num_args = 1.., value_delimiter = ',', default_value = "no-otp", value_parser = parse_formula)]
    pub formulas: Vec<Formula>,

    /// Noise probability for the noise formulas: auto (optimize) or a value
    #[arg(long, default_value = "auto", value_parser = parse_noise_p)]
    pub noise_p: NoiseP,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[arg(long, required = true, value_parser = parse_protocol)]
    pub protocol: Option<Protocol>,

    #[arg(long, default_value_t = 0.0)]
    pub from: f64,

    #[arg(long, default_value_t = 0.3)]
    pub to: f64,

    #[arg(long, default_value_t = 0.01)]
    pub step: f64,

    #[arg(long = "code", required = true, num_args = 1.., value_delimiter = ',')]
    pub codes: Vec<String>,

    #[arg(long = "formula", num_args = 1.., value_delimiter = ',', default_value = "no-otp", value_parser = parse_formula)]
    pub formulas: Vec<Formula>,

    #[arg(long, default_value = "auto", value_parser = parse_q11)]
    pub q11: Q11,

    #[arg(long, default_value = "auto", value_parser = parse_noise_p)]
    pub noise_p: NoiseP,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long, required = true, value_parser = parse_protocol)]
    pub protocol: Option<Protocol>,

    /// rep, spc or full
    #[arg(long, default_value = "rep", value_parser = parse_family)]
    pub family: Family,

    #[arg(long, default_value = "no-otp", value_parser = parse_formula)]
    pub formula: Formula,

    /// Largest block length searched (default 2000 with --closed-form, else 8)
    #[arg(long)]
    pub max_n: Option<usize>,

    #[arg(long, default_value_t = 1e-5)]
    pub resolution: f64,

    /// Use the repetition-code closed form instead of enumeration
    #[arg(long)]
    pub closed_form: bool,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct OptimalCodesArgs {
    #[arg(long, required = true, value_parser = parse_protocol)]
    pub protocol: Option<Protocol>,

    #[arg(long, default_value_t = 0.0)]
    pub from: f64,

    #[arg(long, default_value_t = 0.3)]
    pub to: f64,

    #[arg(long, default_value_t = 0.01)]
    pub step: f64,

    #[arg(long, default_value = "no-otp", value_parser = parse_formula)]
    pub formula: Formula,

    /// Candidates are rep:2..=MAX and spc:2..=MAX unless --code is given
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,

    #[arg(long = "code", num_args = 1.., value_delimiter = ',')]
    pub codes: Vec<String>,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct NoiseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,

    #[arg(long = "code", required = true, num_args = 1.., value_delimiter = ',')]
    pub codes: Vec<String>,

    /// noise-otp or noise-no-otp
    #[arg(long = "formula", num_args = 1.., value_delimiter = ',', default_value = "noise-no-otp", value_parser = parse_formula)]
    pub formulas: Vec<Formula>,

    #[arg(long, default_value = "auto", value_parser = parse_noise_p)]
    pub noise_p: NoiseP,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,

    #[arg(long, default_value = "rep:2")]
    pub code: String,

    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct HashLabArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,

    #[arg(long, default_value_t = 8)]
    pub k: usize,

    /// Error set: all patterns of weight at most W
    #[arg(long, default_value_t = 1, conflicts_with = "patterns")]
    pub max_weight: usize,

    /// Error set: explicit comma-separated patterns such as 0001,0110
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub patterns: Option<Vec<String>>,

    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Keyrate(a) => &a.output,
            Command::Scan(a) => &a.output,
            Command::Threshold(a) => &a.output,
            Command::OptimalCodes(a) => &a.output,
            Command::Noise(a) => &a.output,
            Command::Simulate(a) => &a.output,
            Command::HashLab(a) => &a.output,
        }
    }
}
