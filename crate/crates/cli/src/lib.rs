//! Command-line front end for the `adkey` library.
//!
//! [`run`] parses arguments, evaluates the subcommand and writes the report.
//! Every report starts with the fully resolved arguments: a `# run:` line in
//! text and CSV, a `run` member in JSON.

pub mod args;
pub mod commands;
pub mod format;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, Format};
use commands::Rendered;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or parameters the library rejected; exit code 2.
    Usage(String),
    /// The report could not be written; exit code 3.
    Output(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Output(_) => 3,
        }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Output(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Output(m) => f.write_str(m),
        }
    }
}

impl From<adkey::Error> for CliError {
    fn from(e: adkey::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn evaluate(cmd: &Command) -> Result<Rendered, CliError> {
    match cmd {
        Command::Keyrate(a) => commands::keyrate(a),
        Command::Scan(a) => commands::scan(a),
        Command::Threshold(a) => commands::threshold(a),
        Command::OptimalCodes(a) => commands::optimal_codes(a),
        Command::Noise(a) => commands::noise(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::HashLab(a) => commands::hash_lab(a),
    }
}

/// The report for `cmd` as bytes in the requested format.
pub fn render(cmd: &Command) -> Result<Vec<u8>, CliError> {
    let run: Value = serde_json::to_value(cmd).map_err(CliError::internal)?;
    let rendered = evaluate(cmd)?;
    let echo = format!("# run: {run}\n");
    let bytes = match cmd.output().format {
        Format::Text => (echo + &rendered.text).into_bytes(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "run": run, "result": rendered.json }))
                .map_err(CliError::internal)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(echo.into_bytes());
            w.write_record(&rendered.csv_header).map_err(CliError::internal)?;
            for row in &rendered.csv {
                w.write_record(row).map_err(CliError::internal)?;
            }
            w.into_inner().map_err(CliError::internal)?
        }
    };
    Ok(bytes)
}

fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let bytes = render(cmd)?;
    match &cmd.output().out {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(&bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::Output(format!("cannot write output: {e}"))),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{first}");
            return 2;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}
