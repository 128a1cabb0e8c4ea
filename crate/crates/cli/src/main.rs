mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Cli;
use rectgap::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_PRECISION: u8 = 3;
const EXIT_FACTORIZATION: u8 = 4;
const EXIT_SELFTEST: u8 = 5;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::PrecisionExhausted { .. } => ("precision_exhausted", EXIT_PRECISION),
        Error::FactorizationTimeout { .. } => ("factorization_timeout", EXIT_FACTORIZATION),
        Error::DivisibilityViolation(_) => ("internal", EXIT_INTERNAL),
        _ => ("validation", EXIT_VALIDATION),
    }
}

fn emit_error(kind: &str, message: String, code: u8) -> ExitCode {
    let body = json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = e.print();
                    emit_error("usage", e.kind().to_string(), EXIT_USAGE)
                }
            };
        }
    };
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(e) => {
            let (kind, code) = classify(&e);
            return emit_error(kind, e.to_string(), code);
        }
    };
    let payload = output::render(&outcome.payload, cli.format);
    let manifest = output::RunManifest::new(&argv[1..], outcome.alpha.as_deref(), outcome.seed, cli.format, &payload);
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(payload.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(EXIT_INTERNAL);
    }
    eprintln!("{}", serde_json::to_string(&json!({ "manifest": manifest })).expect("manifest serializes"));
    if outcome.selftest_failed {
        return ExitCode::from(EXIT_SELFTEST);
    }
    ExitCode::SUCCESS
}
