use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cofinal_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = run(&cli, &mut std::io::stdin());
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.output),
        None => std::io::stdout().write_all(outcome.output.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("cofinal: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if outcome.exit != 0 {
        if let Some(msg) = error_message(&outcome.output) {
            eprintln!("cofinal: {msg}");
        }
    }
    ExitCode::from(outcome.exit as u8)
}

fn error_message(output: &str) -> Option<String> {
    let v: serde_json::Value = serde_json::from_str(output).ok()?;
    Some(v.get("error")?.get("message")?.as_str()?.to_string())
}
