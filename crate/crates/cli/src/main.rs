use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use kraus_cli::{run, Cli};

fn main() -> anyhow::Result<ExitCode> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = run(&cli);
    let json = serde_json::to_string_pretty(&exec.report)?;
    match cli.json.as_deref() {
        Some("-") => println!("{json}"),
        Some(path) => {
            std::fs::write(path, json + "\n").with_context(|| format!("writing {path}"))?;
            print!("{}", exec.text);
        }
        None if exec.report.exit_code == kraus_cli::EXIT_USAGE => eprint!("{}", exec.text),
        None => print!("{}", exec.text),
    }
    if exec.report.exit_code != 0 {
        log::info!("exit code {}", exec.report.exit_code);
    }
    Ok(ExitCode::from(exec.report.exit_code as u8))
}
