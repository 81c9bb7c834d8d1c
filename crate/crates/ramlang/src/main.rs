use std::process::ExitCode;

use clap::Parser;
use ramlang::{run, usage_outcome, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let json_out = cli.json_out.clone();
    let command = format!("{:?}", cli.command).split('(').next().unwrap_or("").to_lowercase();
    let outcome = match cli.into_config() {
        Ok(config) => run(&config),
        Err(e) => usage_outcome(&command, &e),
    };
    let text = outcome.render();
    print!("{text}");
    if let Some(path) = json_out {
        if let Err(e) = std::fs::write(&path, &text) {
            eprintln!("cannot write {path}: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}
