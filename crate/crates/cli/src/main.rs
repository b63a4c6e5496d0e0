use std::process::ExitCode;

use clap::Parser;
use qflow::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("QFLOW_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("qflow: {e}");
                    return ExitCode::from(1);
                }
            }
            _ => {
                eprintln!("qflow: QFLOW_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
