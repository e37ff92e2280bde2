use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hfine_cli::{execute, CliError, Command};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    SteadyScan,
    N14Scan,
    CptScan,
    Narrowing,
    SqueezingDemo,
    Validate,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::SteadyScan => Command::SteadyScan,
            Cmd::N14Scan => Command::N14Scan,
            Cmd::CptScan => Command::CptScan,
            Cmd::Narrowing => Command::Narrowing,
            Cmd::SqueezingDemo => Command::SqueezingDemo,
            Cmd::Validate => Command::Validate,
        }
    }
}

/// NV-center hyperfine simulations driven by TOML scenarios.
#[derive(Debug, Parser)]
#[command(name = "hfine", version)]
struct Args {
    command: Cmd,
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides run.seed from the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", CliError::Config(format!("thread pool: {e}")));
            return ExitCode::from(2);
        }
    }
    match execute(args.command.into(), &args.config, &args.out, args.seed) {
        Ok(m) => {
            for (k, v) in &m.summary {
                println!("{k} = {v}");
            }
            println!("wrote {} file(s) to {}", m.files.len() + 1, args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hfine {}: {e}", Command::from(args.command).name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
