use clap::Parser;
use grover_dephasing_cli::{emit, execute, Cli, CliError, RunContext};

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let config = cli.command.resolve()?;
    let ctx = RunContext::from_env()?;
    let out = execute(&config, &ctx)?;
    emit(&out, config.output())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
