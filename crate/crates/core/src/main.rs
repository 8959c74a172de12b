use clap::Parser;
use lasw::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let level = if cli.common().quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    std::process::exit(execute(&cli));
}
