use clap::Parser;
use fidest_cli::{run_cli, Cli};

fn main() {
    if let Err(e) = run_cli(Cli::parse()) {
        eprintln!("fidest: {e}");
        std::process::exit(e.exit_code());
    }
}
