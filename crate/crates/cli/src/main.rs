use clap::Parser;
use safebarrier_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("safebarrier: {e}");
        std::process::exit(e.exit_code());
    }
}
