use clap::Parser;
use dmt::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("dmt: {e}");
        std::process::exit(e.exit_code() as i32);
    }
}
