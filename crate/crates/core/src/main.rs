use std::io::Write;

use clap::Parser;
use modag::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{}", out.render(cli.json));
            std::process::exit(out.code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
