use clap::Parser;

use knowbase_cli::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprint!("{}", e.report());
            std::process::exit(e.exit_code());
        }
    }
}
