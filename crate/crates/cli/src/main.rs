use clap::Parser;
use subsimplex_cli::args::{execute, Cli};
use subsimplex_cli::error::exit;

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Some(manifest)) => {
            for note in &manifest.diagnostics.notes {
                eprintln!("note: {note}");
            }
            std::process::exit(exit::SUCCESS);
        }
        Ok(None) => std::process::exit(exit::SUCCESS),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
