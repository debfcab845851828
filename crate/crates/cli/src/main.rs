use clap::Parser;
use magnus_cli::app::{run, Cli};
use magnus_cli::exit;

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
