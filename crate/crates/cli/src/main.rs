use clap::Parser;

fn main() {
    let cli = xpaudit_cli::Cli::parse();
    if let Err(failure) = xpaudit_cli::run(cli) {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.exit_code());
    }
}
