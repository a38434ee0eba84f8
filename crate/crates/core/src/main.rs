use clap::Parser;

fn main() {
    let cli = txpolicy::cli::Cli::parse();
    std::process::exit(txpolicy::cli::run(cli));
}
