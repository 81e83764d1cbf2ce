use clap::Parser;

fn main() {
    let cli = critfin_cli::Cli::parse();
    std::process::exit(critfin_cli::run(cli));
}
