use clap::Parser;

fn main() {
    let cli = zetakit_cli::Cli::parse();
    std::process::exit(zetakit_cli::run(cli));
}
