use clap::Parser;

fn main() {
    let cli = bohm_sim::cli::Cli::parse();
    std::process::exit(bohm_sim::cli::run(cli));
}
