use clap::Parser;
use emcomm_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.global.log_level)
        .parse_default_env()
        .init();
    if let Err(e) = emcomm_cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(emcomm_cli::exit_code(&e));
    }
}
