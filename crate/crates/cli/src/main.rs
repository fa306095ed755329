use clap::Parser;

fn main() -> std::process::ExitCode {
    opcalc_cli::run(opcalc_cli::Cli::parse())
}
