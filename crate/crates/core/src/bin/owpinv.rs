use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(owpinv::harness::cli::run_cli(std::env::args_os()))
}
