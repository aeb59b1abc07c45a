use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lpmhd::cli::run_from(std::env::args_os()))
}
