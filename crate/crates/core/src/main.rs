use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dcg_core::cli::run(std::env::args_os()))
}
