use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pamix_cli::run(std::env::args_os()))
}
