use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(corelens_cli::run(std::env::args_os()))
}
