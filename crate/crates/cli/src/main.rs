use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qdeform_cli::run(std::env::args_os()))
}
