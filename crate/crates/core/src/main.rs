use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hopecheck::cli::main_with(std::env::args_os()))
}
